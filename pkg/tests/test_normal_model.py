import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from loovar.normal_model import (
    ModelConfig,
    coefficients,
    coefficients_from_predictive,
    log_predictive_density,
    loo_means,
    loo_pointwise_elpd,
)

from conftest import REFERENCE_MODEL

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def refit_log_predictive(config, y_train, y_new):
    # posterior of theta given y_train, then the predictive density at y_new
    k = len(y_train)
    post_var = 1.0 / (1.0 / config.sigma_0_sq + k / config.sigma_m_sq)
    post_mean = post_var * sum(y_train) / config.sigma_m_sq
    return stats.norm.logpdf(y_new, loc=post_mean, scale=math.sqrt(config.sigma_m_sq + post_var))


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        ModelConfig(1.0, math.inf)
    with pytest.raises(ValueError):
        coefficients(ModelConfig(1, 1), 0)


def test_coefficients_k1_by_hand():
    coef = coefficients(ModelConfig(1.0, 1.0), 1)
    alt = coefficients_from_predictive(ModelConfig(1.0, 1.0), 1)
    expected = dict(tau=0.5, sigma_pp_sq=1.5, a=-1 / 3, b=1 / 3, c=-1 / 12, d=-0.5 * math.log(3 * math.pi))
    for name, value in expected.items():
        assert getattr(coef, name) == pytest.approx(value, rel=1e-14, abs=1e-14)
        assert getattr(alt, name) == pytest.approx(value, rel=1e-14, abs=1e-14)


def test_reference_config_coefficients():
    coef = coefficients(REFERENCE_MODEL, 15)
    # sigma_pp^2 = 1.44 + 1/(1/4 + 15/1.44) = 1.44 + 0.09375
    assert coef.tau == pytest.approx(0.09375, rel=1e-14)
    assert coef.sigma_pp_sq == pytest.approx(1.53375, rel=1e-14)
    assert coef.a == pytest.approx(-1 / (2 * 1.53375), rel=1e-14)
    assert coef.a < 0 < coef.b and coef.c < 0


@given(positive, positive, st.integers(min_value=1, max_value=10_000))
def test_coefficient_routes_agree(sm, s0, k):
    cfg = ModelConfig(sm, s0)
    r, p = coefficients(cfg, k), coefficients_from_predictive(cfg, k)
    for name in ("a", "b", "c", "d", "tau", "sigma_pp_sq"):
        assert getattr(r, name) == pytest.approx(getattr(p, name), rel=1e-12, abs=1e-300)
    assert r.a < 0 and r.b > 0 and r.c < 0
    assert r.a == pytest.approx(-1 / (2 * r.sigma_pp_sq), rel=1e-12)


def test_log_density_peak():
    coef = coefficients(REFERENCE_MODEL, 7)
    ybar = 0.8
    peak = log_predictive_density(coef, coef.mean_factor * ybar, ybar)
    assert peak == pytest.approx(-0.5 * math.log(2 * math.pi * coef.sigma_pp_sq), abs=1e-12)


def test_log_density_small_case():
    coef = coefficients(ModelConfig(1.0, 1.0), 4)
    assert log_predictive_density(coef, 1.0, 0.0) == pytest.approx(
        stats.norm.logpdf(1.0, 0.0, math.sqrt(1 + 1 / 5)), abs=1e-12
    )


def test_log_density_random_against_logpdf():
    rng = np.random.default_rng(3)
    for k in (1, 5, 15, 100):
        coef = coefficients(REFERENCE_MODEL, k)
        yt, yb = rng.normal(0, 3, 50), rng.normal(0, 3, 50)
        direct = stats.norm.logpdf(yt, coef.mean_factor * yb, math.sqrt(coef.sigma_pp_sq))
        np.testing.assert_allclose(log_predictive_density(coef, yt, yb), direct, rtol=0, atol=1e-10)


def test_loo_elpd_refit_small():
    cfg = ModelConfig(1.0, 1.0)
    y = [0.0, 1.0, 2.0, 3.0]
    pe = loo_pointwise_elpd(cfg, y)
    for i in range(4):
        rest = y[:i] + y[i + 1 :]
        assert pe.values[i] == pytest.approx(refit_log_predictive(cfg, rest, y[i]), abs=1e-12)
    assert pe.sum == pytest.approx(pe.values.sum(), rel=1e-12)


def test_constant_data_symmetric():
    pe = loo_pointwise_elpd(REFERENCE_MODEL, np.full(9, 1.7))
    assert np.ptp(pe.values) == 0.0


def test_loo_elpd_reference_case():
    y = np.random.default_rng(11).normal(0, 1.2, 16)
    pe = loo_pointwise_elpd(REFERENCE_MODEL, y)
    direct = [refit_log_predictive(REFERENCE_MODEL, np.delete(y, i), y[i]) for i in range(16)]
    assert pe.sum == pytest.approx(math.fsum(direct), abs=1e-10)


@settings(max_examples=50)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=32))
def test_sign_flip_invariance(y):
    y = np.array(y)
    a = loo_pointwise_elpd(REFERENCE_MODEL, y).values
    b = loo_pointwise_elpd(REFERENCE_MODEL, -y).values
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40))
def test_loo_means_match_recompute(y):
    y = np.array(y)
    fast, slow = loo_means(y), loo_means(y, exact=True)
    scale = np.max(np.abs(y)) + 1e-300
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-13 * scale * len(y))


def test_batched_matches_single():
    y = np.random.default_rng(5).normal(size=(6, 10))
    batch = loo_pointwise_elpd(REFERENCE_MODEL, y)
    for row in range(6):
        single = loo_pointwise_elpd(REFERENCE_MODEL, y[row])
        np.testing.assert_array_equal(single.values, batch.values[row])


def test_rejects_short_or_nonfinite():
    with pytest.raises(ValueError):
        loo_pointwise_elpd(REFERENCE_MODEL, [1.0])
    with pytest.raises(ValueError):
        loo_pointwise_elpd(REFERENCE_MODEL, [1.0, math.nan, 2.0])
