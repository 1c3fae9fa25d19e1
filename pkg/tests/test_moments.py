import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loovar.dgp import reference_dgps, sample, true_moments, true_products
from loovar.moments import (
    MomentProducts,
    auxiliary_t,
    elementary_symmetric_4,
    estimate_moment_products,
    mu4_power_enumerated,
    raw_moments,
)

from conftest import mc_batches, z_score

FIELDS = ("mu2_sigma2", "sigma4", "mu_mu3", "mu4_central")


def test_rejects_small_n():
    with pytest.raises(ValueError):
        raw_moments([1.0, 2.0, 3.0])


def test_constant_data():
    rm = raw_moments(np.full(5, 1.5))
    for k, value in enumerate((rm.alpha1, rm.alpha2, rm.alpha3, rm.alpha4), 1):
        assert value == pytest.approx(1.5**k, rel=1e-15)
    assert rm.mu4_power == pytest.approx(1.5**4, rel=1e-14)


def test_single_combination():
    assert raw_moments([1.0, 2.0, 3.0, 4.0]).mu4_power == pytest.approx(24.0, rel=1e-15)


def test_newton_matches_enumeration_n6():
    y = np.random.default_rng(0).normal(size=6)
    assert raw_moments(y).mu4_power == pytest.approx(mu4_power_enumerated(y), rel=1e-12)


@pytest.mark.parametrize("c", [-3.0, 0.2, 1.0, 7.5])
@pytest.mark.parametrize("n", [4, 5, 16, 50])
def test_constant_data_collapse(c, n):
    mp = estimate_moment_products(raw_moments(np.full(n, c)))
    for name in FIELDS:
        assert abs(getattr(mp, name)) <= 1e-9 * c**4
    assert mp.mu4_power == pytest.approx(c**4, rel=1e-12)


def test_sigma4_is_t_minus_mu4_over_3():
    rm = raw_moments(np.random.default_rng(2).gamma(2.0, size=12))
    mp = estimate_moment_products(rm)
    assert mp.sigma4 == pytest.approx((auxiliary_t(rm) - mp.mu4_central) / 3, rel=1e-10)


@settings(max_examples=60)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=20), st.randoms(use_true_random=False))
def test_permutation_invariance(y, rnd):
    perm = list(y)
    rnd.shuffle(perm)
    a = estimate_moment_products(raw_moments(y))
    b = estimate_moment_products(raw_moments(perm))
    scale = max(v * v for v in y) ** 2 * len(y) ** 3 + 1e-300
    for name in FIELDS + ("mu4_power",):
        assert abs(getattr(a, name) - getattr(b, name)) <= 1e-13 * scale


@settings(max_examples=60)
@given(st.lists(st.floats(-100, 100), min_size=4, max_size=30))
def test_sample_moment_inequalities(y):
    rm = raw_moments(y)
    eps = 1e-12 * (1 + rm.alpha4)
    assert rm.alpha2 >= rm.alpha1**2 - eps
    assert rm.alpha4 >= rm.alpha2**2 - eps


def test_batched_matches_single():
    y = np.random.default_rng(4).normal(1, 2, size=(5, 9))
    batch = estimate_moment_products(raw_moments(y))
    for row in range(5):
        single = estimate_moment_products(raw_moments(y[row]))
        for name in FIELDS:
            assert getattr(single, name) == getattr(batch, name)[row]


def test_true_products_validation():
    with pytest.raises(ValueError):
        MomentProducts(0, -1.0, 0, 0, 0, provenance="true")
    with pytest.raises(ValueError):
        MomentProducts(0, 1.0, 0, 0.5, 0, provenance="true")
    est = MomentProducts(0, -1.0, 0, 0, 0)
    assert est.negative_sigma4


@pytest.mark.slow
def test_standard_normal_unbiasedness_n16():
    sums = {name: [] for name in FIELDS}
    for y in mc_batches(lambda rng, s: rng.standard_normal(s), 1_000_000, 16, seed=101):
        mp = estimate_moment_products(raw_moments(y))
        for name in FIELDS:
            sums[name].append(getattr(mp, name))
    targets = dict(mu2_sigma2=0.0, sigma4=1.0, mu_mu3=0.0, mu4_central=3.0)
    for name, target in targets.items():
        assert abs(z_score(np.concatenate(sums[name]), target)) < 4, name


@pytest.mark.slow
@pytest.mark.parametrize("n", [4, 8, 16])
def test_unbiasedness_reference_dgps(n):
    for j, spec in enumerate(reference_dgps()):
        target = true_products(true_moments(spec))
        cols = {name: [] for name in FIELDS + ("mu4_power",)}
        for y in mc_batches(lambda rng, s: sample(spec, s, rng), 100_000, n, seed=1000 * n + j):
            mp = estimate_moment_products(raw_moments(y))
            for name in cols:
                cols[name].append(getattr(mp, name))
        for name in cols:
            z = z_score(np.concatenate(cols[name]), getattr(target, name))
            assert abs(z) < 4, (spec.label, n, name, z)


def test_elementary_symmetric_4_small_exact():
    assert elementary_symmetric_4([1.0, 2.0, 3.0, 4.0]) == 24.0
    # 5! * (1 + 1/2 + 1/3 + 1/4 + 1/5)
    assert elementary_symmetric_4([1.0, 2.0, 3.0, 4.0, 5.0]) == 274.0
    batch = elementary_symmetric_4(np.array([[1.0, 2.0, 3.0, 4.0, 5.0], [1.0, 1.0, 1.0, 1.0, 0.0]]))
    np.testing.assert_array_equal(batch, [274.0, 1.0])
