"""Variance of the LOO-elpd sum: naive estimate, unbiased estimate, analytic value.

All analytic expressions take coefficients built at conditioning-set size
k = n - 1 (see `normal_model.coefficients`) and are linear in the four moment
products mu^2 sigma^2, sigma^4, mu mu_3 and mu_4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .moments import MomentProducts, estimate_moment_products, raw_moments
from .normal_model import (
    ElpdCoefficients,
    ModelConfig,
    PointwiseElpd,
    as_dataset,
    coefficients,
)

Method = Literal["naive", "unbiased", "analytic"]


@dataclass(frozen=True)
class FoldMoments:
    """Variance of one LOO term and covariance between two distinct terms."""

    var_i: np.ndarray | float
    cov_ij: np.ndarray | float


@dataclass(frozen=True)
class VarianceEstimate:
    value: np.ndarray | float
    method: Method
    negative_flag: np.ndarray | bool

    @property
    def clamped(self):
        """``max(value, 0)``, for taking a standard error.

        Clamping discards unbiasedness: the clamped value is biased upwards.
        """
        out = np.maximum(self.value, 0.0)
        return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def _estimate(value, method: Method) -> VarianceEstimate:
    value = np.asarray(value, dtype=np.float64)[()]
    flag = np.asarray(value) < 0
    return VarianceEstimate(value=value, method=method, negative_flag=flag[()] if flag.ndim == 0 else flag)


def _check_k(coef: ElpdCoefficients, n: int):
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if coef.k != n - 1:
        raise ValueError(f"coefficients must be built at k = n - 1 = {n - 1}, got k = {coef.k}")


def naive_variance(pe: PointwiseElpd | np.ndarray) -> VarianceEstimate:
    """n/(n-1) times the sum of squared deviations of the pointwise terms.

    This treats the LOO terms as independent and is biased by ``-n^2 cov_ij``.
    """
    values = pe.values if isinstance(pe, PointwiseElpd) else np.asarray(pe, dtype=np.float64)
    n = values.shape[-1]
    if n < 2:
        raise ValueError(f"need at least 2 pointwise values, got {n}")
    centred = values - np.mean(values, axis=-1, keepdims=True)
    value = n / (n - 1) * np.sum(centred * centred, axis=-1)
    return _estimate(value, "naive")


def n_form_coefficients(config: ModelConfig, n: int) -> tuple[float, float, float]:
    """a, b, c written directly in terms of n (equal to ``coefficients(config, n-1)``)."""
    sm, s0 = config.sigma_m_sq, config.sigma_0_sq
    a = -0.5 * (sm + (n - 1) * s0) / (sm * (sm + n * s0))
    b = (n - 1) * s0 / (sm * (sm + n * s0))
    c = -0.5 * (n - 1) ** 2 * s0 * s0 / (sm * (sm + (n - 1) * s0) * (sm + n * s0))
    return a, b, c


def fold_moments(coef: ElpdCoefficients, mp: MomentProducts, n: int) -> FoldMoments:
    """Var(elpd_i) and Cov(elpd_i, elpd_j), i != j, as linear forms in the products."""
    _check_k(coef, n)
    a, b, c = coef.a, coef.b, coef.c
    m = n - 1
    ms, s4, mm, m4 = mp.mu2_sigma2, mp.sigma4, mp.mu_mu3, mp.mu4_central

    var_i = (
        (4 * a * a + n / m * b * b + 4 / m * c * c + 4 * a * b + 4 / m * b * c) * ms
        + (-a * a + b * b / m + (2 * n - 5) / m**3 * c * c) * s4
        + (4 * a * a + 4 / m**2 * c * c + 2 * a * b + 2 / m**2 * b * c) * mm
        + (a * a + c * c / m**3) * m4
    )
    cov_ij = (
        (
            (3 * n - 4) / m**2 * b * b
            + 4 * (n - 2) / m**2 * c * c
            + 4 / m * a * b
            + 8 / m * a * c
            + 4 * (2 * n - 3) / m**2 * b * c
        )
        * ms
        + (
            b * b / m**2
            + (n - 2) * (2 * n - 7) / m**4 * c * c
            - 2 / m**2 * a * c
            + 4 * (n - 2) / m**3 * b * c
        )
        * s4
        + (
            4 * (n - 2) / m**3 * c * c
            + 2 / m * a * b
            + 4 * n / m**2 * a * c
            + (4 * n - 6) / m**3 * b * c
        )
        * mm
        + ((n - 2) / m**4 * c * c + 2 / m**2 * a * c) * m4
    )
    return FoldMoments(var_i=var_i, cov_ij=cov_ij)


def variance_linear_form(coef: ElpdCoefficients, mp: MomentProducts, n: int):
    """Var of the LOO-elpd sum as a bare value (works on arrays and symbols alike)."""
    _check_k(coef, n)
    a, b, c = coef.a, coef.b, coef.c
    m = n - 1
    s = a + b + c
    value = (
        4 * n * s * s * mp.mu2_sigma2
        + (
            -n * a * a
            + 2 * n / m * b * b
            + n * (2 * n - 3) * (n - 3) / m**3 * c * c
            - 2 * n / m * a * c
            + 4 * n * (n - 2) / m**2 * b * c
        )
        * mp.sigma4
        + 4 * n * s * (a * m + c) / m * mp.mu_mu3
        + (n * a * a + n / m**2 * c * c + 2 * n / m * a * c) * mp.mu4_central
    )
    return value


def total_variance(coef: ElpdCoefficients, mp: MomentProducts, n: int) -> VarianceEstimate:
    """Var of the LOO-elpd sum evaluated at the given moment products.

    With true products this is the analytic target; with estimated products
    it is the unbiased estimator.
    """
    value = variance_linear_form(coef, mp, n)
    return _estimate(value, "analytic" if mp.provenance == "true" else "unbiased")


def unbiased_variance(config: ModelConfig, y) -> VarianceEstimate:
    """Unbiased estimate of Var(elpd_loo) from the observations; n >= 4."""
    y = as_dataset(y, min_n=4)
    n = y.shape[-1]
    mp = estimate_moment_products(raw_moments(y))
    return total_variance(coefficients(config, n - 1), mp, n)


def expected_naive(coef: ElpdCoefficients, mp_true: MomentProducts, n: int) -> float:
    """Expectation of the naive estimator, ``n Var(elpd_i) - n Cov(elpd_i, elpd_j)``."""
    if mp_true.provenance != "true":
        raise ValueError("expected_naive needs true moment products")
    fm = fold_moments(coef, mp_true, n)
    return n * fm.var_i - n * fm.cov_ij
