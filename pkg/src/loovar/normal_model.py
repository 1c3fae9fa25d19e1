"""Conjugate normal model with fixed data variance and a zero-mean normal prior.

Model::

    y_i | theta ~ N(theta, sigma_m_sq)
    theta       ~ N(0, sigma_0_sq)

After conditioning on k observations with mean ybar, the posterior predictive
is N(tau * k / sigma_m_sq * ybar, sigma_m_sq + tau) with
tau = (1 / sigma_0_sq + k / sigma_m_sq)^-1.  Its log density is a quadratic
form ``a*yt**2 + b*yt*ybar + c*ybar**2 + d`` whose coefficients depend only
on k, which gives the leave-one-out elpd terms in closed form.

Functions accept a single dataset of shape ``(n,)`` or a batch of datasets of
shape ``(..., n)``; observations always run along the last axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ModelConfig:
    """Fixed hyperparameters of the model: data variance and prior variance."""

    sigma_m_sq: float
    sigma_0_sq: float

    def __post_init__(self):
        for name in ("sigma_m_sq", "sigma_0_sq"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "sigma_m_sq", float(self.sigma_m_sq))
        object.__setattr__(self, "sigma_0_sq", float(self.sigma_0_sq))


@dataclass(frozen=True)
class ElpdCoefficients:
    """Quadratic-form coefficients of the log predictive density after k observations."""

    k: int
    a: float
    b: float
    c: float
    d: float
    tau: float
    sigma_pp_sq: float
    # factor mapping the conditioning mean to the predictive mean
    mean_factor: float


@dataclass(frozen=True)
class PointwiseElpd:
    """Leave-one-out log predictive densities and their sum.

    For batched input ``values`` has shape ``(..., n)`` and ``sum`` shape ``(...)``.
    """

    values: np.ndarray
    sum: np.ndarray | float

    @property
    def n(self) -> int:
        return self.values.shape[-1]


def as_dataset(y, min_n: int = 1) -> np.ndarray:
    """Validate observations and return them as a float64 array.

    Raises ``ValueError`` when there are fewer than `min_n` observations along the
    last axis or when any value is not finite.
    """
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim == 0:
        raise ValueError("dataset must be at least one-dimensional")
    n = arr.shape[-1]
    if n < min_n:
        raise ValueError(f"need at least {min_n} observations, got {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("dataset contains non-finite values")
    return arr


def coefficients(config: ModelConfig, k: int) -> ElpdCoefficients:
    """Coefficients of the posterior predictive log density conditional on k points.

    a, b, c and d use the simplified rational forms; tau and sigma_pp_sq come
    from the posterior update.  See `coefficients_from_predictive` for the
    other route, which must agree.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"conditioning-set size must be an integer >= 1, got {k!r}")
    k = int(k)
    sm, s0 = config.sigma_m_sq, config.sigma_0_sq
    denom_k = sm + k * s0
    denom_k1 = sm + (k + 1) * s0

    a = -0.5 * denom_k / (sm * denom_k1)
    b = k * s0 / (sm * denom_k1)
    c = -0.5 * k * k * s0 * s0 / (sm * denom_k * denom_k1)
    d = -0.5 * math.log(2.0 * math.pi * sm * denom_k1 / denom_k)

    tau = 1.0 / (1.0 / s0 + k / sm)
    return ElpdCoefficients(
        k=k,
        a=a,
        b=b,
        c=c,
        d=d,
        tau=tau,
        sigma_pp_sq=sm + tau,
        mean_factor=tau * k / sm,
    )


def coefficients_from_predictive(config: ModelConfig, k: int) -> ElpdCoefficients:
    """Same coefficients, expanded from the predictive mean and variance directly."""
    if int(k) != k or k < 1:
        raise ValueError(f"conditioning-set size must be an integer >= 1, got {k!r}")
    k = int(k)
    sm = config.sigma_m_sq
    tau = 1.0 / (1.0 / config.sigma_0_sq + k / sm)
    spp = sm + tau
    return ElpdCoefficients(
        k=k,
        a=-1.0 / (2.0 * spp),
        b=tau * k / (sm * spp),
        c=-(tau**2) * k * k / (2.0 * sm * sm * spp),
        d=-0.5 * (LOG_2PI + math.log(spp)),
        tau=tau,
        sigma_pp_sq=spp,
        mean_factor=tau * k / sm,
    )


def log_predictive_density(coef: ElpdCoefficients, y_tilde, y_bar):
    """Log posterior predictive density at `y_tilde` given a conditioning mean `y_bar`."""
    y_tilde = np.asarray(y_tilde, dtype=np.float64)
    y_bar = np.asarray(y_bar, dtype=np.float64)
    out = coef.a * y_tilde**2 + coef.b * y_tilde * y_bar + coef.c * y_bar**2 + coef.d
    return out[()] if out.ndim == 0 else out


def loo_means(y, exact: bool = False) -> np.ndarray:
    """Leave-one-out means along the last axis.

    The default uses ``(n*ybar - y_i) / (n-1)`` in O(n); ``exact=True``
    re-sums the remaining n-1 values for every i and is meant for testing.
    """
    y = as_dataset(y, min_n=2)
    n = y.shape[-1]
    if not exact:
        total = np.sum(y, axis=-1, keepdims=True)
        return (total - y) / (n - 1)
    out = np.empty_like(y)
    for i in range(n):
        rest = np.delete(y, i, axis=-1)
        out[..., i] = np.sum(rest, axis=-1) / (n - 1)
    return out


def loo_pointwise_elpd(config: ModelConfig, y, exact: bool = False) -> PointwiseElpd:
    """Closed-form leave-one-out elpd terms ``log p(y_i | y_{-i})``.

    Parameters
    ----------
    config : ModelConfig
        Model hyperparameters.
    y : array_like, shape (..., n)
        Observations, n >= 2.
    exact : bool
        Recompute each leave-one-out mean from scratch instead of by subtraction.

    Returns
    -------
    PointwiseElpd
    """
    y = as_dataset(y, min_n=2)
    n = y.shape[-1]
    coef = coefficients(config, n - 1)
    ybar_loo = loo_means(y, exact=exact)
    values = coef.a * y**2 + coef.b * y * ybar_loo + coef.c * ybar_loo**2 + coef.d
    total = np.sum(values, axis=-1)
    return PointwiseElpd(values=values, sum=total[()] if total.ndim == 0 else total)
