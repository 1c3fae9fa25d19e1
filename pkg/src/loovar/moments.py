"""Sample raw moments and unbiased estimators of moment products.

For i.i.d.-style data (independent, common first four moments) the
estimators below are exactly unbiased for

    mu^2 sigma^2,  sigma^4,  mu mu_3,  mu_4  and  mu^4

using only the raw sample moments alpha_k = mean(y**k) and the average of
products over distinct 4-subsets.  No centering is applied: the formulas are
written in raw moments and their targets depend on the location.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .normal_model import as_dataset

Provenance = Literal["estimated", "true"]


@dataclass(frozen=True)
class RawMoments:
    """Raw sample moments alpha_1..alpha_4 plus the unbiased estimate of mu^4."""

    n: int
    alpha1: np.ndarray | float
    alpha2: np.ndarray | float
    alpha3: np.ndarray | float
    alpha4: np.ndarray | float
    mu4_power: np.ndarray | float


@dataclass(frozen=True)
class MomentProducts:
    """The moment products that the variance of the LOO-elpd sum is linear in.

    ``provenance`` is ``"true"`` for population values and ``"estimated"`` for
    sample estimates.  Estimates of non-negative quantities can be negative.
    """

    mu2_sigma2: np.ndarray | float
    sigma4: np.ndarray | float
    mu_mu3: np.ndarray | float
    mu4_central: np.ndarray | float
    mu4_power: np.ndarray | float
    provenance: Provenance = "estimated"

    def __post_init__(self):
        if self.provenance not in ("estimated", "true"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "true":
            if np.any(np.asarray(self.sigma4) < 0) or np.any(np.asarray(self.mu2_sigma2) < 0):
                raise ValueError("true sigma^4 and mu^2 sigma^2 must be non-negative")
            # kurtosis >= 1; a little slack for rounding in the inputs
            slack = 1e-12 * np.abs(self.sigma4)
            if np.any(np.asarray(self.mu4_central) < np.asarray(self.sigma4) - slack):
                raise ValueError("true fourth central moment must be >= sigma^4")

    @property
    def negative_sigma4(self):
        """Diagnostic flag: the sigma^4 estimate came out negative."""
        return np.asarray(self.sigma4) < 0


def power_sums(y, dtype=np.longdouble):
    """Power sums ``sum(y**k)`` for k = 1..4 along the last axis, in `dtype`."""
    y = np.asarray(y, dtype=dtype)
    y2 = y * y
    return (
        np.sum(y, axis=-1),
        np.sum(y2, axis=-1),
        np.sum(y2 * y, axis=-1),
        np.sum(y2 * y2, axis=-1),
    )


def elementary_symmetric_4(y):
    """Degree-4 elementary symmetric polynomial of the data along the last axis.

    Uses Newton's identities on the power sums.  The identities cancel heavily
    when one observation dominates, so the power sums and the recurrence are
    carried in extended precision (``numpy.longdouble``) and the result is
    rounded to float64.
    """
    p1, p2, p3, p4 = power_sums(y)
    e1 = p1
    e2 = (e1 * p1 - p2) / 2
    e3 = (e2 * p1 - e1 * p2 + p3) / 3
    e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4
    return np.asarray(e4, dtype=np.float64)[()]


def mu4_power_enumerated(y) -> float:
    """Average of ``y_i y_j y_h y_k`` over all 4-subsets by direct enumeration.

    O(n^4); a reference for `elementary_symmetric_4`, not for production use.
    """
    y = [float(v) for v in np.asarray(y, dtype=np.float64).ravel()]
    n = len(y)
    if n < 4:
        raise ValueError(f"need at least 4 observations, got {n}")
    total = math.fsum(math.prod(c) for c in itertools.combinations(y, 4))
    return total / math.comb(n, 4)


def raw_moments(y) -> RawMoments:
    """Raw sample moments and the unbiased mu^4 estimate; n >= 4 required."""
    y = as_dataset(y, min_n=4)
    n = y.shape[-1]
    p1, p2, p3, p4 = (np.asarray(p, dtype=np.float64)[()] for p in power_sums(y))
    return RawMoments(
        n=n,
        alpha1=p1 / n,
        alpha2=p2 / n,
        alpha3=p3 / n,
        alpha4=p4 / n,
        mu4_power=elementary_symmetric_4(y) / math.comb(n, 4),
    )


def auxiliary_t(rm: RawMoments):
    """Estimator with expectation ``mu_4 + 3 sigma^4``."""
    n = rm.n
    a1, a2, a3, a4 = rm.alpha1, rm.alpha2, rm.alpha3, rm.alpha4
    return n / (n - 1) * (a4 - 4 * a3 * a1 + 3 * a2 * a2)


def estimate_moment_products(rm: RawMoments) -> MomentProducts:
    """Unbiased estimates of mu^2 sigma^2, sigma^4, mu mu_3, mu_4 (and mu^4)."""
    n = rm.n
    if n < 4:
        raise ValueError(f"need at least 4 observations, got {n}")
    a1, a2, a3, a4 = rm.alpha1, rm.alpha2, rm.alpha3, rm.alpha4
    a1_sq = a1 * a1
    a1_4 = a1_sq * a1_sq
    a2_sq = a2 * a2
    a2a1_sq = a2 * a1_sq
    a3a1 = a3 * a1
    q = (n - 3) * (n - 2) * (n - 1)
    n2, n3 = n * n, n**3

    mu2_sigma2 = (
        -n3 * a1_4
        + 2 * n3 * a2a1_sq
        - 4 * (n - 1) * n * a3a1
        - (2 * n2 - 3 * n) * a2_sq
        + 2 * (2 * n - 3) * a4
    ) / (2 * q) - rm.mu4_power / 2

    sigma4 = (
        n3 * a1_4
        - 2 * n3 * a2a1_sq
        + (n3 - 3 * n2 + 3 * n) * a2_sq
        + 4 * n * (n - 1) * a3a1
        + n * (1 - n) * a4
    ) / q

    mu_mu3 = (
        -2 * (n2 + n - 3) * a4
        - 6 * n3 * a2a1_sq
        + n * (6 * n - 9) * a2_sq
        + 3 * n3 * a1_4
        + 2 * n2 * (n + 1) * a3a1
    ) / (2 * q) + rm.mu4_power / 2

    mu4_central = (
        -3 * n**4 * a1_4
        + 6 * n**4 * a2a1_sq
        + (9 - 6 * n) * n2 * a2_sq
        + (-12 + 8 * n - 4 * n2) * n2 * a3a1
        + (3 * n - 2 * n2 + n3) * n * a4
    ) / (q * n)

    return MomentProducts(
        mu2_sigma2=mu2_sigma2,
        sigma4=sigma4,
        mu_mu3=mu_mu3,
        mu4_central=mu4_central,
        mu4_power=rm.mu4_power,
        provenance="estimated",
    )
