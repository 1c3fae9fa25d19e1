"""Data-generating processes used in the calibration experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .moments import MomentProducts

Kind = Literal["normal", "skew_normal"]


@dataclass(frozen=True)
class DgpSpec:
    """A data-generating distribution.

    ``params`` is ``(mean, sd)`` for ``kind="normal"`` and
    ``(location, scale, shape)`` for ``kind="skew_normal"`` (Azzalini
    parameterisation: scale is omega, shape is alpha).  `seed`, when set,
    overrides the experiment seed for this DGP's streams.
    """

    kind: Kind
    params: tuple[float, ...]
    seed: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if not all(math.isfinite(p) for p in params):
            raise ValueError(f"non-finite DGP parameters {params}")
        if self.kind == "normal":
            if len(params) != 2:
                raise ValueError("normal DGP takes (mean, sd)")
            if params[1] <= 0:
                raise ValueError(f"sd must be positive, got {params[1]}")
        elif self.kind == "skew_normal":
            if len(params) != 3:
                raise ValueError("skew-normal DGP takes (location, scale, shape)")
            if params[1] <= 0:
                raise ValueError(f"scale must be positive, got {params[1]}")
        else:
            raise ValueError(f"unknown DGP kind {self.kind!r}")
        if not self.label:
            args = ", ".join(f"{p:g}" for p in params)
            object.__setattr__(self, "label", f"{self.kind}({args})")

    @classmethod
    def normal(cls, mean: float, spread: float, *, spread_is="sd", **kw) -> "DgpSpec":
        """Normal DGP.  ``spread_is="variance"`` reads `spread` as a variance."""
        if spread_is == "variance":
            spread = math.sqrt(spread)
        elif spread_is != "sd":
            raise ValueError(f"spread_is must be 'sd' or 'variance', got {spread_is!r}")
        return cls("normal", (mean, spread), **kw)

    @classmethod
    def skew_normal(cls, location: float, scale: float, shape: float, **kw) -> "DgpSpec":
        return cls("skew_normal", (location, scale, shape), **kw)


@dataclass(frozen=True)
class TrueMoments:
    """Mean, variance and third and fourth central moments of a distribution."""

    mu: float
    sigma_sq: float
    mu3: float
    mu4: float


def reference_dgps() -> list[DgpSpec]:
    """The three reference settings: well matched, under-dispersed, skewed."""
    return [
        DgpSpec.normal(0.0, 1.2),
        DgpSpec.normal(2.0, 0.1),
        DgpSpec.skew_normal(-2.0, 0.16, 10.0),
    ]


def _delta(shape: float) -> float:
    return shape / math.sqrt(1.0 + shape * shape)


def sample(spec: DgpSpec, size, rng: np.random.Generator) -> np.ndarray:
    """Draw independent observations; `size` is an int or a shape tuple."""
    if spec.kind == "normal":
        mean, sd = spec.params
        return mean + sd * rng.standard_normal(size)
    location, scale, shape = spec.params
    delta = _delta(shape)
    z0 = rng.standard_normal(size)
    z1 = rng.standard_normal(size)
    return location + scale * (delta * np.abs(z0) + math.sqrt(1.0 - delta * delta) * z1)


def true_moments(spec: DgpSpec) -> TrueMoments:
    if spec.kind == "normal":
        mean, sd = spec.params
        var = sd * sd
        return TrueMoments(mu=mean, sigma_sq=var, mu3=0.0, mu4=3.0 * var * var)
    location, scale, shape = spec.params
    m = math.sqrt(2.0 / math.pi) * _delta(shape)  # mean of the standard skew-normal
    m2 = m * m
    return TrueMoments(
        mu=location + scale * m,
        sigma_sq=scale**2 * (1.0 - m2),
        mu3=scale**3 * (4.0 - math.pi) / 2.0 * m2 * m,
        mu4=scale**4 * (3.0 * (1.0 - m2) ** 2 + 2.0 * (math.pi - 3.0) * m2 * m2),
    )


def true_products(tm: TrueMoments) -> MomentProducts:
    return MomentProducts(
        mu2_sigma2=tm.mu**2 * tm.sigma_sq,
        sigma4=tm.sigma_sq**2,
        mu_mu3=tm.mu * tm.mu3,
        mu4_central=tm.mu4,
        mu4_power=tm.mu**4,
        provenance="true",
    )
