"""Stationary density of the limiting diffusion and derived probabilities.

The limit process behaves like an OU process below zero (drift -gamma - x)
and a diffusion with drift -gamma - a(x) above zero, with variance 2.  Its
stationary density has normalizing constant 1/(L(gamma) + Phi(gamma)/phi(gamma))
and upper branch C * exp(-gamma x) f(x), using exp(-int_0^x a) = f(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .control import ControlPolicy
from .errors import DomainError
from .specfun import normal_cdf, normal_pdf


@dataclass(frozen=True)
class DiffusionSpec:
    policy: ControlPolicy
    gamma: float

    def __post_init__(self):
        if self.policy.profile is None:
            raise DomainError("diffusion limit needs a policy with a scaling profile")
        if not self.gamma > self.policy.gamma_min:
            raise DomainError(
                f"gamma={self.gamma} must exceed gamma_min={self.policy.gamma_min}"
            )

    def drift(self, x: float) -> float:
        if x < 0:
            return -self.gamma - x
        return -self.gamma - self.policy.profile.a(x)

    @property
    def variance(self) -> float:
        return 2.0

    @property
    def norm_const(self) -> float:
        L = self.policy.profile.laplace(self.gamma)
        return 1.0 / (L + normal_cdf(self.gamma) / normal_pdf(self.gamma))


def stationary_density(spec: DiffusionSpec, x: float) -> float:
    """Density omega(x) of the stationary law of the limit diffusion."""
    C = spec.norm_const
    gamma = spec.gamma
    if x < 0:
        return C * normal_pdf(x + gamma) / normal_pdf(gamma)
    return C * math.exp(-gamma * x) * spec.policy.profile.f(x)


def prob_positive(spec: DiffusionSpec) -> float:
    """Mass of the positive half-line: L / (L + Phi/phi).

    Coincides exactly with the leading delay coefficient T1."""
    L = spec.policy.profile.laplace(spec.gamma)
    ratio = normal_cdf(spec.gamma) / normal_pdf(spec.gamma)
    return L / (L + ratio)


def density_support(spec: DiffusionSpec) -> tuple[float, float]:
    """Interval outside which omega is below 1e-18 (for plotting/quadrature)."""
    gamma = spec.gamma
    lo = -gamma - 40.0
    hi = 1.0
    prof = spec.policy.profile
    while math.exp(-gamma * hi) * prof.f(hi) > 1e-18 and hi < 1e6:
        hi *= 2.0
    return lo, hi
