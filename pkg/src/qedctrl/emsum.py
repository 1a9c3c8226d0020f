"""Half-integer-sample Euler-Maclaurin summation with computable remainder bounds.

The engine approximates sums of the form sum_n g((n+1)/sqrt(s)) by
sqrt(s) * int_{1/(2 sqrt(s))}^inf g + g'(1/(2 sqrt(s)))/(24 sqrt(s)), and
certifies the remainder with 1/(12 sqrt(s)) * int |g''| (order 1) or
1/(384 s sqrt(s)) * int |g''''| (order 2).  Orders above 2 are not needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.integrate import quad

from .errors import DomainError, QuadratureFailure

# Bernoulli data for the half-sample formula: B_2 = 1/6, B_4 = -1/30,
# B_{2k}(1/2) = -(1 - 2^(1-2k)) B_{2k}.
B2 = 1.0 / 6.0
B4 = -1.0 / 30.0
B2_HALF = -1.0 / 12.0
B4_HALF = 7.0 / 240.0

_ORDER1_PREF = B2 / 2.0                          # 1/12
_ORDER2_PREF = 2.0 * (1.0 - 2.0**-4) * abs(B4) / 24.0   # 1/384


@dataclass(frozen=True)
class EmResult:
    approx: float
    remainder_bound: float
    order: int
    bound_inflated: bool = False


def _quad_tail(func: Callable[[float], float], lo: float) -> float:
    """Integrate func on [lo, inf) with tail truncation."""
    upper = max(1.0, 2.0 * lo)
    while abs(func(upper)) > 1e-18 and upper < 1e8:
        upper *= 2.0
    val, err = quad(func, lo, upper, epsabs=1e-13, epsrel=1e-11, limit=400)
    if err > 1e-8 * max(1.0, abs(val)):
        raise QuadratureFailure(f"quadrature error estimate {err} too large")
    return val


def em_sum(g_derivs: Sequence[Callable[[float], float]], s: float, order: int,
           bound_inflated: bool = False) -> EmResult:
    """Approximate sum_{n>=0} g((n+1)/sqrt(s)) with a certified remainder bound.

    g_derivs holds callables for g and its derivatives up to order 2*order
    (index j = j-th derivative).
    """
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    if len(g_derivs) < 2 * order + 1:
        raise DomainError("need derivatives of g up to order 2*order")
    sq = math.sqrt(s)
    x0 = 0.5 / sq
    g, g1 = g_derivs[0], g_derivs[1]
    approx = sq * _quad_tail(g, x0) + g1(x0) / (24.0 * sq)
    if order == 1:
        g2 = g_derivs[2]
        bound = _ORDER1_PREF / sq * _quad_tail(lambda x: abs(g2(x)), 0.0)
    else:
        g4 = g_derivs[4]
        bound = _ORDER2_PREF / (s * sq) * _quad_tail(lambda x: abs(g4(x)), 0.0)
    if bound_inflated:
        bound *= 1.1
    return EmResult(approx=approx, remainder_bound=bound, order=order,
                    bound_inflated=bound_inflated)


@dataclass(frozen=True)
class EmCheckReport:
    lhs: float
    rhs_without_remainder: float
    residual: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.residual <= self.bound * (1.0 + 1e-12) + 1e-14


def em_second_formula_check(h_derivs: Sequence[Callable[[float], float]], N: int,
                            m: int) -> EmCheckReport:
    """Self-test harness for the half-sample summation formula on [0, N+1].

    Evaluates sum_{n=0}^N h(n+1/2) against the integral plus boundary
    corrections, and the corresponding remainder bound.
    """
    if m not in (1, 2):
        raise DomainError("m must be 1 or 2")
    if N < 1:
        raise DomainError("N must be >= 1")
    if len(h_derivs) < 2 * m + 1:
        raise DomainError("need derivatives of h up to order 2m")
    h = h_derivs[0]
    lhs = sum(h(n + 0.5) for n in range(N + 1))
    integral, err = quad(h, 0.0, N + 1.0, epsabs=1e-13, epsrel=1e-11, limit=400)
    if err > 1e-8 * max(1.0, abs(integral)):
        raise QuadratureFailure(f"quadrature error estimate {err} too large")
    rhs = integral
    coeffs = {1: B2_HALF / 2.0, 2: B4_HALF / 24.0}
    for k in range(1, m + 1):
        hd = h_derivs[2 * k - 1]
        rhs += coeffs[k] * (hd(N + 1.0) - hd(0.0))
    h2m = h_derivs[2 * m]
    abs_int, _ = quad(lambda x: abs(h2m(x)), 0.0, N + 1.0, epsabs=1e-13,
                      epsrel=1e-11, limit=400)
    bound_pref = {1: B2 / 2.0, 2: abs(B4) / 24.0}[m]
    bound = bound_pref * abs_int
    return EmCheckReport(lhs=lhs, rhs_without_remainder=rhs,
                         residual=abs(lhs - rhs), bound=bound)
