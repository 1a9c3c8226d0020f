"""Corrected QED expansions of F_s, B_s, D_s and D_s^R.

All expansions are driven by the Laplace transform of the policy's
scaling profile evaluated at the slack parameter gamma; the blocking
probability enters through its two-term Gaussian (Jagerman) expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .control import ControlPolicy, DriftProfile, SystemParams
from .emsum import EmResult, em_sum
from .errors import DegenerateControl, DomainError
from .specfun import normal_cdf, normal_pdf

_GAMMA_GUARD = 1e-9


def _require_gamma(policy: ControlPolicy, gamma: float) -> None:
    gm = policy.gamma_min
    if not gamma > gm + _GAMMA_GUARD:
        raise DomainError(f"gamma={gamma} must exceed gamma_min={gm} (guarded)")


def _is_erlang_c(policy: ControlPolicy) -> bool:
    prof = policy.profile
    return isinstance(prof, DriftProfile) and prof.p == 1.0


@dataclass(frozen=True)
class QedExpansion:
    """Coefficient bundle of the corrected approximations at a given gamma."""

    gamma: float
    L: float
    Lp: float
    Lpp: float
    M_coef: float
    N_coef: float
    g: float
    h: float
    T1: float
    T2: float
    T1R: float
    T2R: float
    average_sense: bool = False


def fs_one_term(policy: ControlPolicy, params: SystemParams) -> float:
    """One-term expansion F_s ~ sqrt(s) L(gamma_s) - 1/2."""
    _require_gamma(policy, params.gamma)
    if params.gamma > math.sqrt(params.s):
        raise DomainError("gamma must not exceed sqrt(s)")
    return math.sqrt(params.s) * policy.profile.laplace(params.gamma_s) - 0.5


def fs_corrected(policy: ControlPolicy, params: SystemParams, with_N: bool = False) -> float:
    """Two-term expansion sqrt(s) L + M, optionally refined by N/sqrt(s)."""
    _require_gamma(policy, params.gamma)
    if params.gamma > math.sqrt(params.s):
        raise DomainError("gamma must not exceed sqrt(s)")
    gamma = params.gamma
    prof = policy.profile
    L = prof.laplace(gamma)
    Lp = prof.laplace_d1(gamma)
    out = math.sqrt(params.s) * L + m_coef(gamma, Lp)
    if with_N:
        out += n_coef(gamma, Lp, prof.laplace_d2(gamma), prof.fprime0) / math.sqrt(params.s)
    return out


def m_coef(gamma: float, Lp: float) -> float:
    return 0.5 * gamma * gamma * Lp - 0.5


def n_coef(gamma: float, Lp: float, Lpp: float, fprime0: float) -> float:
    return (gamma**3 * Lp / 3.0 + gamma**4 * Lpp / 8.0 + (gamma - fprime0) / 12.0)


def jagerman_b(params: SystemParams):
    """Two-term Gaussian expansion of the blocking probability.

    Returns (g, h, approx) with g = phi(gamma)/Phi(gamma) and
    approx = g/sqrt(s) + h/s.
    """
    gamma = params.gamma
    g = normal_pdf(gamma) / normal_cdf(gamma)
    h = -(gamma * gamma + (gamma * gamma + 2.0) * g) * g / 3.0
    sq = math.sqrt(params.s)
    return g, h, g / sq + h / params.s


def expansion(policy: ControlPolicy, gamma: float) -> QedExpansion:
    """All s-independent coefficients of the corrected approximations."""
    _require_gamma(policy, gamma)
    prof = policy.profile
    L = prof.laplace(gamma)
    Lp = prof.laplace_d1(gamma)
    Lpp = prof.laplace_d2(gamma)
    M = m_coef(gamma, Lp)
    N = n_coef(gamma, Lp, Lpp, prof.fprime0)
    g = normal_pdf(gamma) / normal_cdf(gamma)
    h = -(gamma * gamma + (gamma * gamma + 2.0) * g) * g / 3.0
    gl = g * L
    T1 = gl / (1.0 + gl)
    T2 = ((h + g * g) * L + g * (M + 1.0)) / (1.0 + gl) ** 2
    if _is_erlang_c(policy):
        # f == 1: 1 - gamma L and gamma L + M vanish identically
        T1R = 0.0
        T2R = 0.0
    else:
        one_minus_gl = 1.0 - gamma * L
        if abs(one_minus_gl) < 1e-12:
            raise DegenerateControl(
                "1 - gamma L vanished for a non-trivial profile (numerical coincidence)"
            )
        T1R = one_minus_gl * g / (1.0 + gl)
        T2R = (one_minus_gl / (1.0 + gl)) * (
            h
            - gamma * g * (gamma * L + M) / one_minus_gl
            - g * (h * L + g * M) / (1.0 + gl)
        )
    return QedExpansion(gamma=gamma, L=L, Lp=Lp, Lpp=Lpp, M_coef=M, N_coef=N,
                        g=g, h=h, T1=T1, T2=T2, T1R=T1R, T2R=T2R,
                        average_sense=not prof.smooth)


def corrected_delay(policy: ControlPolicy, params: SystemParams):
    """Two-term delay approximation: returns (T1, T2, T1 + T2/sqrt(s))."""
    exp = expansion(policy, params.gamma)
    return exp.T1, exp.T2, exp.T1 + exp.T2 / math.sqrt(params.s)


def corrected_reject(policy: ControlPolicy, params: SystemParams):
    """Two-term rejection approximation: returns (T1R, T2R, T1R/sqrt(s) + T2R/s)."""
    exp = expansion(policy, params.gamma)
    return exp.T1R, exp.T2R, exp.T1R / math.sqrt(params.s) + exp.T2R / params.s


def em_fs(policy: ControlPolicy, params: SystemParams, order: int) -> EmResult:
    """Euler-Maclaurin evaluation of F_s with a certified remainder bound.

    Uses g(x) = exp(-gamma_s x) f(x) with analytic derivatives for the
    closed-form families; custom profiles fall back to finite differences
    with a 10% inflated bound.
    """
    _require_gamma(policy, params.gamma)
    prof = policy.profile
    gs = params.gamma_s
    derivs = prof.g_derivs(gs)
    if derivs is not None:
        return em_sum(derivs, params.s, order)
    if not prof.smooth:
        raise DomainError("EM summation needs a smooth scaling profile")
    derivs = _fd_derivs(lambda x: math.exp(-gs * x) * prof.f(x))
    return em_sum(derivs, params.s, order, bound_inflated=True)


def _fd_derivs(g, h: float = 1e-3):
    """Central finite-difference derivative stack for custom profiles."""

    def d(func):
        return lambda x: (func(x + h) - func(max(0.0, x - h))) / (x + h - max(0.0, x - h))

    g1 = d(g)
    g2 = d(g1)
    g3 = d(g2)
    g4 = d(g3)
    return [g, g1, g2, g3, g4]


def h_a(a: float, x: float, y: float) -> float:
    """The rational map (1 + a x) / (1/y + x) through which F and B enter
    the delay and rejection probabilities."""
    return (1.0 + a * x) / (1.0 / y + x)


def _check_h_a_domain(x: float, y: float, dx: float, dy: float) -> None:
    if x < 0 or x + dx < 0:
        raise DomainError("x and x+dx must be non-negative")
    if not (0.0 <= y <= 1.0 and 0.0 <= y + dy <= 1.0):
        raise DomainError("y and y+dy must lie in [0, 1]")


def h_a_sensitivity(a: float, x: float, y: float, dx: float, dy: float) -> float:
    """First-order sensitivity bound |y(a-y)||dx| + |1+ax||dy| with both
    coefficients taken at the base point (x, y).

    This symmetric form can undershoot the true difference when dy moves y
    through a region where |y(a-y)| is larger than at the base point; see
    h_a_sensitivity_ordered for a bound that is valid for all perturbations.
    """
    _check_h_a_domain(x, y, dx, dy)
    return abs(y * (a - y)) * abs(dx) + abs(1.0 + a * x) * abs(dy)


def h_a_sensitivity_ordered(a: float, x: float, y: float, dx: float, dy: float) -> float:
    """Rigorous bound on |H_a(x+dx, y+dy) - H_a(x, y)|.

    Moves y first at fixed x (coefficient |1+ax| dominates dH/dy for all
    y in [0,1]), then x at fixed y+dy (coefficient |y'(a-y')| dominates
    dH/dx for all x >= 0), so each coefficient bounds the gradient along
    its whole sub-path.
    """
    _check_h_a_domain(x, y, dx, dy)
    y2 = y + dy
    return abs(y2 * (a - y2)) * abs(dx) + abs(1.0 + a * x) * abs(dy)
