"""Inverse dimensioning: square-root staffing and the optimality gap.

gamma_star inverts the limiting delay constraint T1(gamma) = eps;
gamma_opt inverts the exact finite-s delay probability.  Monotonicity of
the objective is verified on the bracket before bisecting rather than
assumed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .asymptotics import expansion
from .control import ControlPolicy, SystemParams
from .errors import NoRoot
from .exact import delay_prob


def _bracket(policy: ControlPolicy, func, eps: float, hi_cap: float = math.inf):
    """Find [lo, hi] with func(lo) > eps > func(hi); func decreasing in gamma."""
    gm = policy.gamma_min
    lo = (gm + 1e-6) if math.isfinite(gm) else -2.0
    hi = min(20.0, hi_cap)
    for _ in range(60):
        try:
            if func(lo) > eps:
                break
        except Exception:
            pass
        if math.isfinite(gm):
            lo = gm + (lo - gm) / 2.0
        else:
            lo -= 2.0
    else:
        raise NoRoot(f"eps={eps} is above the attainable delay range")
    for _ in range(20):
        if func(hi) < eps:
            break
        if hi >= hi_cap:
            raise NoRoot(f"eps={eps} is below the attainable delay range")
        hi = min(hi * 1.5, hi_cap)
    else:
        raise NoRoot(f"eps={eps} is below the attainable delay range")
    return lo, hi


def _check_decreasing(func, lo, hi, n=9):
    xs = np.linspace(lo, hi, n)
    ys = [func(x) for x in xs]
    if any(b > a + 1e-9 for a, b in zip(ys, ys[1:])):
        raise NoRoot("objective is not decreasing on the bracket")


def gamma_star(policy: ControlPolicy, epsilon: float, corrected_s: float | None = None) -> float:
    """Solve T1(gamma) = epsilon (square-root staffing).

    With corrected_s set, solves T1 + T2/sqrt(s) = epsilon instead, i.e.
    staffing from the corrected two-term approximation."""
    if not 0.0 < epsilon < 1.0:
        raise NoRoot("epsilon must lie in (0, 1)")

    def t1(g: float) -> float:
        exp = expansion(policy, g)
        if corrected_s is None:
            return exp.T1
        return exp.T1 + exp.T2 / math.sqrt(corrected_s)

    lo, hi = _bracket(policy, t1, epsilon)
    _check_decreasing(t1, lo, hi)
    return float(brentq(lambda g: t1(g) - epsilon, lo, hi, xtol=1e-10))


def gamma_opt(policy: ControlPolicy, s: int, epsilon: float) -> float:
    """Solve the exact delay constraint D_s(rho(gamma)) = epsilon for gamma."""
    if not 0.0 < epsilon < 1.0:
        raise NoRoot("epsilon must lie in (0, 1)")

    def ds(g: float) -> float:
        return delay_prob(policy, SystemParams(s=s, gamma=g))

    lo, hi = _bracket(policy, ds, epsilon, hi_cap=0.999 * math.sqrt(s))
    _check_decreasing(ds, lo, hi)
    return float(brentq(lambda g: ds(g) - epsilon, lo, hi, xtol=1e-12))


def optimality_gap(policy: ControlPolicy, s: int, epsilon: float) -> dict:
    """gamma*, gamma_opt and their difference for one dimensioning instance."""
    gs = gamma_star(policy, epsilon)
    go = gamma_opt(policy, s, epsilon)
    return {"gamma_star": gs, "gamma_opt": go, "gap": abs(go - gs)}
