"""Exact stationary quantities of the controlled birth-death chain.

All factorial-like products are handled in log space; the normalizing
series F_s is truncated with a certified geometric tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .control import (
    GLOBAL,
    LOCAL,
    TABULATED,
    ControlPolicy,
    SystemParams,
    iter_admit_probs,
)
from .errors import DomainError, NonConvergence, Unstable

DEFAULT_TOL = 1e-12
_SERIES_CAP = 10**8
_LOOKAHEAD = 64


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    rho: float
    rho_limit: float
    note: str = ""

    def __bool__(self) -> bool:
        return self.stable


@dataclass(frozen=True)
class StationaryDistribution:
    probs: np.ndarray
    tail_mass_bound: float
    params: SystemParams


@dataclass(frozen=True)
class PerfMeasures:
    delay: float
    reject: float
    f_series: float
    erlang_b: float


def _constant_admit_prob(policy: ControlPolicy, s: int) -> float | None:
    """The common admission probability if it is state-independent, else None."""
    if policy.mode == LOCAL:
        prof = policy.profile
        sq = math.sqrt(s)
        if prof.a(0.5 / sq) == prof.a(0.0) and prof.a(100.0) == prof.a(0.0):
            return 1.0 / (1.0 + prof.a(0.0) / sq)
    elif policy.mode == TABULATED and not policy.table:
        return policy.table_extend
    return None


def is_stable(policy: ControlPolicy, params: SystemParams) -> StabilityReport:
    """Existence test for the stationary distribution."""
    rho = params.rho
    if policy.mode == GLOBAL:
        limit = math.exp(-policy.gamma_min / math.sqrt(params.s))
        return StabilityReport(stable=0.0 <= rho < limit, rho=rho, rho_limit=limit)
    if policy.mode == LOCAL:
        limit = 1.0 - policy.gamma_min / math.sqrt(params.s)
        return StabilityReport(stable=0.0 <= rho < limit, rho=rho, rho_limit=limit)
    # tabulated: tail terms behave like (extend * rho)^n, so the series
    # converges iff rho < 1/extend -- unless some entry is 0, which makes
    # the series a finite sum
    table = policy.table
    if any(p == 0.0 for p in table):
        return StabilityReport(stable=rho >= 0.0, rho=rho, rho_limit=math.inf,
                               note="finite series: a table entry is zero")
    p_inf = policy.table_extend
    limit = math.inf if p_inf == 0.0 else 1.0 / p_inf
    return StabilityReport(stable=0.0 <= rho < limit, rho=rho, rho_limit=limit)


def f_series(policy: ControlPolicy, params: SystemParams, tol: float = DEFAULT_TOL) -> float:
    """F_s(rho) = sum_n q_s(n) rho^(n+1), truncated once a geometric tail
    bound certifies absolute error below tol."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    report = is_stable(policy, params)
    if not report.stable:
        raise Unstable(f"rho={report.rho} is outside [0, {report.rho_limit})")
    rho = params.rho
    if rho == 0.0:
        return 0.0

    # constant admission probability: the series is geometric, sum it exactly
    p_const = _constant_admit_prob(policy, params.s)
    if p_const is not None:
        x = p_const * rho
        return 0.0 if x == 0.0 else x / (1.0 - x)

    probs = iter_admit_probs(policy, params.s)
    total = 0.0
    term = 1.0  # running q_s(n) * rho^(n+1), multiplied by p * rho each step
    pending = []
    n = 0
    while n < _SERIES_CAP:
        # extend lookahead buffer of admission probabilities
        while len(pending) < _LOOKAHEAD:
            pending.append(next(probs))
        p = pending.pop(0)
        term *= p * rho
        total += term
        if term == 0.0:
            return total
        # certified geometric bound: future ratios never exceed rho * max
        # admission probability over the lookahead window
        rho_bar = rho * max(pending) if pending else rho
        if rho_bar < 1.0 and term * rho_bar / (1.0 - rho_bar) < tol:
            return total
        n += 1
    raise NonConvergence("f_series exceeded the term cap")


def erlang_b(params: SystemParams) -> float:
    """Erlang B via the standard stable recurrence on the blocking probability."""
    s, rho = params.s, params.rho
    if rho < 0:
        raise DomainError("rho must be non-negative")
    a = s * rho
    b = 1.0
    for k in range(1, s + 1):
        b = a * b / (k + a * b)
    return b


def erlang_b_inv(params: SystemParams) -> float:
    """1 / Erlang B via the inverse recurrence, robust where B underflows.

    Overflows to inf for very light traffic, which downstream ratios handle.
    """
    s, rho = params.s, params.rho
    if rho < 0:
        raise DomainError("rho must be non-negative")
    a = float(s * rho)
    if a == 0.0:
        return math.inf
    inv = 1.0
    for k in range(1, s + 1):
        if inv > 1e300:
            return math.inf
        inv = 1.0 + (k / a) * inv
    return inv


def erlang_c(params: SystemParams) -> float:
    """Erlang C from the blocking probability: C = B / (1 - rho (1 - B))."""
    rho = params.rho
    if rho >= 1.0:
        raise DomainError("Erlang C requires rho < 1")
    if rho < 0:
        raise DomainError("rho must be non-negative")
    b = erlang_b(params)
    return b / (1.0 - rho * (1.0 - b))


def delay_prob(policy: ControlPolicy, params: SystemParams, tol: float = DEFAULT_TOL) -> float:
    """P(arrival finds all servers busy): D = (1 + F) / (1/B + F)."""
    f = f_series(policy, params, tol)
    return (1.0 + f) / (erlang_b_inv(params) + f)


def reject_prob(policy: ControlPolicy, params: SystemParams, tol: float = DEFAULT_TOL) -> float:
    """P(arrival is rejected) = (1 + (1 - 1/rho) F) / (1/B + F)."""
    if params.rho == 0.0:
        raise DomainError("reject_prob requires rho > 0")
    f = f_series(policy, params, tol)
    return (1.0 + (1.0 - 1.0 / params.rho) * f) / (erlang_b_inv(params) + f)


def perf_measures(policy: ControlPolicy, params: SystemParams, tol: float = DEFAULT_TOL) -> PerfMeasures:
    f = f_series(policy, params, tol)
    inv_b = erlang_b_inv(params)
    delay = (1.0 + f) / (inv_b + f)
    if params.rho > 0.0:
        reject = (1.0 + (1.0 - 1.0 / params.rho) * f) / (inv_b + f)
    else:
        reject = 0.0
    return PerfMeasures(delay=delay, reject=reject, f_series=f, erlang_b=erlang_b(params))


def stationary_dist(policy: ControlPolicy, params: SystemParams, tol: float = DEFAULT_TOL) -> StationaryDistribution:
    """pi_k computed in log space, truncated where the tail bound drops below tol."""
    report = is_stable(policy, params)
    if not report.stable:
        raise Unstable(f"rho={report.rho} is outside [0, {report.rho_limit})")
    s, rho = params.s, params.rho
    log_rho = -math.inf if rho == 0.0 else math.log(rho)
    a = s * rho

    # below-s weights: (s rho)^k / k!
    ks = np.arange(s + 1)
    log_w = ks * (math.log(a) if a > 0 else -math.inf) - gammaln(ks + 1)
    log_w[0] = 0.0
    log_terms = list(log_w)

    # queue states: w_s * rho^(k-s) * q_s(k-s-1)
    probs = iter_admit_probs(policy, s)
    log_q = 0.0
    log_top = log_w[-1]
    n = 0
    while n < _SERIES_CAP:
        p = next(probs)
        if p == 0.0 or rho == 0.0:
            break
        log_q += math.log(p)
        log_term = log_top + (n + 1) * log_rho + log_q
        log_terms.append(log_term)
        # geometric tail bound with current ratio p * rho (ratios are
        # non-increasing for non-decreasing local rates)
        ratio = p * rho
        if ratio < 1.0:
            tail = math.exp(log_term) * ratio / (1.0 - ratio)
            if tail < tol * math.exp(log_top):
                break
        n += 1
    else:
        raise NonConvergence("stationary_dist exceeded the term cap")

    log_terms = np.asarray(log_terms)
    log_norm = logsumexp(log_terms)
    probs_arr = np.exp(log_terms - log_norm)
    tail_bound = max(0.0, 1.0 - float(probs_arr.sum()))
    return StationaryDistribution(probs=probs_arr, tail_mass_bound=max(tail_bound, 2 * tol),
                                  params=params)
