"""Monte Carlo validation: next-event CTMC simulation of the controlled chain.

The inner loop is a numba kernel operating on a precomputed table of
per-state admission probabilities.  Replications use independent seeds
spawned from one root SeedSequence, so estimates are reproducible and
independent of worker scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import stats

from .control import ControlPolicy, SystemParams, iter_admit_probs
from .exact import is_stable

_DEFAULT_PTABLE = 4096


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    policy: ControlPolicy
    horizon: float
    warmup: float = -1.0  # <0 means the default 10*s
    replications: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        wu = self.effective_warmup
        if not self.horizon > wu >= 0.0:
            raise ValueError("need horizon > warmup >= 0")

    @property
    def effective_warmup(self) -> float:
        return 10.0 * self.params.s if self.warmup < 0 else self.warmup


@dataclass(frozen=True)
class SimEstimate:
    point: float
    half_width_95: float
    replications_used: int


@dataclass(frozen=True)
class SimResult:
    delay: SimEstimate
    reject: SimEstimate
    hist: np.ndarray  # empirical stationary distribution over states 0..K
    config: SimConfig
    stable: bool


@njit(cache=True, nogil=True)
def _ctmc_kernel(seed, lam, s, p_table, horizon, warmup, hist, k0):
    np.random.seed(seed)
    t = 0.0
    k = k0
    arrivals = 0
    busy = 0
    rejected = 0
    n_states = hist.shape[0]
    while t < horizon:
        rate = lam + min(k, s)
        dt = np.random.exponential(1.0 / rate)
        t_next = t + dt
        # time-weighted occupancy after warmup
        seg = min(t_next, horizon) - max(t, warmup)
        if seg > 0.0:
            idx = k if k < n_states else n_states - 1
            hist[idx] += seg
        if t_next >= horizon:
            break
        t = t_next
        if np.random.random() * rate < lam:
            counted = t >= warmup
            if counted:
                arrivals += 1
            if k < s:
                k += 1
            else:
                if counted:
                    busy += 1
                q = k - s
                p = p_table[q] if q < p_table.shape[0] else p_table[p_table.shape[0] - 1]
                if np.random.random() < p:
                    k += 1
                elif counted:
                    rejected += 1
        else:
            k -= 1
    return arrivals, busy, rejected


@njit(cache=True, nogil=True)
def _path_kernel(seed, lam, s, p_table, horizon, sample_dt, out, k0):
    np.random.seed(seed)
    t = 0.0
    k = k0
    n = out.shape[0]
    i = 0
    while i < n:
        rate = lam + min(k, s)
        dt = np.random.exponential(1.0 / rate)
        t_next = t + dt
        while i < n and i * sample_dt < t_next:
            out[i] = k
            i += 1
        t = t_next
        if np.random.random() * rate < lam:
            if k < s:
                k += 1
            else:
                q = k - s
                p = p_table[q] if q < p_table.shape[0] else p_table[p_table.shape[0] - 1]
                if np.random.random() < p:
                    k += 1
        else:
            k -= 1


def _p_table(policy: ControlPolicy, s: int, size: int = _DEFAULT_PTABLE) -> np.ndarray:
    it = iter_admit_probs(policy, s)
    return np.array([next(it) for _ in range(size)], dtype=np.float64)


def _t_interval(values: np.ndarray) -> SimEstimate:
    n = len(values)
    point = float(np.mean(values))
    if n < 2:
        return SimEstimate(point=point, half_width_95=math.inf, replications_used=n)
    se = float(np.std(values, ddof=1)) / math.sqrt(n)
    hw = float(stats.t.ppf(0.975, n - 1)) * se
    return SimEstimate(point=point, half_width_95=hw, replications_used=n)


def simulate(config: SimConfig) -> SimResult:
    """Run replications of the controlled birth-death chain.

    Delay is estimated by PASTA (fraction of post-warmup arrival epochs
    finding all servers busy), rejection by the fraction of arrivals
    refused.  Unstable configurations are simulated anyway (the histogram
    then just tracks the divergence) but flagged.
    """
    params, policy = config.params, config.policy
    s = params.s
    report = is_stable(policy, params)
    n_states = 2 * s + int(40 * math.sqrt(s)) + 64
    p_table = _p_table(policy, s)
    seeds = np.random.SeedSequence(config.seed).generate_state(config.replications)
    warmup = config.effective_warmup

    hists = [np.zeros(n_states) for _ in range(config.replications)]

    def run(i):
        return _ctmc_kernel(np.int64(seeds[i]), params.lam, s, p_table,
                            config.horizon, warmup, hists[i], s)

    workers = max(1, int(os.environ.get("QEDCTRL_THREADS", "1")))
    if workers > 1 and config.replications > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(config.replications)))
    else:
        counts = [run(i) for i in range(config.replications)]

    delay = np.array([busy / arr if arr else 0.0 for arr, busy, _ in counts])
    reject = np.array([rej / arr if arr else 0.0 for arr, _, rej in counts])
    hist = np.sum(hists, axis=0)
    total = hist.sum()
    if total > 0:
        hist = hist / total
    return SimResult(delay=_t_interval(delay), reject=_t_interval(reject),
                     hist=hist, config=config, stable=report.stable)


def scaled_path(config: SimConfig, sample_dt: float) -> np.ndarray:
    """Sampled path of X_s(t) = (Q_s(t) - s)/sqrt(s) at multiples of sample_dt.

    Returns an array of (t, x) rows; the chain starts at Q = s (X = 0)."""
    if sample_dt <= 0:
        raise ValueError("sample_dt must be positive")
    params = config.params
    n = int(config.horizon / sample_dt) + 1
    out = np.empty(n, dtype=np.int64)
    p_table = _p_table(config.policy, params.s)
    seed = np.random.SeedSequence(config.seed).generate_state(1)[0]
    _path_kernel(np.int64(seed), params.lam, params.s, p_table,
                 config.horizon, sample_dt, out, params.s)
    t = np.arange(n) * sample_dt
    x = (out - params.s) / math.sqrt(params.s)
    return np.column_stack([t, x])
