"""Performance measures for many-server queues with scaled admission control.

Exact stationary quantities of the controlled birth-death chain, corrected
square-root-of-s asymptotic expansions in the quality-and-efficiency-driven
regime, diffusion limits, Monte Carlo validation, and inverse dimensioning.
"""

from .control import (
    ControlPolicy,
    SystemParams,
    admit_prob,
    buffer_global,
    const_local,
    custom_global,
    custom_local,
    drift_global,
    erlang_b_policy,
    erlang_c_policy,
    gaussian_global,
    global_to_local,
    iter_admit_probs,
    laplace,
    laplace_derivs,
    linear_local,
    local_to_global,
    parse_policy,
    power_local,
    psi_window,
    q_product,
    tabulated,
)
from .diffusion import DiffusionSpec, prob_positive, stationary_density
from .dimension import gamma_opt, gamma_star, optimality_gap
from .emsum import EmResult, em_second_formula_check, em_sum
from .erlang_a import fs_erlang_a_exact, fs_erlang_a_temme, fs_global_gaussian
from .errors import (
    DegenerateControl,
    DomainError,
    NonConvergence,
    NoRoot,
    QedCtrlError,
    QuadratureFailure,
    Unstable,
)
from .exact import (
    PerfMeasures,
    StabilityReport,
    StationaryDistribution,
    delay_prob,
    erlang_b,
    erlang_b_inv,
    erlang_c,
    f_series,
    is_stable,
    perf_measures,
    reject_prob,
    stationary_dist,
)
from .asymptotics import (
    QedExpansion,
    corrected_delay,
    corrected_reject,
    em_fs,
    expansion,
    fs_one_term,
    fs_corrected,
    h_a,
    h_a_sensitivity,
    h_a_sensitivity_ordered,
    jagerman_b,
)
from .sim import SimConfig, SimEstimate, SimResult, scaled_path, simulate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
