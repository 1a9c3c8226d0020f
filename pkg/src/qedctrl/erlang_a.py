"""Closed-form exact and asymptotic F_s for Erlang A (linear local) control.

The local chain with admission probability 1/(1 + (k+1) theta / s) is the
classical M/M/s+M system; its normalizing series collapses to a Kummer
function, and a two-term Temme expansion of that function yields the
asymptotic form.
"""

import math

from .control import SystemParams
from .errors import DomainError
from .specfun import kummer_m_1, mills_ratio


def fs_erlang_a_exact(theta: float, params: SystemParams) -> float:
    """F_s(rho) = (M(1, s/theta, s rho/theta) - 1 - rho) / rho."""
    if theta <= 0:
        raise DomainError("theta must be > 0")
    rho = params.rho
    if rho <= 0:
        raise DomainError("rho must be > 0")
    s = params.s
    return (kummer_m_1(s / theta, s * rho / theta) - 1.0 - rho) / rho


def fs_erlang_a_temme(theta: float, params: SystemParams) -> float:
    """Two-term Temme expansion of the Kummer form of F_s."""
    if theta <= 0:
        raise DomainError("theta must be > 0")
    gamma = params.gamma
    chi = mills_ratio(gamma / math.sqrt(2.0 * theta))
    return (
        math.sqrt(2.0 / theta) * chi * math.sqrt(params.s)
        + gamma**3 * math.sqrt(2.0) / (3.0 * theta**1.5) * chi
        - gamma**2 / (3.0 * theta)
        - 2.0 / 3.0
    )


def fs_global_gaussian(theta: float, params: SystemParams) -> float:
    """Two-term expansion of F_s for the Gaussian *global* profile
    f(x) = exp(-theta x^2 / 2); shares the sqrt(s) coefficient with the
    local Temme expansion but differs in the O(1) terms."""
    if theta <= 0:
        raise DomainError("theta must be > 0")
    gamma = params.gamma
    chi = mills_ratio(gamma / math.sqrt(2.0 * theta))
    return (
        math.sqrt(2.0 / theta) * chi * math.sqrt(params.s)
        + gamma**3 / (math.sqrt(2.0) * theta**1.5) * chi
        - gamma**2 / (2.0 * theta)
        - 0.5
    )
