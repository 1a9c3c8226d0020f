"""Special functions used by the analytic modules.

Everything here is a pure function of scalars.  The Gaussian-tail quantities
are routed through erfc/erfcx so that no exp(x^2) factor is ever formed
explicitly; the Kummer function is summed directly since only the first
parameter a = 1 is ever needed.
"""

import math

from scipy.special import erfcx

from .errors import NonConvergence

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)

_KUMMER_TERM_CAP = 10**6


def normal_pdf(x: float) -> float:
    """Standard normal density phi(x)."""
    return math.exp(-0.5 * x * x) / SQRT_2PI


def normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def mills_ratio(delta: float) -> float:
    """Mills' ratio chi(delta) = exp(delta^2) * int_delta^inf exp(-y^2) dy.

    Evaluated as (sqrt(pi)/2) * erfcx(delta), which is stable for all real
    delta: erfcx carries the exp(delta^2) factor internally, so neither
    branch of the naive definition can overflow.
    """
    return 0.5 * SQRT_PI * erfcx(delta)


def kummer_m_1(b: float, z: float) -> float:
    """Confluent hypergeometric M(1, b, z) = sum_n z^n / (b)_n.

    Compensated (Kahan) summation; the series has 10^5+ nearly geometric
    terms when b and z are both large and close.
    """
    if b <= 0:
        raise NonConvergence(f"kummer_m_1 requires b > 0, got b={b}")
    if z < 0:
        raise NonConvergence(f"kummer_m_1 requires z >= 0, got z={z}")
    total = 1.0
    comp = 0.0
    term = 1.0
    denom = b
    for _ in range(_KUMMER_TERM_CAP):
        term *= z / denom
        denom += 1.0
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < 1e-16 * abs(total):
            return total
    raise NonConvergence(f"kummer_m_1 did not converge for b={b}, z={z}")


def parabolic_u_half(sign: int, z: float) -> float:
    """Parabolic cylinder U(+-1/2, z).

    U(-1/2, z) = exp(-z^2/4); U(1/2, z) = exp(-z^2/4) * int_0^inf
    exp(-t^2/2 - z t) dt, where the integral equals sqrt(2) * chi(z/sqrt(2)).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    quarter = math.exp(-0.25 * z * z)
    if sign == -1:
        return quarter
    return quarter * math.sqrt(2.0) * mills_ratio(z / math.sqrt(2.0))
