"""Admission-control policies and their scaling profiles.

A policy is either *local* (per-state admission probability built from a
non-decreasing rate function a), *global* (cumulative admission products
prescribed directly by a non-increasing scaling profile f with f(0) = 1),
or *tabulated* (explicit per-state probabilities).  Local and global
policies in one of the closed-form families carry exact Laplace-transform
formulas; everything else falls back to adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from scipy.integrate import quad

from .errors import DomainError
from .specfun import mills_ratio

_QUAD_EPSABS = 1e-12
_QUAD_EPSREL = 1e-10
_GRID = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]


@dataclass(frozen=True)
class SystemParams:
    """Server count s and QED slack gamma, with rho = 1 - gamma/sqrt(s)."""

    s: int
    gamma: float

    def __post_init__(self):
        if self.s < 1:
            raise DomainError(f"s must be a positive integer, got {self.s}")
        if self.gamma > math.sqrt(self.s):
            raise DomainError("gamma > sqrt(s) gives a negative arrival rate")

    @property
    def lam(self) -> float:
        return self.s - self.gamma * math.sqrt(self.s)

    @property
    def rho(self) -> float:
        return 1.0 - self.gamma / math.sqrt(self.s)

    @property
    def gamma_s(self) -> float:
        """-sqrt(s) * ln(1 - gamma/sqrt(s)); defined for gamma < sqrt(s)."""
        if self.gamma >= math.sqrt(self.s):
            raise DomainError("gamma_s requires gamma < sqrt(s)")
        return -math.sqrt(self.s) * math.log1p(-self.gamma / math.sqrt(self.s))

    @classmethod
    def from_rho(cls, s: int, rho: float) -> "SystemParams":
        return cls(s=s, gamma=(1.0 - rho) * math.sqrt(s))


# ---------------------------------------------------------------------------
# Closed-form profile families
# ---------------------------------------------------------------------------


class Profile:
    """A scaling profile f with (optionally) closed-form transform data.

    Subclasses may override laplace/laplace_d1/laplace_d2 with exact
    formulas; the base class integrates numerically.
    """

    gamma_min: float = -math.inf
    gamma_min_exact: bool = True
    smooth: bool = True

    def f(self, x: float) -> float:
        raise NotImplementedError

    def a(self, x: float) -> float:
        raise NotImplementedError

    @property
    def fprime0(self) -> float:
        """f'(0+), needed by the second-order expansion coefficient."""
        return -self.a(0.0)

    def laplace(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return _laplace_quad(self.f, gamma, 0)

    def laplace_d1(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return -_laplace_quad(self.f, gamma, 1)

    def laplace_d2(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return _laplace_quad(self.f, gamma, 2)

    def g_derivs(self, gamma: float):
        """Derivatives 0..4 of g(x) = exp(-gamma x) f(x), or None if not smooth
        or no closed form is available."""
        return None

    def _check_gamma(self, gamma: float) -> None:
        if gamma <= self.gamma_min:
            raise DomainError(
                f"gamma={gamma} is at or below gamma_min={self.gamma_min}"
            )


class DriftProfile(Profile):
    """f(x) = p^x; local counterpart a(x) = -ln p.  p = 1 is Erlang C."""

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise DomainError(f"drift parameter p must be in (0, 1], got {p}")
        self.p = p
        self.log_p = math.log(p)
        self.gamma_min = self.log_p

    def f(self, x: float) -> float:
        return self.p**x

    def a(self, x: float) -> float:
        return -self.log_p

    def laplace(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return 1.0 / (gamma - self.log_p)

    def laplace_d1(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return -1.0 / (gamma - self.log_p) ** 2

    def laplace_d2(self, gamma: float) -> float:
        self._check_gamma(gamma)
        return 2.0 / (gamma - self.log_p) ** 3

    def g_derivs(self, gamma: float):
        c = self.log_p - gamma
        return [lambda x, j=j: c**j * math.exp(c * x) for j in range(5)]


class GaussianProfile(Profile):
    """f(x) = exp(-theta x^2 / 2); local counterpart a(x) = theta x.

    This is Erlang A control: the local chain coincides with an M/M/s+M
    system with abandonment rate theta.
    """

    def __init__(self, theta: float):
        if theta <= 0:
            raise DomainError(f"theta must be > 0, got {theta}")
        self.theta = theta

    def f(self, x: float) -> float:
        return math.exp(-0.5 * self.theta * x * x)

    def a(self, x: float) -> float:
        return self.theta * x

    def laplace(self, gamma: float) -> float:
        th = self.theta
        return math.sqrt(2.0 / th) * mills_ratio(gamma / math.sqrt(2.0 * th))

    def laplace_d1(self, gamma: float) -> float:
        u = gamma / math.sqrt(2.0 * self.theta)
        return (2.0 * u * mills_ratio(u) - 1.0) / self.theta

    def laplace_d2(self, gamma: float) -> float:
        th = self.theta
        u = gamma / math.sqrt(2.0 * th)
        chi = mills_ratio(u)
        return 2.0 * (chi + u * (2.0 * u * chi - 1.0)) / (th * math.sqrt(2.0 * th))

    def g_derivs(self, gamma: float):
        th = self.theta

        def g0(x):
            return math.exp(-gamma * x - 0.5 * th * x * x)

        def u(x):
            return gamma + th * x

        return [
            g0,
            lambda x: -u(x) * g0(x),
            lambda x: (u(x) ** 2 - th) * g0(x),
            lambda x: (3.0 * th * u(x) - u(x) ** 3) * g0(x),
            lambda x: (u(x) ** 4 - 6.0 * th * u(x) ** 2 + 3.0 * th * th) * g0(x),
        ]


class BufferProfile(Profile):
    """f(x) = 1{x < eta}: reject once the queue reaches eta * sqrt(s)."""

    smooth = False

    def __init__(self, eta: float):
        if eta <= 0:
            raise DomainError(f"eta must be > 0, got {eta}")
        self.eta = eta

    def f(self, x: float) -> float:
        return 1.0 if x < self.eta else 0.0

    def a(self, x: float) -> float:
        # zero on [0, eta); the wall itself has no finite local rate
        return 0.0 if x < self.eta else math.inf

    @property
    def fprime0(self) -> float:
        return 0.0

    def laplace(self, gamma: float) -> float:
        eta = self.eta
        if abs(gamma) < 1e-8:
            return eta - 0.5 * gamma * eta**2 + gamma**2 * eta**3 / 6.0
        return (1.0 - math.exp(-gamma * eta)) / gamma

    def laplace_d1(self, gamma: float) -> float:
        eta = self.eta
        if abs(gamma) < 1e-8:
            return -0.5 * eta**2 + gamma * eta**3 / 3.0
        return -(1.0 - (1.0 + gamma * eta) * math.exp(-gamma * eta)) / gamma**2

    def laplace_d2(self, gamma: float) -> float:
        eta = self.eta
        if abs(gamma) < 1e-8:
            return eta**3 / 3.0 - 0.25 * gamma * eta**4
        ge = gamma * eta
        return (2.0 - (ge * ge + 2.0 * ge + 2.0) * math.exp(-ge)) / gamma**3


class PowerProfile(Profile):
    """Local rate a(x) = theta x^alpha; f(x) = exp(-theta x^(alpha+1)/(alpha+1))."""

    def __init__(self, theta: float, alpha: float):
        if theta <= 0 or alpha <= 0:
            raise DomainError("power profile needs theta > 0 and alpha > 0")
        self.theta = theta
        self.alpha = alpha

    def f(self, x: float) -> float:
        ap1 = self.alpha + 1.0
        return math.exp(-self.theta * x**ap1 / ap1)

    def a(self, x: float) -> float:
        return self.theta * x**self.alpha


class CustomLocalProfile(Profile):
    """Arbitrary non-decreasing local rate; profile built by quadrature.

    gamma_min is only an estimate (-a at a large abscissa); the policy
    carries gamma_min_exact = False.
    """

    gamma_min_exact = False

    def __init__(self, a: Callable[[float], float]):
        self._a = a
        self.gamma_min = -float(a(1e6))

    def f(self, x: float) -> float:
        if x == 0.0:
            return 1.0
        expo, _ = quad(self._a, 0.0, x, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL)
        return math.exp(-expo)

    def a(self, x: float) -> float:
        return float(self._a(x))


class CustomGlobalProfile(Profile):
    """Arbitrary non-increasing profile; local rate by finite differences."""

    gamma_min_exact = False

    def __init__(self, f: Callable[[float], float]):
        self._f = f
        # slope estimate of -ln f at a large abscissa
        x_big = 1e3
        fx = float(f(x_big))
        self.gamma_min = -math.inf if fx <= 0.0 else math.log(fx) / x_big

    def f(self, x: float) -> float:
        return float(self._f(x))

    def a(self, x: float) -> float:
        return global_to_local(self._f)(x)

    @property
    def fprime0(self) -> float:
        h = 1e-7
        return (self.f(h) - self.f(0.0)) / h


def _laplace_quad(f: Callable[[float], float], gamma: float, moment: int) -> float:
    """int_0^inf x^moment e^(-gamma x) f(x) dx with tail truncation."""

    def integrand(x):
        return x**moment * math.exp(-gamma * x) * f(x)

    # find truncation point where the integrand is negligible
    upper = 1.0
    while integrand(upper) > 1e-16 and upper < 1e8:
        upper *= 2.0
    val, _ = quad(integrand, 0.0, upper, epsabs=_QUAD_EPSABS,
                  epsrel=_QUAD_EPSREL, limit=400)
    return val


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

LOCAL = "local"
GLOBAL = "global"
TABULATED = "tabulated"


@dataclass(frozen=True)
class ControlPolicy:
    """Immutable admission policy.

    mode selects how exact per-state probabilities are produced; profile
    (if set) provides the scaling profile and Laplace-transform data used
    by all asymptotic approximations.
    """

    mode: str
    profile: Optional[Profile] = None
    table: Optional[tuple] = None
    table_extend: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.mode not in (LOCAL, GLOBAL, TABULATED):
            raise DomainError(f"unknown policy mode {self.mode!r}")
        if self.mode == TABULATED:
            if self.table is None:
                raise DomainError("tabulated policy needs a table")
            if any(not 0.0 <= p <= 1.0 for p in self.table):
                raise DomainError("table entries must lie in [0, 1]")
            if not 0.0 <= self.table_extend <= 1.0:
                raise DomainError("table extension value must lie in [0, 1]")
        else:
            if self.profile is None:
                raise DomainError("local/global policy needs a profile")
            self._validate_profile()

    def _validate_profile(self):
        prof = self.profile
        if self.mode == LOCAL:
            prev = -math.inf
            for x in _GRID:
                ax = prof.a(x)
                if ax < 0 or ax < prev - 1e-12:
                    raise DomainError("local rate must be non-negative and non-decreasing")
                prev = ax
        else:
            if abs(prof.f(0.0) - 1.0) > 1e-12:
                raise DomainError("scaling profile must have f(0) = 1")
            prev = math.inf
            for x in _GRID:
                fx = prof.f(x)
                if fx < 0 or fx > prev + 1e-12:
                    raise DomainError("scaling profile must be non-negative and non-increasing")
                prev = fx

    @property
    def gamma_min(self) -> float:
        if self.mode == TABULATED:
            raise DomainError("tabulated policies have no scaling profile, hence no gamma_min")
        return self.profile.gamma_min

    @property
    def gamma_min_exact(self) -> bool:
        if self.mode == TABULATED:
            return False
        return self.profile.gamma_min_exact

    def as_local(self) -> "ControlPolicy":
        if self.mode != LOCAL and self.profile is None:
            raise DomainError("cannot convert a tabulated policy to local form")
        return replace(self, mode=LOCAL)

    def as_global(self) -> "ControlPolicy":
        if self.mode != GLOBAL and self.profile is None:
            raise DomainError("cannot convert a tabulated policy to global form")
        return replace(self, mode=GLOBAL)


# constructors -----------------------------------------------------------


def erlang_c_policy() -> ControlPolicy:
    return ControlPolicy(mode=LOCAL, profile=DriftProfile(1.0), label="erlangC")


def erlang_b_policy() -> ControlPolicy:
    return ControlPolicy(mode=TABULATED, table=(), table_extend=0.0, label="erlangB")


def drift_global(p: float) -> ControlPolicy:
    return ControlPolicy(mode=GLOBAL, profile=DriftProfile(p), label=f"drift:{p}")


def const_local(theta: float) -> ControlPolicy:
    if theta < 0:
        raise DomainError("constant local rate must be >= 0")
    return ControlPolicy(mode=LOCAL, profile=DriftProfile(math.exp(-theta)),
                         label=f"const:{theta}")


def linear_local(theta: float) -> ControlPolicy:
    return ControlPolicy(mode=LOCAL, profile=GaussianProfile(theta),
                         label=f"linear:{theta}")


def gaussian_global(theta: float) -> ControlPolicy:
    return ControlPolicy(mode=GLOBAL, profile=GaussianProfile(theta),
                         label=f"gauss:{theta}")


def power_local(theta: float, alpha: float) -> ControlPolicy:
    if alpha == 1.0:
        return ControlPolicy(mode=LOCAL, profile=GaussianProfile(theta),
                             label=f"power:{theta},{alpha}")
    return ControlPolicy(mode=LOCAL, profile=PowerProfile(theta, alpha),
                         label=f"power:{theta},{alpha}")


def buffer_global(eta: float) -> ControlPolicy:
    return ControlPolicy(mode=GLOBAL, profile=BufferProfile(eta),
                         label=f"buffer:{eta}")


def tabulated(probs: Sequence[float], extend: float = 1.0) -> ControlPolicy:
    return ControlPolicy(mode=TABULATED, table=tuple(float(p) for p in probs),
                         table_extend=float(extend), label="table")


def custom_local(a: Callable[[float], float]) -> ControlPolicy:
    return ControlPolicy(mode=LOCAL, profile=CustomLocalProfile(a), label="custom-local")


def custom_global(f: Callable[[float], float]) -> ControlPolicy:
    return ControlPolicy(mode=GLOBAL, profile=CustomGlobalProfile(f), label="custom-global")


# operations --------------------------------------------------------------


def admit_prob(policy: ControlPolicy, s: int, k: int) -> float:
    """Per-state admission probability p_s(k) for an arrival seeing k waiting."""
    if k < 0:
        raise DomainError("k must be non-negative")
    if policy.mode == LOCAL:
        sq = math.sqrt(s)
        return 1.0 / (1.0 + policy.profile.a((k + 1) / sq) / sq)
    if policy.mode == TABULATED:
        return policy.table[k] if k < len(policy.table) else policy.table_extend
    # global: ratio reconstruction q(k)/q(k-1), clamped for non-conforming f
    q_prev = q_product(policy, s, k - 1) if k > 0 else 1.0
    if q_prev <= 0.0:
        return 0.0
    return min(1.0, max(0.0, q_product(policy, s, k) / q_prev))


def q_product(policy: ControlPolicy, s: int, n: int) -> float:
    """Cumulative admission product q_s(n) = p_s(0) ... p_s(n)."""
    if n < 0:
        return 1.0
    if policy.mode == GLOBAL:
        return policy.profile.f((n + 1) / math.sqrt(s))
    q = 1.0
    for k in range(n + 1):
        q *= admit_prob(policy, s, k)
        if q == 0.0:
            break
    return q


def iter_admit_probs(policy: ControlPolicy, s: int):
    """Infinite iterator over p_s(0), p_s(1), ... (global mode yields ratios)."""
    if policy.mode == GLOBAL:
        prof = policy.profile
        sq = math.sqrt(s)
        q_prev = 1.0
        k = 0
        while True:
            q = prof.f((k + 1) / sq)
            yield 0.0 if q_prev <= 0.0 else min(1.0, max(0.0, q / q_prev))
            q_prev = q
            k += 1
    elif policy.mode == LOCAL:
        prof = policy.profile
        sq = math.sqrt(s)
        k = 0
        while True:
            yield 1.0 / (1.0 + prof.a((k + 1) / sq) / sq)
            k += 1
    else:
        for p in policy.table:
            yield p
        while True:
            yield policy.table_extend


def local_to_global(a: Callable[[float], float]) -> Callable[[float], float]:
    """f(x) = exp(-int_0^x a(y) dy), evaluated by adaptive quadrature."""

    def f(x: float) -> float:
        if x <= 0.0:
            return 1.0
        expo, _ = quad(a, 0.0, x, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
        return math.exp(-expo)

    return f


def global_to_local(f: Callable[[float], float]) -> Callable[[float], float]:
    """a(x) = -f'(x)/f(x) by central finite differences."""

    def a(x: float) -> float:
        fx = float(f(x))
        if fx <= 0.0:
            raise DomainError(f"profile is non-positive at x={x}")
        h = max(1e-6, 1e-6 * abs(x))
        return -(float(f(x + h)) - float(f(max(0.0, x - h)))) / ((x + h - max(0.0, x - h)) * fx)

    return a


def laplace(policy: ControlPolicy, gamma: float) -> float:
    """Laplace transform of the policy's scaling profile at gamma."""
    if policy.profile is None:
        raise DomainError("tabulated policies have no scaling profile")
    return policy.profile.laplace(gamma)


def laplace_derivs(policy: ControlPolicy, gamma: float, order: int) -> float:
    if policy.profile is None:
        raise DomainError("tabulated policies have no scaling profile")
    if order == 1:
        return policy.profile.laplace_d1(gamma)
    if order == 2:
        return policy.profile.laplace_d2(gamma)
    raise DomainError("order must be 1 or 2")


def gamma_min(policy: ControlPolicy) -> float:
    return policy.gamma_min


def psi_window(theta: float, alpha: float, s: float) -> float:
    """Validity window psi(s) for approximating local power-law control by
    its global profile: q_s(n) tracks f((n+1)/sqrt(s)) for n+1 <= sqrt(s) psi(s)."""
    if theta <= 0 or alpha < 0 or s < 1:
        raise DomainError("psi_window needs theta > 0, alpha >= 0, s >= 1")
    if alpha == 0.0:
        return math.inf if theta <= s**0.25 / 2.0 else 0.0
    first = (0.5 / theta) ** (1.0 / alpha) * s ** (1.0 / (4.0 * alpha))
    k = 2.0 * alpha + 1.0
    second = (k / theta**2) ** (1.0 / k) * s ** (1.0 / (4.0 * k))
    return min(first, second)


# CLI policy grammar ------------------------------------------------------


def parse_policy(spec: str) -> ControlPolicy:
    """Parse the CLI policy grammar.

    const:t | linear:t | power:t,a | drift:p | buffer:e | erlangB | erlangC
    | table:<path with whitespace-separated probabilities>
    """
    spec = spec.strip()
    if spec == "erlangB":
        return erlang_b_policy()
    if spec == "erlangC":
        return erlang_c_policy()
    if ":" not in spec:
        raise DomainError(f"cannot parse policy spec {spec!r}")
    head, _, rest = spec.partition(":")
    try:
        if head == "const":
            return const_local(float(rest))
        if head == "linear":
            return linear_local(float(rest))
        if head == "power":
            theta_s, _, alpha_s = rest.partition(",")
            return power_local(float(theta_s), float(alpha_s))
        if head == "drift":
            return drift_global(float(rest))
        if head == "gauss":
            return gaussian_global(float(rest))
        if head == "buffer":
            return buffer_global(float(rest))
        if head == "table":
            with open(rest) as fh:
                probs = [float(tok) for tok in fh.read().split()]
            return tabulated(probs)
    except (ValueError, OSError) as exc:
        raise DomainError(f"bad policy spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown policy family {head!r}")
