"""Exception hierarchy shared by all numerical modules."""


class QedCtrlError(Exception):
    """Base class for all library errors."""


class DomainError(QedCtrlError):
    """Argument outside the mathematical domain of an operation."""


class Unstable(QedCtrlError):
    """The configuration has no stationary distribution."""


class NonConvergence(QedCtrlError):
    """A series or iteration hit its term cap before reaching tolerance."""


class QuadratureFailure(QedCtrlError):
    """Adaptive quadrature could not meet the requested tolerance."""


class NoRoot(QedCtrlError):
    """Root finding failed: the target is outside the attainable range."""


class DegenerateControl(QedCtrlError):
    """A denominator of the rejection expansion vanished for a non-trivial profile."""
