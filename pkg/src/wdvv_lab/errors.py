"""Exception hierarchy shared by every module of the package."""


class WdvvLabError(Exception):
    """Base class for all errors raised by wdvv_lab."""


class DomainError(WdvvLabError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class NonConvergent(WdvvLabError, ArithmeticError):
    """A series or iteration hit its term/iteration cap before converging."""


class PoleError(DomainError):
    """A pole-bearing function was evaluated too close to a pole."""


class StencilError(WdvvLabError):
    """A finite-difference stencil node fell outside the evaluator's domain."""


class UnstableError(WdvvLabError, ArithmeticError):
    """Richardson extrapolation levels disagree beyond the requested tolerance."""


class DegenerateCovering(DomainError):
    """A rational covering has colliding critical points or branch points."""


class SingularJacobian(WdvvLabError, ArithmeticError):
    """A Jacobian matrix is numerically rank deficient."""


class InversionError(WdvvLabError, ArithmeticError):
    """Newton inversion of a modular function failed to converge."""
