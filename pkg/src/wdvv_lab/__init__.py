"""Numerical laboratory for WDVV prepotentials on Hurwitz spaces.

Modules
-------
special_fn
    Theta, Eisenstein and Weierstrass functions from q-series.
numdiff
    Finite-difference derivative tensors with Richardson extrapolation.
hurwitz_g0
    Rational coverings of the sphere, their flat charts and residue pairings.
prepotential_zoo
    Closed-form genus-0 and genus-1 prepotentials.
wdvv_verifier
    WDVV, unit, Euler and Hessian checks for any prepotential.
identity_suite
    Residuals of the special-function identities the prepotentials rely on.
cli
    Batch front end (``wdvv-lab``).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateCovering,
    DomainError,
    InversionError,
    NonConvergent,
    PoleError,
    SingularJacobian,
    StencilError,
    UnstableError,
    WdvvLabError,
)

__all__ = [
    "__version__",
    "WdvvLabError",
    "DomainError",
    "NonConvergent",
    "PoleError",
    "StencilError",
    "UnstableError",
    "DegenerateCovering",
    "SingularJacobian",
    "InversionError",
]
