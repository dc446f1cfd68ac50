"""Jacobi theta, Eisenstein series and Weierstrass functions.

Conventions
-----------
* ``tau`` is the modulus with ``Im(tau) > 0`` and the nome is
  ``q = exp(2*pi*i*tau)``.
* ``theta1(u|tau) = 2 * sum_{n>=0} (-1)^n exp(i*pi*tau*(n+1/2)^2) sin((2n+1)*pi*u)``,
  which is minus the characteristic ``[1/2, 1/2]`` theta function. It is odd
  and satisfies ``theta1(u+1) = -theta1(u)``.
* Weierstrass functions are built on the lattice ``2*omega1*Z + 2*omega2*Z``
  by rescaling to ``Z + tau*Z`` and using
  ``sigma(z) = exp(eta1*z^2) * theta1(z) / theta1'(0)`` with
  ``eta1 = zeta(1/2|tau) = pi^2 E2(tau) / 6``.

All functions are pure and may be called concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergent, PoleError

PI = math.pi
TWO_PI_I = 2j * math.pi

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "ModularPoint",
    "LatticeFrame",
    "theta1_jet",
    "eisenstein",
    "eisenstein_q",
    "weierstrass",
    "lattice_invariants",
]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for the q-series.

    Parameters
    ----------
    rel_tol : float
        A term counts as negligible once its magnitude is at most
        ``rel_tol`` times the running sum of absolute term magnitudes.
    max_terms : int
        Hard cap on the number of terms. Reaching it raises
        :class:`NonConvergent`.
    """

    rel_tol: float = 1e-17
    max_terms: int = 5000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 8:
            raise DomainError("max_terms must be at least 8")


DEFAULT_CONTROL = SeriesControl()

# Three consecutive negligible terms are required before stopping.
_SAFETY_TAIL = 3


@dataclass(frozen=True)
class ModularPoint:
    """A point of the upper half-plane.

    Parameters
    ----------
    tau : complex
        Modulus, ``Im(tau) > 0``.
    """

    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not (math.isfinite(tau.real) and math.isfinite(tau.imag)) or tau.imag <= 0:
            raise DomainError(f"modulus must lie in the upper half-plane, got {complex(tau)}")
        object.__setattr__(self, "tau", tau)

    @property
    def nome(self) -> complex:
        """The nome ``exp(2*pi*i*tau)``."""
        return cmath.exp(TWO_PI_I * self.tau)


def _tau_of(m) -> complex:
    if isinstance(m, ModularPoint):
        return m.tau
    return ModularPoint(m).tau


def theta1_jet(u, m, order: int = 0, ctl: SeriesControl = DEFAULT_CONTROL):
    """Jacobi theta1 and its first ``order`` derivatives in ``u``.

    Parameters
    ----------
    u : complex
        Argument.
    m : ModularPoint or complex
        Modulus.
    order : int
        Highest derivative returned, between 0 and 4.
    ctl : SeriesControl
        Truncation control.

    Returns
    -------
    tuple of complex
        ``(theta1, theta1', ..., theta1^(order))``.

    Raises
    ------
    DomainError
        If ``Im(tau) <= 0`` or the argument overflows.
    NonConvergent
        If ``ctl.max_terms`` terms do not satisfy the stopping rule.
    """
    tau = _tau_of(m)
    if order not in (0, 1, 2, 3, 4):
        raise DomainError("theta1_jet supports derivative orders 0..4")
    u = complex(u)
    sums = [0j] * (order + 1)
    scale = 0.0
    quiet = 0
    for n in range(ctl.max_terms):
        k = 2 * n + 1
        weight = 2.0 * cmath.exp(1j * PI * tau * (n + 0.5) ** 2)
        if n % 2:
            weight = -weight
        arg = k * PI * u
        try:
            s, c = cmath.sin(arg), cmath.cos(arg)
        except OverflowError as exc:
            raise DomainError(f"theta1 argument {u!r} too far from the real axis") from exc
        cycle = (s, c, -s, -c)
        kp = k * PI
        mag = 0.0
        for d in range(order + 1):
            term = weight * kp**d * cycle[d % 4]
            sums[d] += term
            mag = max(mag, abs(term))
        scale += mag
        if mag <= ctl.rel_tol * scale:
            quiet += 1
            if quiet >= _SAFETY_TAIL:
                return tuple(sums)
        else:
            quiet = 0
    raise NonConvergent(f"theta1 series did not converge in {ctl.max_terms} terms")


_EISENSTEIN = {"E2": (-24.0, 1), "E4": (240.0, 3), "E6": (-504.0, 5)}
_WEIGHT = {"E2": 2, "E4": 4, "E6": 6}

# x * A_k(x) / (1 - x)^(k+1) is (x d/dx)^k [x / (1 - x)], with A_k the
# Eulerian polynomials (coefficients listed from the constant term up).
_EULERIAN = ((1,), (1,), (1, 1), (1, 4, 1), (1, 11, 11, 1))


def _lambert_derivative(x: complex, k: int) -> complex:
    poly = 0j
    for coef in reversed(_EULERIAN[k]):
        poly = poly * x + coef
    return x * poly / (1.0 - x) ** (k + 1)


def eisenstein(m, which: str = "E2", deriv_order: int = 0, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Eisenstein series E2, E4 or E6, or one of their tau-derivatives.

    Each Lambert term ``c n^p q^n / (1 - q^n)`` is differentiated exactly,
    which is the same as multiplying every ``q^n`` of the q-expansion by
    ``(2 pi i n)^k``.

    Parameters
    ----------
    m : ModularPoint or complex
        Modulus.
    which : {"E2", "E4", "E6"}
        Series to evaluate.
    deriv_order : int
        Number of tau-derivatives, between 0 and 4.
    ctl : SeriesControl
        Truncation control.

    Returns
    -------
    complex
    """
    tau = _tau_of(m)
    if which not in _EISENSTEIN:
        raise DomainError(f"unknown Eisenstein series {which!r}")
    if deriv_order not in (0, 1, 2, 3, 4):
        raise DomainError("eisenstein supports derivative orders 0..4")
    coef, power = _EISENSTEIN[which]
    total = 1.0 + 0j if deriv_order == 0 else 0j
    scale = abs(total)
    quiet = 0
    for n in range(1, ctl.max_terms + 1):
        x = cmath.exp(TWO_PI_I * n * tau)
        term = coef * n**power * (TWO_PI_I * n) ** deriv_order * _lambert_derivative(x, deriv_order)
        total += term
        mag = abs(term)
        scale += mag
        if mag <= ctl.rel_tol * scale:
            quiet += 1
            if quiet >= _SAFETY_TAIL:
                return total
        else:
            quiet = 0
    raise NonConvergent(f"{which} series did not converge in {ctl.max_terms} terms")


def eisenstein_q(tau_q, qparam, which: str = "E2", deriv_order: int = 0, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Deformed Eisenstein series and their ``tau_q``-derivatives.

    With ``w = 1 - qparam * tau_q`` and ``tau = tau_q / w``::

        E_{q,2}(tau_q) = E2(tau) / w^2 - 6 i qparam / (pi w)
        E_{q,4}(tau_q) = E4(tau) / w^4
        E_{q,6}(tau_q) = E6(tau) / w^6

    Derivatives follow from ``dtau/dtau_q = 1/w^2`` and
    ``d(w^-a)/dtau_q = a qparam w^(-a-1)``. Orders up to 3 are supported.

    Raises
    ------
    DomainError
        If ``w == 0`` or ``tau`` leaves the upper half-plane.
    """
    if which not in _WEIGHT:
        raise DomainError(f"unknown Eisenstein series {which!r}")
    if deriv_order not in (0, 1, 2, 3):
        raise DomainError("eisenstein_q supports derivative orders 0..3")
    tau_q = complex(tau_q)
    qparam = complex(qparam)
    w = 1.0 - qparam * tau_q
    if abs(w) < 1e-14:
        raise DomainError("1 - q*tau_q vanishes")
    tau = tau_q / w
    if tau.imag <= 0:
        raise DomainError(f"transformed modulus {complex(tau)} is not in the upper half-plane")

    # Each entry (c, a, n) stands for c * w^(-a) * E^(n)(tau); n=None marks
    # the constant 1 instead of a series derivative.
    terms = [(1.0 + 0j, _WEIGHT[which], 0)]
    if which == "E2" and qparam != 0:
        terms.append((-6j * qparam / PI, 1, None))
    for _ in range(deriv_order):
        nxt = []
        for c, a, n in terms:
            if qparam != 0:
                nxt.append((c * a * qparam, a + 1, n))
            if n is not None:
                nxt.append((c, a + 2, n + 1))
        terms = nxt

    cache = {}
    total = 0j
    for c, a, n in terms:
        if n is None:
            val = 1.0
        else:
            if n not in cache:
                cache[n] = eisenstein(tau, which, n, ctl)
            val = cache[n]
        total += c * val / w**a
    return total


@dataclass(frozen=True)
class LatticeFrame:
    """Half-periods of a lattice plus derived invariants.

    Build instances with :func:`lattice_invariants`.

    Attributes
    ----------
    omega1, omega2 : complex
        Half-periods with ``Im(omega2/omega1) > 0``.
    tau : complex
        ``omega2 / omega1``.
    eta1 : complex
        ``zeta(omega1)``.
    g2, g3 : complex
        Weierstrass invariants.
    e1, e2, e3 : complex
        ``P(omega1)``, ``P(omega2)``, ``P(omega1 + omega2)``.
    """

    omega1: complex
    omega2: complex
    tau: complex
    eta1: complex
    g2: complex
    g3: complex
    e1: complex
    e2: complex
    e3: complex

    @property
    def discriminant(self) -> complex:
        return self.g2**3 - 27.0 * self.g3**2


def lattice_invariants(omega1, omega2, ctl: SeriesControl = DEFAULT_CONTROL) -> LatticeFrame:
    """Build a :class:`LatticeFrame` from two half-periods.

    ``g2 = pi^4 E4 / (12 omega1^4)``, ``g3 = pi^6 E6 / (216 omega1^6)`` and
    ``eta1 = pi^2 E2 / (12 omega1)``; the ``e_j`` come from evaluating P at
    the half-periods.
    """
    omega1 = complex(omega1)
    omega2 = complex(omega2)
    if omega1 == 0:
        raise DomainError("omega1 must be nonzero")
    tau = omega2 / omega1
    if tau.imag <= 0:
        raise DomainError("Im(omega2/omega1) must be positive")
    e2s = eisenstein(tau, "E2", 0, ctl)
    e4s = eisenstein(tau, "E4", 0, ctl)
    e6s = eisenstein(tau, "E6", 0, ctl)
    eta1 = PI**2 * e2s / (12.0 * omega1)
    g2 = PI**4 * e4s / (12.0 * omega1**4)
    g3 = PI**6 * e6s / (216.0 * omega1**6)
    partial = LatticeFrame(omega1, omega2, tau, eta1, g2, g3, 0j, 0j, 0j)
    e1 = weierstrass(omega1, partial, "P", ctl)
    e2 = weierstrass(omega2, partial, "P", ctl)
    e3 = weierstrass(omega1 + omega2, partial, "P", ctl)
    return LatticeFrame(omega1, omega2, tau, eta1, g2, g3, e1, e2, e3)


_SCALING = {"P": -2, "Pprime": -3, "Pdoubleprime": -4, "Zeta": -1, "Sigma": 1}
_JET_ORDER = {"P": 2, "Pprime": 3, "Pdoubleprime": 4, "Zeta": 1, "Sigma": 1}


def _reduce(z: complex, tau: complex):
    """Split ``z = z0 + m + n*tau`` with ``z0`` near the origin."""
    n = round(z.imag / tau.imag)
    z1 = z - n * tau
    m = round(z1.real)
    return z1 - m, m, n


def weierstrass(u, L: LatticeFrame, which: str = "P", ctl: SeriesControl = DEFAULT_CONTROL,
                pole_guard: float = 1e-8) -> complex:
    """Weierstrass P, P', P'', zeta or sigma on the lattice of ``L``.

    Parameters
    ----------
    u : complex
        Argument.
    L : LatticeFrame
        Lattice. Only ``omega1``, ``tau`` and ``eta1`` are read.
    which : {"P", "Pprime", "Pdoubleprime", "Zeta", "Sigma"}
        Function to evaluate.
    ctl : SeriesControl
        Truncation control for the theta series.
    pole_guard : float
        Relative distance (in units of ``|2*omega1|``) from a lattice point
        below which pole-bearing functions raise :class:`PoleError`.

    Returns
    -------
    complex

    Notes
    -----
    Arguments inside the box ``|Re z| <= 1``, ``|Im z| <= Im tau`` (with
    ``z = u / (2 omega1)``) are fed to the theta series directly; others are
    first shifted by a lattice vector and corrected by the quasi-periodicity
    laws of zeta and sigma.
    """
    if which not in _SCALING:
        raise DomainError(f"unknown Weierstrass function {which!r}")
    alpha = 2.0 * L.omega1
    tau = L.tau
    if alpha == 0 or tau.imag <= 0:
        raise DomainError("bad lattice frame")
    z = complex(u) / alpha

    z_min, _, _ = _reduce(z, tau)
    nearest = min(abs(z_min - (a + b * tau)) for a in (-1, 0, 1) for b in (-1, 0, 1))
    if which != "Sigma" and nearest < pole_guard:
        raise PoleError(f"argument {u!r} is within the pole guard of a lattice point")

    if abs(z.real) <= 1.0 and abs(z.imag) <= tau.imag:
        z0, m, n = z, 0, 0
    else:
        z0, m, n = _reduce(z, tau)

    eta1n = alpha * L.eta1            # zeta(1/2 | tau)
    eta2n = tau * eta1n - 1j * PI     # zeta(tau/2 | tau), from Legendre's relation

    if which == "Sigma":
        th0, th0p = theta1_jet(0.0, tau, 1, ctl)
        th = theta1_jet(z0, tau, 0, ctl)[0]
        val = cmath.exp(eta1n * z0 * z0) * th / th0p
        if m or n:
            shift = m + n * tau
            eta_shift = 2 * m * eta1n + 2 * n * eta2n
            sign = -1.0 if (m + n + m * n) % 2 else 1.0
            val *= sign * cmath.exp(eta_shift * (z0 + shift / 2))
        return val * alpha

    jet = theta1_jet(z0, tau, _JET_ORDER[which], ctl)
    th = jet[0]
    if th == 0:
        raise PoleError(f"theta1 vanishes at {u!r}")
    r = [j / th for j in jet]
    l1 = r[1]
    if which == "Zeta":
        val = 2.0 * eta1n * z0 + l1 + 2 * m * eta1n + 2 * n * eta2n
    else:
        l2 = r[2] - l1**2
        if which == "P":
            val = -2.0 * eta1n - l2
        else:
            l3 = r[3] - 3.0 * r[2] * l1 + 2.0 * l1**3
            if which == "Pprime":
                val = -l3
            else:
                l4 = (r[4] - 4.0 * r[3] * l1 - 3.0 * r[2] ** 2
                      + 12.0 * r[2] * l1**2 - 6.0 * l1**4)
                val = -l4
    return val * alpha ** _SCALING[which]
