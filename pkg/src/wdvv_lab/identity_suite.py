"""Residuals of the standalone identities behind the genus-1 examples.

Every function returns residuals normalized by the magnitude of the terms
involved, so that they can be compared with fixed tolerances. Where an
identity is partly built into an evaluator (for instance the half-period
value of zeta), the residual is computed through an independent route: theta
constants in place of Eisenstein series, or the half-period values ``e_j``
in place of ``g2`` and ``g3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numdiff import DerivSpec, adaptive_derivative_tensor
from .special_fn import (DEFAULT_CONTROL, LatticeFrame, ModularPoint, SeriesControl, eisenstein,
                         eisenstein_q, lattice_invariants, theta1_jet, weierstrass)

PI = math.pi
TWO_PI_I = 2j * math.pi

__all__ = [
    "IdentityResult",
    "TOLERANCES",
    "chazy_residual",
    "ramanujan_residuals",
    "weierstrass_suite",
    "ej_ode_residual",
    "ej_side_checks",
    "genus1_flat_coords",
    "random_modulus",
    "random_lattice",
    "random_arguments",
]

#: Tolerances per identity. Series-only identities get 1e-10, identities that
#: combine several evaluators get 1e-9, finite-difference ones get 1e-6.
TOLERANCES = {
    "chazy": 1e-9,
    "ramanujan_E2": 1e-10,
    "ramanujan_E4": 1e-10,
    "ramanujan_E6": 1e-10,
    "q_ramanujan_E2": 1e-9,
    "q_ramanujan_E4": 1e-9,
    "q_ramanujan_E6": 1e-9,
    "p_ode": 1e-9,
    "p_second": 1e-9,
    "legendre": 1e-10,
    "addition_p": 1e-9,
    "addition_zeta": 1e-9,
    "zeta_period_1": 1e-10,
    "zeta_period_2": 1e-10,
    "zeta_e2": 1e-10,
    "g2_e4": 1e-10,
    "g3_e6": 1e-10,
    "ej_ode": 1e-6,
    "ej_sum": 1e-10,
    "ej_shift": 1e-10,
    "flat_x2": 1e-10,
    "flat_x3": 1e-10,
    "flat_y3": 1e-10,
}


@dataclass
class IdentityResult:
    """One identity evaluated at one input."""

    identity_id: str
    inputs: dict
    residual: float
    tolerance: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)


def _rel(diff, *terms) -> float:
    """``|diff| / max(1e-300, max |terms|)``."""
    scale = max(abs(complex(x)) for x in terms) if terms else 1.0
    return abs(complex(diff)) / max(scale, 1e-300)


def _tau(m) -> complex:
    return m.tau if isinstance(m, ModularPoint) else ModularPoint(complex(m)).tau


# ---------------------------------------------------------------------------
# Eisenstein identities
# ---------------------------------------------------------------------------

def chazy_residual(m, deformed=None, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Relative residual of ``E2''' - 2 i pi E2 E2'' + 3 i pi E2'^2 = 0``.

    Parameters
    ----------
    m : ModularPoint or complex
        Modulus (read as ``tau_q`` when ``deformed`` is given).
    deformed : complex, optional
        Deformation parameter; the identity is then checked for ``E_{q,2}``.
    ctl : SeriesControl

    Returns
    -------
    float
        ``|LHS|`` divided by the largest of the three terms.
    """
    tau = _tau(m)
    if deformed is None:
        e = [eisenstein(tau, "E2", k, ctl) for k in range(4)]
    else:
        e = [eisenstein_q(tau, deformed, "E2", k, ctl) for k in range(4)]
    terms = (e[3], -2j * PI * e[0] * e[2], 3j * PI * e[1] ** 2)
    return _rel(sum(terms), *terms)


def ramanujan_residuals(m, deformed=None, ctl: SeriesControl = DEFAULT_CONTROL):
    """Relative residuals ``(r2, r4, r6)`` of the Ramanujan system.

    ``E2'/(2 pi i) = (E2^2 - E4)/12``, ``E4'/(2 pi i) = (E2 E4 - E6)/3`` and
    ``E6'/(2 pi i) = (E2 E6 - E4^2)/2``. With ``deformed = (tau_q, q)`` the
    deformed series are used instead and ``m`` is ignored.
    """
    if deformed is None:
        tau = _tau(m)
        f = lambda w, k: eisenstein(tau, w, k, ctl)  # noqa: E731
    else:
        tau_q, q = deformed
        f = lambda w, k: eisenstein_q(tau_q, q, w, k, ctl)  # noqa: E731
    e2, e4, e6 = (f(w, 0) for w in ("E2", "E4", "E6"))
    d2, d4, d6 = (f(w, 1) / TWO_PI_I for w in ("E2", "E4", "E6"))
    r2 = _rel(d2 - (e2 * e2 - e4) / 12, d2, e2 * e2 / 12, e4 / 12)
    r4 = _rel(d4 - (e2 * e4 - e6) / 3, d4, e2 * e4 / 3, e6 / 3)
    r6 = _rel(d6 - (e2 * e6 - e4 * e4) / 2, d6, e2 * e6 / 2, e4 * e4 / 2)
    return r2, r4, r6


# ---------------------------------------------------------------------------
# Weierstrass identities
# ---------------------------------------------------------------------------

def weierstrass_suite(L: LatticeFrame, u, v, ctl: SeriesControl = DEFAULT_CONTROL) -> dict:
    """Relative residuals of the Weierstrass identities at ``(u, v)``.

    Keys
    ----
    p_ode
        ``P'^2 = 4 P^3 - g2 P - g3``.
    p_second
        ``P'' = 6 P^2 - g2/2``.
    legendre
        ``omega2 zeta(omega1) - omega1 zeta(omega2) = i pi / 2``.
    addition_p, addition_zeta
        Addition theorems for ``P`` and ``zeta``.
    zeta_period_1, zeta_period_2
        ``zeta(u + 2 omega_j) = zeta(u) + 2 zeta(omega_j)``.
    zeta_e2
        ``2 zeta(1/2 | tau) = pi^2 E2 / 3`` with the left side taken from the
        theta constants, ``zeta(1/2 | tau) = -theta1'''(0) / (6 theta1'(0))``.
    g2_e4, g3_e6
        ``g2 = pi^4 E4 / (12 omega1^4)`` and ``g3 = pi^6 E6 / (216 omega1^6)``
        with the left sides computed from the half-period values,
        ``g2 = 2 (e1^2 + e2^2 + e3^2)`` and ``g3 = 4 e1 e2 e3``.

    Raises
    ------
    PoleError
        If ``u``, ``v`` or ``u + v`` is too close to a lattice point.
    """
    u, v = complex(u), complex(v)
    W = lambda z, w: weierstrass(z, L, w, ctl)  # noqa: E731
    pu, pv, puv = W(u, "P"), W(v, "P"), W(u + v, "P")
    dpu, dpv = W(u, "Pprime"), W(v, "Pprime")
    ddpu = W(u, "Pdoubleprime")
    zu, zv, zuv = W(u, "Zeta"), W(v, "Zeta"), W(u + v, "Zeta")
    g2, g3 = L.g2, L.g3
    out = {}
    out["p_ode"] = _rel(dpu ** 2 - (4 * pu ** 3 - g2 * pu - g3), dpu ** 2, 4 * pu ** 3, g2 * pu, g3)
    out["p_second"] = _rel(ddpu - (6 * pu ** 2 - g2 / 2), ddpu, 6 * pu ** 2, g2 / 2)
    z1, z2 = W(L.omega1, "Zeta"), W(L.omega2, "Zeta")
    leg = (L.omega2 * z1, L.omega1 * z2, 0.5j * PI)
    out["legendre"] = _rel(leg[0] - leg[1] - leg[2], *leg)
    if pu == pv:
        raise DomainError("addition theorems need P(u) != P(v)")
    ratio = (dpu - dpv) / (pu - pv)
    out["addition_p"] = _rel(puv - (-pu - pv + ratio ** 2 / 4), puv, pu, pv, ratio ** 2 / 4)
    out["addition_zeta"] = _rel(zuv - (zu + zv + ratio / 2), zuv, zu, zv, ratio / 2)
    for j, (om, zom) in enumerate(((L.omega1, z1), (L.omega2, z2)), start=1):
        zs = W(u + 2 * om, "Zeta")
        out[f"zeta_period_{j}"] = _rel(zs - zu - 2 * zom, zs, zu, 2 * zom)
    th = theta1_jet(0.0, L.tau, 3, ctl)
    half = -th[3] / (6.0 * th[1])
    e2 = eisenstein(L.tau, "E2", 0, ctl)
    out["zeta_e2"] = _rel(2 * half - PI ** 2 * e2 / 3, 2 * half, PI ** 2 * e2 / 3)
    e1, e2v, e3 = W(L.omega1, "P"), W(L.omega2, "P"), W(L.omega1 + L.omega2, "P")
    g2_e = 2 * (e1 ** 2 + e2v ** 2 + e3 ** 2)
    g3_e = 4 * e1 * e2v * e3
    g2_s = PI ** 4 * eisenstein(L.tau, "E4", 0, ctl) / (12 * L.omega1 ** 4)
    g3_s = PI ** 6 * eisenstein(L.tau, "E6", 0, ctl) / (216 * L.omega1 ** 6)
    out["g2_e4"] = _rel(g2_e - g2_s, g2_e, g2_s, e1 ** 2)
    out["g3_e6"] = _rel(g3_e - g3_s, g3_e, g3_s, e1 ** 3)
    return out


# ---------------------------------------------------------------------------
# The e_j differential equation
# ---------------------------------------------------------------------------

def _ej(tau: complex, j: int, ctl: SeriesControl) -> complex:
    """``e_j(tau) = P(half-period j)`` on the lattice ``Z + tau Z``."""
    L = lattice_invariants(0.5, tau / 2, ctl)
    point = {1: 0.5, 2: tau / 2, 3: (1 + tau) / 2}[j]
    return weierstrass(point, L, "P", ctl)


def ej_ode_residual(m, j: int, ctl: SeriesControl = DEFAULT_CONTROL,
                    spec: DerivSpec = DerivSpec(1e-2, 3)) -> float:
    """Residual of ``e_j'/(2 pi i) = -e_j^2/(2 pi^2) + E2 e_j / 6 + pi^2 E4 / 9``.

    ``e_j'`` is a finite-difference derivative in ``tau`` (adaptive step
    sweep starting at ``spec``), so the residual is limited by the
    difference scheme rather than by the series.
    """
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    tau = _tau(m)
    e = _ej(tau, j, ctl)
    de = adaptive_derivative_tensor(lambda v: _ej(complex(v[0]), j, ctl), [tau], 1, spec).tensor[0]
    e2 = eisenstein(tau, "E2", 0, ctl)
    e4 = eisenstein(tau, "E4", 0, ctl)
    lhs = de / TWO_PI_I
    terms = (-e * e / (2 * PI ** 2), e2 * e / 6, PI ** 2 * e4 / 9)
    return _rel(lhs - sum(terms), lhs, *terms)


def ej_side_checks(m, ctl: SeriesControl = DEFAULT_CONTROL) -> dict:
    """``e1 + e2 + e3 = 0`` and the swap ``e2(tau+1) = e3(tau)``, ``e3(tau+1) = e2(tau)``."""
    tau = _tau(m)
    e = [_ej(tau, j, ctl) for j in (1, 2, 3)]
    s = [_ej(tau + 1, j, ctl) for j in (2, 3)]
    return {
        "ej_sum": _rel(sum(e), *e),
        "ej_shift": max(_rel(s[0] - e[2], e[2]), _rel(s[1] - e[1], e[1])),
    }


# ---------------------------------------------------------------------------
# Genus-1 flat coordinates
# ---------------------------------------------------------------------------

def genus1_flat_coords(omega1, tau, c, ctl: SeriesControl = DEFAULT_CONTROL) -> dict:
    """Flat coordinates of the three genus-1 charts from lattice data.

    With ``zeta1 = zeta(omega1)`` on the lattice ``2 omega1 (Z + tau Z)``::

        t = (tau / (2 pi i), 1 / (sqrt2 omega1), c - zeta1 / omega1)
        x = (t2, c + 2 zeta1 / omega1, (sqrt2/6) g2 omega1 - 2 sqrt2 zeta1^2 / omega1)
        y = (t3, x3, g3 omega1^2 - g2 omega1 zeta1 + 4 zeta1^3 / omega1)

    The base point of the ``y`` chart is normalized so that ``y1 = t3``.

    Returns
    -------
    dict
        Keys ``t``, ``x``, ``y`` (numpy arrays) and ``residuals``, a dict
        measuring the cross-relations against the Eisenstein route:
        ``flat_x2`` (``x2 = t3 + (pi^2/2) t2^2 E2``), ``flat_x3``
        (``x3 = (i pi^3/3) t2^3 E2'``) and ``flat_y3``
        (``y3 = -(pi^4/6) t2^4 E2''``).

    Examples
    --------
    >>> r = genus1_flat_coords(0.5, 1j, 1.0)
    >>> round(abs(r["t"][1]) ** 2, 12)
    2.0
    """
    omega1, tau, c = complex(omega1), complex(tau), complex(c)
    if omega1 == 0:
        raise DomainError("omega1 must be nonzero")
    if tau.imag <= 0:
        raise DomainError("tau must lie in the upper half-plane")
    L = lattice_invariants(omega1, omega1 * tau, ctl)
    z1 = weierstrass(omega1, L, "Zeta", ctl)
    r2 = math.sqrt(2.0)
    t = np.array([tau / TWO_PI_I, 1.0 / (r2 * omega1), c - z1 / omega1])
    x3 = r2 / 6 * L.g2 * omega1 - 2 * r2 * z1 ** 2 / omega1
    x = np.array([t[1], c + 2 * z1 / omega1, x3])
    y = np.array([t[2], x3, L.g3 * omega1 ** 2 - L.g2 * omega1 * z1 + 4 * z1 ** 3 / omega1])
    e = [eisenstein(tau, "E2", k, ctl) for k in range(3)]
    rhs_x2 = t[2] + PI ** 2 / 2 * t[1] ** 2 * e[0]
    rhs_x3 = 1j * PI ** 3 / 3 * t[1] ** 3 * e[1]
    rhs_y3 = -PI ** 4 / 6 * t[1] ** 4 * e[2]
    residuals = {
        "flat_x2": _rel(x[1] - rhs_x2, x[1], rhs_x2, t[2]),
        "flat_x3": _rel(x[2] - rhs_x3, x[2], rhs_x3, r2 / 6 * L.g2 * omega1),
        "flat_y3": _rel(y[2] - rhs_y3, y[2], rhs_y3, L.g3 * omega1 ** 2, L.g2 * omega1 * z1),
    }
    return {"t": t, "x": x, "y": y, "residuals": residuals}


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def random_modulus(rng: np.random.Generator) -> complex:
    """``tau`` uniform in ``[-0.5, 0.5] + i [0.6, 2.0]``."""
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 2.0))


def random_lattice(rng: np.random.Generator, ctl: SeriesControl = DEFAULT_CONTROL) -> LatticeFrame:
    """Lattice with ``|omega1|`` in ``[0.3, 1]``, random phase and modulus as above."""
    omega1 = rng.uniform(0.3, 1.0) * np.exp(2j * PI * rng.uniform())
    return lattice_invariants(omega1, omega1 * random_modulus(rng), ctl)


def random_arguments(L: LatticeFrame, rng: np.random.Generator, guard: float = 0.05):
    """Two arguments ``u, v`` in the period cell, with ``u``, ``v``, ``u +- v``
    and ``2u`` at least ``guard`` (in units of ``2 omega1``) from the lattice."""
    tau = L.tau

    def dist(z):
        n = round(z.imag / tau.imag)
        z = z - n * tau
        z = z - round(z.real)
        return min(abs(z - (a + b * tau)) for a in (-1, 0, 1) for b in (-1, 0, 1))

    for _ in range(10000):
        a, b = rng.uniform(-0.5, 0.5, 2), rng.uniform(-0.5, 0.5, 2)
        zu, zv = a[0] + b[0] * tau, a[1] + b[1] * tau
        if min(dist(zu), dist(zv), dist(zu + zv), dist(zu - zv), dist(2 * zu), dist(2 * zv)) > guard:
            return 2 * L.omega1 * zu, 2 * L.omega1 * zv
    raise DomainError("could not sample Weierstrass arguments")
