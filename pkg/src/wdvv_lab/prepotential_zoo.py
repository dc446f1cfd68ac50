"""Closed-form prepotentials together with their verification metadata.

A family is addressed by a string identifier such as ``"G0_Phi0(2)"``,
``"G0_PhiJ(2,1)"``, ``"G1_Holo(2)"`` or ``"G1_3D_QPhi1(0.2+0.1i)"``. The
coordinate order is frozen: genus-0 families use positions ``0..2m-1`` for
indices ``1..2m``, genus-1 theta families use positions ``0..2m+1`` for
indices ``0..2m+1``, and the three-dimensional families use ``(t1, t2, t3)``,
``(x1, x2, x3)`` or ``(y1, y2, y3)``. In every case the metric is the
anti-diagonal matrix.

Logarithms are principal, so ``log(-1) = i*pi``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hurwitz_g0 as hg
from .errors import DomainError, InversionError, NonConvergent
from .special_fn import DEFAULT_CONTROL, SeriesControl, eisenstein, eisenstein_q, theta1_jet

PI = math.pi
TWO_PI_I = 2j * math.pi

__all__ = [
    "PrepotentialFamily",
    "FamilyMetadata",
    "FAMILY_NAMES",
    "make_family",
    "parse_complex",
    "eval_prepotential",
    "family_metadata",
    "sample_point",
    "phi1_to_phi23",
    "invert_e2prime",
    "invert_chi",
]

FAMILY_NAMES = (
    "G0_Phi0", "G0_PhiJ", "G0_Phi2mJ", "G0_M2_Remark", "G1_Holo", "G1_Holo_M1",
    "G1_3D_Phi1", "G1_3D_Phi2", "G1_3D_Phi3", "G1_3D_QPhi1", "G1_Holo_Q",
    "G1_3D_QPhi2", "G1_3D_QPhi3",
)

# Log-argument safety margin used by the samplers: every logarithm argument
# must keep |arg| < pi - margin so finite-difference stencils stay on one sheet.
_LOG_MARGIN = 0.25
# ... and modulus above this floor, so that the stencil stays well inside the
# disc of holomorphy around the point.
_LOG_FLOOR = 0.05


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_complex(text) -> complex:
    """Parse a complex literal written as ``a+bi``.

    Either part may be omitted and ``j`` is accepted in place of ``i``.

    Examples
    --------
    >>> parse_complex("0.2+0.1i")
    (0.2+0.1j)
    >>> parse_complex("-i")
    -1j
    """
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("i", "j")
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise DomainError(f"cannot parse complex literal {text!r}") from None


@dataclass(frozen=True)
class PrepotentialFamily:
    """One member of the zoo.

    Attributes
    ----------
    family_id : str
        Canonical identifier, e.g. ``"G0_PhiJ(2,1)"``.
    kind : str
        Family name without parameters.
    m, j : int or None
        Genus-0 / theta-family size and chart index.
    variant : str or None
        ``"F1"``, ``"F2"``, ``"F3"`` for ``G0_M2_Remark``; ``"corrected"`` or
        ``"printed"`` for the inverse-function families.
    q : complex or None
        Deformation parameter of the q-families.
    tau_seed : complex or None
        Default Newton seed for the inverse-function families.
    ctl : SeriesControl
        Series truncation control passed to the special functions.
    """

    family_id: str
    kind: str
    m: int | None = None
    j: int | None = None
    variant: str | None = None
    q: complex | None = None
    tau_seed: complex | None = None
    ctl: SeriesControl = field(default=DEFAULT_CONTROL, compare=False)

    @property
    def N(self) -> int:
        if self.kind in ("G0_Phi0", "G0_PhiJ", "G0_Phi2mJ"):
            return 2 * self.m
        if self.kind == "G0_M2_Remark":
            return 4
        if self.kind in ("G1_Holo", "G1_Holo_Q"):
            return 2 * self.m + 2
        if self.kind == "G1_Holo_M1":
            return 4
        return 3

    @property
    def eta(self) -> np.ndarray:
        return np.fliplr(np.eye(self.N)).astype(complex)

    def with_seed(self, tau_seed) -> "PrepotentialFamily":
        """Copy with a different default Newton seed."""
        return PrepotentialFamily(self.family_id, self.kind, self.m, self.j, self.variant,
                                  self.q, complex(tau_seed), self.ctl)


def make_family(spec, tau_seed=None, ctl: SeriesControl = DEFAULT_CONTROL) -> PrepotentialFamily:
    """Build a family from its identifier string.

    Parameters
    ----------
    spec : str or PrepotentialFamily
        ``"G0_Phi0(m)"``, ``"G0_PhiJ(m,j)"``, ``"G0_Phi2mJ(m,j)"``,
        ``"G0_M2_Remark(F1|F2|F3)"``, ``"G1_Holo(m)"``, ``"G1_Holo_M1"``,
        ``"G1_3D_Phi1"``, ``"G1_3D_Phi2[(variant)]"``,
        ``"G1_3D_Phi3[(variant)]"``, ``"G1_3D_QPhi1(q)"``,
        ``"G1_Holo_Q(m,q)"``, ``"G1_3D_QPhi2(q[,variant])"`` or
        ``"G1_3D_QPhi3(q[,variant])"``.
    tau_seed : complex, optional
        Newton seed for the inverse-function families (default ``1j``).

    Raises
    ------
    DomainError
        On an unknown name or bad parameters.
    """
    if isinstance(spec, PrepotentialFamily):
        return spec
    text = str(spec).replace(" ", "")
    mt = re.fullmatch(r"([A-Za-z0-9_]+)(?:\((.*)\))?", text)
    if not mt or mt.group(1) not in FAMILY_NAMES:
        raise DomainError(f"unknown prepotential family {spec!r}")
    kind = mt.group(1)
    args = [a for a in (mt.group(2) or "").split(",") if a != ""]

    def need(n_min, n_max=None):
        n_max = n_min if n_max is None else n_max
        if not n_min <= len(args) <= n_max:
            raise DomainError(f"{kind} takes {n_min}..{n_max} parameters, got {len(args)}")

    def pos_int(s, name):
        if not s.isdigit() or int(s) < 1:
            raise DomainError(f"{name} must be a positive integer, got {s!r}")
        return int(s)

    m = j = q = variant = None
    seed = None
    if kind == "G0_Phi0":
        need(1)
        m = pos_int(args[0], "m")
        if m < 2:
            raise DomainError("G0_Phi0 needs m >= 2")
        fid = f"{kind}({m})"
    elif kind in ("G0_PhiJ", "G0_Phi2mJ"):
        need(2)
        m, j = pos_int(args[0], "m"), pos_int(args[1], "j")
        if m < 2 or j > m:
            raise DomainError("need m >= 2 and 1 <= j <= m")
        fid = f"{kind}({m},{j})"
    elif kind == "G0_M2_Remark":
        need(1)
        variant = args[0]
        if variant not in ("F1", "F2", "F3"):
            raise DomainError("G0_M2_Remark variant must be F1, F2 or F3")
        m = 2
        fid = f"{kind}({variant})"
    elif kind == "G1_Holo":
        need(1)
        m = pos_int(args[0], "m")
        fid = f"{kind}({m})"
    elif kind == "G1_Holo_Q":
        need(2)
        m = pos_int(args[0], "m")
        q = parse_complex(args[1])
        fid = f"{kind}({m},{_fmt_c(q)})"
    elif kind in ("G1_Holo_M1", "G1_3D_Phi1"):
        need(0)
        m = 1 if kind == "G1_Holo_M1" else None
        fid = kind
    elif kind in ("G1_3D_Phi2", "G1_3D_Phi3"):
        need(0, 1)
        variant = args[0] if args else "corrected"
        seed = 1j
        fid = kind if variant == "corrected" else f"{kind}({variant})"
    elif kind == "G1_3D_QPhi1":
        need(1)
        q = parse_complex(args[0])
        fid = f"{kind}({_fmt_c(q)})"
    else:  # G1_3D_QPhi2 / G1_3D_QPhi3
        need(1, 2)
        q = parse_complex(args[0])
        variant = args[1] if len(args) == 2 else "corrected"
        seed = 1j
        fid = f"{kind}({_fmt_c(q)})" if variant == "corrected" else f"{kind}({_fmt_c(q)},{variant})"
    if variant is not None and kind not in ("G0_M2_Remark",) and variant not in ("corrected", "printed"):
        raise DomainError(f"variant must be 'corrected' or 'printed', got {variant!r}")
    if tau_seed is not None:
        seed = complex(tau_seed)
    return PrepotentialFamily(fid, kind, m, j, variant, q, seed, ctl)


def _fmt_c(z: complex) -> str:
    z = complex(z)
    return f"{z.real:g}{z.imag:+g}i"


# ---------------------------------------------------------------------------
# Logarithms
# ---------------------------------------------------------------------------

class _LogRecorder:
    """Principal logarithm that optionally remembers its arguments."""

    def __init__(self, record: bool = False):
        self.args = [] if record else None

    def __call__(self, z) -> complex:
        z = complex(z)
        if z == 0 or not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError("logarithm of zero or non-finite value")
        if self.args is not None:
            self.args.append(z)
        return cmath.log(z)

    def safe(self, margin: float = _LOG_MARGIN, floor: float = _LOG_FLOOR) -> bool:
        return all(abs(z) > floor and abs(cmath.phase(z)) < PI - margin for z in self.args)


_PLAIN_LOG = _LogRecorder()


# ---------------------------------------------------------------------------
# Genus-0 evaluators
# ---------------------------------------------------------------------------

def _g0_phi0(t, m, L):
    ts = [t[s - 1] for s in range(1, m + 1)]
    tp = [t[2 * m - s] for s in range(1, m + 1)]
    e = [cmath.exp(v) for v in ts]
    F = 0j
    for k in range(m):
        F += tp[k] * e[k] + 0.5 * tp[k] ** 2 * (ts[k] + L(tp[k]))
        for s in range(m):
            if s != k:
                F += 0.5 * tp[k] * tp[s] * L(e[s] - e[k])
    return F


def _g0_phij(x, m, j, L):
    # Positions: x_{j,r} at r-1 for r = 1..2m; primed x'_k = x_{j,2m+1-k}.
    xr = lambda r: x[r - 1]
    xp = lambda k: x[2 * m - k]
    others = [k for k in range(1, m + 1) if k != j]
    xjj = xr(j)
    F = 0.5 * xjj * xp(j) ** 2 + cmath.exp(xjj)
    for k in others:
        F += xp(j) * xp(k) * xr(k)
        F += xp(k) * (cmath.exp(xr(k)) - cmath.exp(xjj - xr(k)))
        F += 0.5 * xp(k) ** 2 * (xr(k) + L(xp(k)))
        for s in others:
            if s != k:
                F += 0.5 * xp(k) * xp(s) * L(cmath.exp(xr(s)) - cmath.exp(xr(k)))
    return F


def _g0_phi2mj(y, m, j, L):
    yr = lambda r: y[r - 1]
    yp = lambda k: y[2 * m - k]
    others = [k for k in range(1, m + 1) if k != j]
    yjj = yr(j)
    total_p = sum(yp(k) for k in range(1, m + 1))
    F = 0.5 * yjj ** 2 * yp(j) + 0.5 * total_p ** 2 * L(total_p)
    for k in others:
        F += yjj * yr(k) * yp(k) - 0.5 * yr(k) ** 2 * yp(k)
        F += 0.5 * yp(k) ** 2 * L(yp(k))
    for k in range(1, m + 1):
        for s in others:
            F -= yp(k) * yp(s) * L(yr(s))
    for k in others:
        for s in others:
            if s != k:
                F += 0.5 * yp(k) * yp(s) * L(yr(s) - yr(k))
                F -= yr(k) * yp(k) * yp(s) / (12.0 * (yr(k) - yr(s)))
    return F


def _g0_m2(v, variant, L):
    a, b, c, d = v
    if variant == "F1":
        return (d * cmath.exp(a) + c * cmath.exp(b)
                + 0.5 * (d ** 2 * a + d ** 2 * L(d) + c ** 2 * b + c ** 2 * L(c))
                + c * d * L(cmath.exp(a) - cmath.exp(b)) + 0.5j * PI * c * d)
    if variant == "F2":
        return (0.5 * a * d ** 2 + b * c * d + cmath.exp(a) + c * cmath.exp(b)
                - c * cmath.exp(a - b) + 0.5 * c ** 2 * b + 0.5 * c ** 2 * L(c))
    return (0.5 * a ** 2 * d + a * b * c - 0.5 * b ** 2 * c + 0.5 * (c + d) ** 2 * L(c + d)
            + 0.5 * c ** 2 * L(c) - (c + d) * c * L(b))


# ---------------------------------------------------------------------------
# Genus-1 theta evaluators
# ---------------------------------------------------------------------------

def _g1_holo(t, m, q, L, ctl):
    t0 = t[0]
    tk = [t[k] for k in range(1, m + 1)]
    tp = [t[2 * m + 1 - k] for k in range(1, m + 1)]
    top = t[2 * m + 1]
    D = 1.0 - TWO_PI_I * q * t0 if q else 1.0 + 0j
    if abs(D) < 1e-14:
        raise DomainError("1 - 2 i pi q t0 vanishes")
    tau = TWO_PI_I * t0 / D
    if tau.imag <= 0:
        raise DomainError(f"modulus {complex(tau)} is not in the upper half-plane")
    u = [v / D for v in tk]
    d0 = theta1_jet(0.0, tau, 1, ctl)[1]
    th = [theta1_jet(v, tau, 0, ctl)[0] for v in u]
    mixed = sum(a * b for a, b in zip(tk, tp))
    sp = sum(tp)
    F = 0.5 * top ** 2 * t0 + top * mixed
    F += 0.5 * sp ** 2 * L(sp / D)
    if q:
        F -= 1j * PI * q / D * mixed ** 2
    for k in range(m):
        F += 0.5 * tp[k] ** 2 * L(tp[k] / D)
        F -= tp[k] ** 2 * L(th[k] / d0)
        F -= 1.5 * tp[k] ** 2
        for s in range(m):
            if s != k:
                cross = theta1_jet(u[s] - u[k], tau, 0, ctl)[0]
                F += 0.5 * tp[s] * tp[k] * L(d0 * cross / (th[s] * th[k]))
                F += 0.25j * PI * tp[s] * tp[k]
                F -= 0.75 * tp[s] * tp[k]
    return F


def _g1_holo_m1(t, L, ctl):
    t0, t1, t2, t3 = t
    tau = TWO_PI_I * t0
    if tau.imag <= 0:
        raise DomainError(f"modulus {complex(tau)} is not in the upper half-plane")
    d0 = theta1_jet(0.0, tau, 1, ctl)[1]
    th = theta1_jet(t1, tau, 0, ctl)[0]
    return 0.5 * t3 ** 2 * t0 + t1 * t2 * t3 + t2 ** 2 * L(t2) - t2 ** 2 * L(th / d0) - 1.5 * t2 ** 2


# ---------------------------------------------------------------------------
# Three-dimensional genus-1 evaluators
# ---------------------------------------------------------------------------

def _e2(tau, q, order, ctl):
    """``E2`` (q is None) or ``E_{q,2}`` and its derivatives."""
    if q is None:
        return eisenstein(tau, "E2", order, ctl)
    return eisenstein_q(tau, q, "E2", order, ctl)


def _check_modulus(tau, q):
    if q is None:
        if tau.imag <= 0:
            raise DomainError(f"modulus {complex(tau)} is not in the upper half-plane")
        return
    w = 1.0 - q * tau
    if abs(w) < 1e-14 or (tau / w).imag <= 0:
        raise DomainError(f"deformed modulus {tau!r} is not admissible for q={q!r}")


def _g1_phi1(t, q, ctl):
    t1, t2, t3 = t
    tau = TWO_PI_I * t1
    _check_modulus(tau, q)
    return 0.5 * t3 ** 2 * t1 + 0.5 * t3 * t2 ** 2 + PI ** 2 / 24.0 * t2 ** 4 * _e2(tau, q, 0, ctl)


# Newton iterates are confined to this strip of Im(tau); the q-expansions
# converge slowly below it and the functions flatten out above it.
_NEWTON_IM_RANGE = (0.05, 8.0)


def _newton(g, tau0: complex, q, what: str, tol: float = 1e-14, max_iter: int = 50) -> complex:
    """Damped complex Newton iteration for ``g(tau) = 0``.

    ``g`` returns ``(value, derivative)``. A step that increases ``|value|``
    (or leaves the domain) is halved, up to 30 times.
    """
    tau = complex(tau0)
    try:
        val, der = g(tau)
    except (DomainError, NonConvergent) as exc:
        raise InversionError(f"{what}: seed {tau0!r} is not admissible") from exc
    for _ in range(max_iter):
        if der == 0:
            raise InversionError(f"{what}: zero derivative at {tau!r}")
        step = val / der
        lam = 1.0
        for _ in range(30):
            cand = tau - lam * step
            try:
                _check_modulus(cand, q)
                if not _NEWTON_IM_RANGE[0] < cand.imag < _NEWTON_IM_RANGE[1]:
                    raise DomainError("Newton iterate left the search strip")
                cval, cder = g(cand)
            except (DomainError, NonConvergent):
                cval = None
            if cval is not None and abs(cval) <= abs(val):
                break
            lam *= 0.5
        else:
            raise InversionError(f"{what}: damping failed at {tau!r}")
        tau, val, der = cand, cval, cder
        if abs(lam * step) <= tol * max(1.0, abs(tau)):
            return tau
    raise InversionError(f"{what}: no convergence in {max_iter} iterations from {tau0!r}")


def _invert(func, target: complex, tau_seed: complex, q, what: str, steps: int = 16) -> complex:
    """Solve ``func(tau)[0] = target`` near ``tau_seed``.

    A direct Newton solve is tried first. If it fails, the target is reached
    by continuation from ``func(tau_seed)`` in ``steps`` equal increments,
    each solved by Newton from the previous root. This keeps the root on the
    branch through the seed.
    """
    def make_g(c):
        scale = max(1.0, abs(c))

        def g(tau):
            val, der = func(tau)
            return (val - c) / scale, der / scale

        return g

    try:
        return _newton(make_g(target), tau_seed, q, what)
    except InversionError:
        pass
    try:
        start = func(complex(tau_seed))[0]
    except (DomainError, NonConvergent) as exc:
        raise InversionError(f"{what}: seed {tau_seed!r} is not admissible") from exc
    tau = complex(tau_seed)
    for k in range(1, steps + 1):
        tau = _newton(make_g(start + (target - start) * k / steps), tau, q, what)
    return tau


def invert_e2prime(target: complex, tau_seed: complex, q=None, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Solve ``E2'(tau) = target`` (or the deformed analogue) by Newton.

    Raises
    ------
    InversionError
        If neither direct Newton nor continuation from ``tau_seed``
        converges.
    """
    return _invert(lambda tau: (_e2(tau, q, 1, ctl), _e2(tau, q, 2, ctl)),
                   target, tau_seed, q, "inverse of E2'")


def invert_chi(target: complex, tau_seed: complex, q=None, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Solve ``chi(tau) = target`` with ``chi = E2''^3 / E2'^4`` by Newton.

    The derivative used is ``chi * (3 E2''' / E2'' - 4 E2'' / E2')``.
    """
    def chi(tau):
        d1, d2, d3 = (_e2(tau, q, k, ctl) for k in (1, 2, 3))
        if d1 == 0 or d2 == 0:
            raise DomainError("chi is singular where E2' or E2'' vanishes")
        c = (d2 / d1) ** 3 / d1
        return c, c * (3 * d3 / d2 - 4 * d2 / d1)

    return _invert(chi, target, tau_seed, q, "inverse of chi")


def _phi23_factor(variant: str) -> float:
    """Weight of the ``E2`` terms: ``pi^2`` for the corrected form, 1 for the printed variant."""
    return PI ** 2 if variant == "corrected" else 1.0


def _g1_phi2(x, q, variant, seed, ctl):
    x1, x2, x3 = x
    if x1 == 0:
        raise DomainError("x1 must be nonzero")
    tau = invert_e2prime(3 * x3 / (1j * PI ** 3 * x1 ** 3), seed, q, ctl)
    c = _phi23_factor(variant)
    return (x2 ** 3 / 6 + x1 * x2 * x3 + x3 ** 2 * tau / (4j * PI)
            - c * 2.0 / 15.0 * x1 ** 3 * x3 * _e2(tau, q, 0, ctl)
            - PI ** 4 / 180.0 * x1 ** 6 * _e2(tau, q, 2, ctl))


def _g1_phi3(y, q, variant, seed, ctl):
    y1, y2, y3 = y
    if y2 == 0 or y3 == 0:
        raise DomainError("y2 and y3 must be nonzero")
    tau = invert_chi(-8.0 / 3.0 * y3 ** 3 / y2 ** 4, seed, q, ctl)
    d1, d2 = _e2(tau, q, 1, ctl), _e2(tau, q, 2, ctl)
    if d2 == 0:
        raise DomainError("E2'' vanishes at the inverted modulus")
    # Branch-free form of (-6 y3)^(1/4) E2''^(-1/4) / pi.
    t2 = -2j * y3 * d1 / (PI * y2 * d2)
    c = _phi23_factor(variant)
    return (0.5 * y1 * y2 ** 2 + 0.5 * y1 ** 2 * y3 + y3 ** 2 * tau / (4j * PI)
            + 27.0 / 40.0 * y2 * y3 * t2
            + c * 9.0 / 80.0 * y2 ** 2 * t2 ** 2 * _e2(tau, q, 0, ctl))


def phi1_to_phi23(t, q=None, ctl: SeriesControl = DEFAULT_CONTROL):
    """Map a ``(t1, t2, t3)`` point to the ``x`` and ``y`` charts.

    Uses ``x1 = t2``, ``x2 = t3 + (pi^2/2) t2^2 E2``,
    ``x3 = y2 = (i pi^3/3) t2^3 E2'``, ``y1 = t3`` and
    ``y3 = -(pi^4/6) t2^4 E2''`` at ``tau = 2 pi i t1``.

    Returns
    -------
    x, y : numpy.ndarray
    tau : complex
    """
    t1, t2, t3 = (complex(v) for v in t)
    tau = TWO_PI_I * t1
    _check_modulus(tau, q)
    e0, e1, e2 = (_e2(tau, q, k, ctl) for k in (0, 1, 2))
    x3 = 1j * PI ** 3 / 3.0 * t2 ** 3 * e1
    x = np.array([t2, t3 + PI ** 2 / 2.0 * t2 ** 2 * e0, x3])
    y = np.array([t3, x3, -PI ** 4 / 6.0 * t2 ** 4 * e2])
    return x, y, tau


# ---------------------------------------------------------------------------
# Public evaluator
# ---------------------------------------------------------------------------

def _evaluate(fam: PrepotentialFamily, t: np.ndarray, tau_seed, L) -> complex:
    k = fam.kind
    ctl = fam.ctl
    if k == "G0_Phi0":
        return _g0_phi0(t, fam.m, L)
    if k == "G0_PhiJ":
        return _g0_phij(t, fam.m, fam.j, L)
    if k == "G0_Phi2mJ":
        return _g0_phi2mj(t, fam.m, fam.j, L)
    if k == "G0_M2_Remark":
        return _g0_m2(t, fam.variant, L)
    if k == "G1_Holo":
        return _g1_holo(t, fam.m, 0, L, ctl)
    if k == "G1_Holo_Q":
        return _g1_holo(t, fam.m, fam.q, L, ctl)
    if k == "G1_Holo_M1":
        return _g1_holo_m1(t, L, ctl)
    if k == "G1_3D_Phi1":
        return _g1_phi1(t, None, ctl)
    if k == "G1_3D_QPhi1":
        return _g1_phi1(t, fam.q, ctl)
    seed = complex(tau_seed if tau_seed is not None else (fam.tau_seed if fam.tau_seed is not None else 1j))
    q = fam.q if k.startswith("G1_3D_Q") else None
    if k in ("G1_3D_Phi2", "G1_3D_QPhi2"):
        return _g1_phi2(t, q, fam.variant, seed, ctl)
    return _g1_phi3(t, q, fam.variant, seed, ctl)


def eval_prepotential(fam, t, tau_seed=None) -> complex:
    """Value of the family's prepotential at ``t``.

    Parameters
    ----------
    fam : PrepotentialFamily or str
    t : array_like
        Complex coordinates of length ``N`` in the family's frozen order.
    tau_seed : complex, optional
        Newton seed for the inverse-function families; overrides
        ``fam.tau_seed``.

    Returns
    -------
    complex

    Raises
    ------
    DomainError
        Outside the domain (vanishing logarithm argument, modulus outside
        the upper half-plane, wrong length).
    InversionError
        If the Newton inversion of an inverse-function family fails.
    """
    fam = make_family(fam)
    v = np.asarray(t, dtype=complex).ravel()
    if v.size != fam.N:
        raise DomainError(f"{fam.family_id} expects {fam.N} coordinates, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise DomainError("coordinates must be finite")
    val = complex(_evaluate(fam, v, tau_seed, _PLAIN_LOG))
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise DomainError(f"{fam.family_id} is not finite at {v}")
    return val


# ---------------------------------------------------------------------------
# Metadata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyMetadata:
    """Verification data of a family.

    Attributes
    ----------
    N : int
    eta : numpy.ndarray
        Anti-diagonal metric.
    unit : int or callable
        Constant unit direction (position index) or a function returning
        the unit components at a point.
    euler : tuple of (float, float)
        Pairs ``(d, r)`` with ``E.t_a = d t_a + r``.
    degree : float
        Weight ``nu`` in ``E.F = nu F + Q``.
    quadratic_correction : callable
        ``Q(t)``.
    """

    N: int
    eta: np.ndarray
    unit: object
    euler: tuple
    degree: float
    quadratic_correction: Callable

    def unit_vector(self, t) -> np.ndarray:
        if callable(self.unit):
            return np.asarray(self.unit(t), dtype=complex)
        u = np.zeros(self.N, dtype=complex)
        u[self.unit] = 1.0
        return u


def _pair_quadratic(primed: list, diag: float, total: float) -> complex:
    """``diag * sum p^2 + total * (sum p)^2`` written for a list of primed coordinates."""
    p = np.asarray(primed, dtype=complex)
    return diag * np.sum(p ** 2) + total * np.sum(p) ** 2


def family_metadata(fam) -> FamilyMetadata:
    """Metric, unit, Euler data, degree and quadratic correction of a family."""
    fam = make_family(fam)
    k, m, j, N = fam.kind, fam.m, fam.j, fam.N
    eta = fam.eta
    zero = lambda t: 0j

    def genus0_q(t):
        # sum p^2 + 1/2 sum_{k != s} p_k p_s = 1/2 sum p^2 + 1/2 (sum p)^2
        p = [t[2 * m - s] for s in range(1, m + 1)]
        return _pair_quadratic(p, 0.5, 0.5)

    if k == "G0_Phi0":
        euler = tuple((0.0, 1.0) for _ in range(m)) + tuple((1.0, 0.0) for _ in range(m))
        return FamilyMetadata(N, eta, hg.phi0_unit, euler, 2.0, genus0_q)
    if k == "G0_PhiJ":
        euler = tuple((0.0, 1.0 + (r == j)) for r in range(1, m + 1)) + tuple((1.0, 0.0) for _ in range(m))
        return FamilyMetadata(N, eta, 2 * m - j, euler, 2.0, genus0_q)
    if k == "G0_Phi2mJ":
        euler = tuple((1.0, 0.0) for _ in range(m)) + tuple((2.0, 0.0) for _ in range(m))
        return FamilyMetadata(N, eta, j - 1, euler, 4.0, genus0_q)
    if k == "G0_M2_Remark":
        q2 = lambda t: t[2] ** 2 + t[2] * t[3] + t[3] ** 2
        if fam.variant == "F1":
            euler = ((0.0, 1.0), (0.0, 1.0), (1.0, 0.0), (1.0, 0.0))
            return FamilyMetadata(N, eta, hg.phi0_unit, euler, 2.0, q2)
        if fam.variant == "F2":
            euler = ((0.0, 2.0), (0.0, 1.0), (1.0, 0.0), (1.0, 0.0))
            return FamilyMetadata(N, eta, 3, euler, 2.0, q2)
        euler = ((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 0.0))
        return FamilyMetadata(N, eta, 0, euler, 4.0, q2)
    if k in ("G1_Holo", "G1_Holo_Q", "G1_Holo_M1"):
        euler = tuple((0.0, 0.0) for _ in range(m + 1)) + tuple((1.0, 0.0) for _ in range(m + 1))

        def holo_q(t):
            return _pair_quadratic([t[2 * m + 1 - s] for s in range(1, m + 1)], 0.5, 0.5)

        return FamilyMetadata(N, eta, 2 * m + 1, euler, 2.0, holo_q)
    if k in ("G1_3D_Phi1", "G1_3D_QPhi1"):
        return FamilyMetadata(N, eta, 2, ((0.0, 0.0), (0.5, 0.0), (1.0, 0.0)), 2.0, zero)
    if k in ("G1_3D_Phi2", "G1_3D_QPhi2"):
        return FamilyMetadata(N, eta, 1, ((0.5, 0.0), (1.0, 0.0), (1.5, 0.0)), 3.0, zero)
    return FamilyMetadata(N, eta, 0, ((1.0, 0.0), (1.5, 0.0), (2.0, 0.0)), 4.0, zero)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _random_tau(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.3))


def _annulus(rng, lo, hi) -> complex:
    return complex(rng.uniform(lo, hi) * cmath.exp(2j * PI * rng.uniform()))


def _log_safe(fam, t, seed) -> bool:
    rec = _LogRecorder(record=True)
    if isinstance(seed, np.ndarray):
        seed = None
    try:
        _evaluate(fam, np.asarray(t, dtype=complex), seed, rec)
    except (DomainError, InversionError):
        return False
    return rec.safe()


def sample_point(fam, rng: np.random.Generator, max_tries: int = 2000):
    """Draw an admissible point of a family.

    Boxes
    -----
    * Genus 0: flat coordinates of :func:`hurwitz_g0.random_covering` in the
      family's chart.
    * Genus-1 theta families: ``tau`` in ``[-0.3, 0.3] + i[0.8, 1.3]``,
      ``t0 = tau/(2 pi i)`` (the deformed modulus is placed in that box for
      ``G1_Holo_Q``), ``|t_k|`` in ``[0.1, 0.4]`` with pairwise distances at
      least 0.1.
    * Three-dimensional families: ``tau`` in the same box, ``|t2|`` in
      ``[0.3, 0.8]``, ``|t3| <= 0.5``. The inverse-function families take
      ``|t2|`` in ``[0.8, 1.5]`` instead, so that the inverted ratios are
      well conditioned, and map the point to the ``x``/``y`` charts by
      :func:`phi1_to_phi23`.

    Every logarithm argument keeps ``|arg| < pi - 0.25`` and modulus above
    0.05.

    Returns
    -------
    coords : numpy.ndarray
    seed : complex or numpy.ndarray
        For genus-1 families the modulus that generated the point (the
        Newton seed of the inverse-function families). For genus-0 families
        the Phi0 chart of the same covering, which seeds chart inversions.
    """
    fam = make_family(fam)
    k = fam.kind
    for _ in range(max_tries):
        seed = None
        if k.startswith("G0_"):
            m = fam.m
            cov = hg.random_covering(m, rng)
            if k == "G0_Phi0" or (k == "G0_M2_Remark" and fam.variant == "F1"):
                cid = "Phi0"
            elif k == "G0_PhiJ" or fam.variant == "F2":
                cid = f"PhiJ({fam.j or 1})"
            else:
                cid = f"Phi2mJ({fam.j or 1})"
            t = hg.flat_chart(cov, cid).coords
            seed = hg.flat_chart(cov, "Phi0").coords
        elif k in ("G1_Holo", "G1_Holo_Q", "G1_Holo_M1"):
            m = fam.m
            tau = _random_tau(rng)
            seed = tau
            if k == "G1_Holo_Q":
                t0 = tau / (TWO_PI_I * (1.0 + fam.q * tau))
            else:
                t0 = tau / TWO_PI_I
            tk = [_annulus(rng, 0.1, 0.4) for _ in range(m)]
            if any(abs(a - b) < 0.1 for i, a in enumerate(tk) for b in tk[:i]):
                continue
            tp = [_annulus(rng, 0.1, 0.4) for _ in range(m)]
            t = np.array([t0] + tk + tp[::-1] + [_annulus(rng, 0.1, 0.4)])
        else:
            tau = _random_tau(rng)
            q = fam.q if k.startswith("G1_3D_Q") else None
            tau_q = tau / (1.0 + q * tau) if q else tau
            inverse = k in ("G1_3D_Phi2", "G1_3D_QPhi2", "G1_3D_Phi3", "G1_3D_QPhi3")
            r2 = (0.8, 1.5) if inverse else (0.3, 0.8)
            t = np.array([tau_q / TWO_PI_I, _annulus(rng, *r2), _annulus(rng, 0.0, 0.5)])
            seed = tau_q
            if inverse:
                x, y, _ = phi1_to_phi23(t, q, fam.ctl)
                t = x if "Phi2" in k else y
        if _log_safe(fam, t, seed):
            return np.asarray(t, dtype=complex), seed
    raise DomainError(f"could not sample an admissible point for {fam.family_id}")
