"""Genus-zero Hurwitz spaces of rational coverings with simple poles.

A covering is ``lambda(z) = b0/z + sum_k b_k/(z - a_k)`` with ``a_0 = 0``,
distinct nonzero poles ``a_1..a_m`` and nonzero residues summing to one.
Its critical points are the roots of the monic degree-2m polynomial
``f_2m(z) = sum_k b_k prod_{j != k} (z - a_j)^2``.

Three families of flat coordinates are provided, all indexed ``1..2m`` and
stored 0-based (index ``A`` lives at position ``A - 1``):

* ``Phi0``: ``t_s = log(b0) - log(a_s)``, ``t_{2m+1-s} = -b_s/a_s``;
* ``PhiJ(j)``: the coordinates ``x_{j,.}`` of the third-kind differential
  ``phi_j = dz/(z - a_j) - dz/z``;
* ``Phi2mJ(j)``: the coordinates ``y_{j,.}`` of the second-kind
  differential ``phi_{2m+1-j} = b_j dz/(z - a_j)^2``.

Per-point values of differentials are only exposed through the rational
coefficients ``f_X(z)`` (with ``X = f_X(z) dz``), and every pairing is a
product or ratio of those, so no square-root branch is ever chosen.
Logarithms are principal, which fixes ``log(-1) = i*pi``.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCovering, DomainError, InversionError, SingularJacobian
from .numdiff import DerivSpec, derivative_tensor

__all__ = [
    "RationalCovering",
    "BranchData",
    "ChartId",
    "FlatChart",
    "parse_chart_id",
    "parse_differential",
    "critical_data",
    "flat_chart",
    "chart_from_phi0",
    "phi0_from_chart",
    "phi0_to_covering",
    "differential_coefficient",
    "gram_pairing",
    "gram_matrix",
    "intersection_closed_form",
    "lambda_jacobian",
    "lambda_jacobian_closed_form",
    "lambda_jacobian_residual",
    "unit_action_residual",
    "chart_composition_residual",
    "phi0_unit",
    "generic_prepotential",
    "generic_in_chart",
    "random_covering",
    "phi0_hessian_closed_form",
    "sum_rule_residuals",
]


# ---------------------------------------------------------------------------
# Coverings and critical data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalCovering:
    """A genus-zero covering ``lambda(z) = b0/z + sum_k b_k/(z - a_k)``.

    Parameters
    ----------
    a : sequence of complex
        Poles ``a_1..a_m`` (``a_0 = 0`` is implicit).
    b : sequence of complex
        Residues ``b_0..b_m``; they must sum to one.
    """

    a: np.ndarray
    b: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex).ravel()
        b = np.asarray(self.b, dtype=complex).ravel()
        m = a.size
        if m < 2:
            raise DomainError("a covering needs m >= 2 nonzero poles")
        if b.size != m + 1:
            raise DomainError("expected m+1 residues b_0..b_m")
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.any(np.abs(a) < 1e-12 * scale):
            raise DegenerateCovering("poles a_1..a_m must be nonzero")
        diffs = np.abs(a[:, None] - a[None, :]) + np.eye(m) * scale
        if np.min(diffs) < 1e-12 * scale:
            raise DegenerateCovering("poles must be pairwise distinct")
        if np.any(b == 0):
            raise DomainError("residues must be nonzero")
        if abs(b.sum() - 1.0) > 1e-10 * max(1.0, float(np.sum(np.abs(b)))):
            raise DomainError("residues must sum to one")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)

    @classmethod
    def from_params(cls, params) -> "RationalCovering":
        """Build from ``(a_1..a_m, b_1..b_m)`` with ``b_0 = 1 - sum b_k``."""
        p = np.asarray(params, dtype=complex).ravel()
        m = p.size // 2
        b_rest = p[m:]
        return cls(p[:m], np.concatenate([[1.0 - b_rest.sum()], b_rest]))

    @property
    def params(self) -> np.ndarray:
        """The ``2m`` free parameters ``(a_1..a_m, b_1..b_m)``."""
        return np.concatenate([self.a, self.b[1:]])

    @property
    def poles(self) -> np.ndarray:
        """All poles ``a_0 = 0, a_1..a_m``."""
        return np.concatenate([[0j], self.a])

    def f2m_coefficients(self) -> np.ndarray:
        """Coefficients of ``f_2m``, highest degree first."""
        poles = self.poles
        coeffs = np.zeros(2 * self.m + 1, dtype=complex)
        for k in range(self.m + 1):
            poly = np.array([1.0 + 0j])
            for j in range(self.m + 1):
                if j != k:
                    poly = np.polymul(poly, [1.0, -2.0 * poles[j], poles[j] ** 2])
            coeffs += self.b[k] * poly
        return coeffs

    def lam(self, z):
        """The covering map."""
        z = np.asarray(z, dtype=complex)
        return sum(bk / (z - ak) for ak, bk in zip(self.poles, self.b))

    def lam2(self, z):
        """Second derivative of the covering map."""
        z = np.asarray(z, dtype=complex)
        return sum(2.0 * bk / (z - ak) ** 3 for ak, bk in zip(self.poles, self.b))


@dataclass(frozen=True)
class BranchData:
    """Critical points, branch points and ``lambda''`` at the critical points."""

    alpha: np.ndarray
    lam: np.ndarray
    lambda2nd: np.ndarray
    residual: float


def _durand_kerner(coeffs: np.ndarray, tol: float, max_iter: int = 2000) -> np.ndarray:
    """All roots of a monic polynomial by simultaneous (Weierstrass) iteration."""
    n = coeffs.size - 1
    # Fujiwara's bound on the root moduli sets the radius of the start circle.
    radius = 2.0 * max(abs(coeffs[i]) ** (1.0 / i) for i in range(1, n + 1))
    radius = max(radius, 1e-3)
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        num = np.polyval(coeffs, z)
        den = np.prod(z[:, None] - z[None, :] + np.eye(n), axis=1)
        step = num / den
        z = z - step
        if np.max(np.abs(step)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def _newton_polish(coeffs: np.ndarray, z: np.ndarray, iters: int = 8) -> np.ndarray:
    dcoeffs = np.polyder(coeffs)
    z = z.copy()
    for _ in range(iters):
        d = np.polyval(dcoeffs, z)
        safe = d != 0
        step = np.zeros_like(z)
        step[safe] = np.polyval(coeffs, z[safe]) / d[safe]
        z = z - step
        if np.max(np.abs(step)) <= 1e-16 * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def _check_branch(cov: RationalCovering, alpha: np.ndarray, root_tol: float, margin: float) -> BranchData:
    n = alpha.size
    scale = max(1.0, float(np.max(np.abs(alpha))))
    sep = np.where(np.eye(n, dtype=bool), np.inf, np.abs(alpha[:, None] - alpha[None, :]))
    if np.min(sep) < max(10.0 * root_tol, margin) * scale:
        raise DegenerateCovering("critical points collide")
    if np.min(np.abs(alpha)) < margin * scale:
        raise DegenerateCovering("a critical point sits at the pole z = 0")
    if np.min(np.abs(alpha[:, None] - cov.a[None, :])) < margin * scale:
        raise DegenerateCovering("a critical point sits at a pole")
    lam = cov.lam(alpha)
    lscale = max(1.0, float(np.max(np.abs(lam))))
    lsep = np.where(np.eye(n, dtype=bool), np.inf, np.abs(lam[:, None] - lam[None, :]))
    if np.min(lsep) < margin * lscale:
        raise DegenerateCovering("branch points collide")
    lam2 = cov.lam2(alpha)
    if np.min(np.abs(lam2)) == 0:
        raise DegenerateCovering("a critical point is not simple")
    coeffs = cov.f2m_coefficients()
    res = float(np.max(np.abs(np.polyval(coeffs, alpha)))) / float(np.linalg.norm(coeffs))
    return BranchData(alpha, lam, lam2, res)


def critical_data(cov: RationalCovering, root_tol: float = 1e-12, margin: float = 1e-6) -> BranchData:
    """Critical points and branch points of a covering.

    Parameters
    ----------
    cov : RationalCovering
    root_tol : float
        Convergence tolerance of the simultaneous iteration; roots closer
        than ``10 * root_tol`` (relative) count as collided.
    margin : float
        Relative admissibility margin for root and branch-point separation.

    Returns
    -------
    BranchData

    Raises
    ------
    DegenerateCovering
        On colliding critical or branch points, or a critical point at a pole.
    """
    coeffs = cov.f2m_coefficients()
    alpha = _newton_polish(coeffs, _durand_kerner(coeffs, root_tol))
    return _check_branch(cov, alpha, root_tol, margin)


def _track_roots(cov: RationalCovering, seed: np.ndarray, root_tol: float = 1e-12) -> BranchData:
    """Critical data of a nearby covering, continuing each root by Newton."""
    coeffs = cov.f2m_coefficients()
    alpha = _newton_polish(coeffs, seed, iters=30)
    return _check_branch(cov, alpha, root_tol, 0.0)


def random_covering(m: int, rng: np.random.Generator, max_tries: int = 1000,
                    log_safe: bool = True) -> RationalCovering:
    """Draw an admissible covering with well separated data.

    Poles lie in the annulus ``0.5 <= |a| <= 2`` and residues ``b_1..b_m``
    have modulus in ``[0.2, 0.6]``. With ``log_safe`` the Phi0 and cross
    charts are also required to keep every logarithm argument away from the
    negative real axis, so that finite-difference stencils never straddle a
    branch cut.
    """
    for _ in range(max_tries):
        a = rng.uniform(0.5, 2.0, m) * np.exp(2j * np.pi * rng.uniform(0, 1, m))
        b = rng.uniform(0.2, 0.6, m) * np.exp(2j * np.pi * rng.uniform(0, 1, m))
        b0 = 1.0 - b.sum()
        if abs(b0) < 0.2:
            continue
        if np.min(np.abs(a[:, None] - a[None, :]) + 10 * np.eye(m)) < 0.3:
            continue
        try:
            cov = RationalCovering(a, np.concatenate([[b0], b]))
            bd = critical_data(cov)
        except DegenerateCovering:
            continue
        if np.min(np.abs(bd.alpha[:, None] - bd.alpha[None, :]) + 10 * np.eye(2 * m)) < 0.05:
            continue
        if np.min(np.abs(bd.lam[:, None] - bd.lam[None, :]) + 10 * np.eye(2 * m)) < 0.05:
            continue
        if log_safe and not _phi0_log_safe(cov):
            continue
        return cov
    raise DegenerateCovering("could not draw an admissible covering")


def _safe_arg(z: complex, margin: float = 0.25) -> bool:
    return abs(z) > 1e-3 and abs(cmath.phase(z)) < np.pi - margin


def _phi0_log_safe(cov: RationalCovering) -> bool:
    m = cov.m
    b0 = cov.b[0]
    if not _safe_arg(b0):
        return False
    if not all(_safe_arg(ak) for ak in cov.a):
        return False
    t = flat_chart(cov, "Phi0").coords
    tp = np.array([t[2 * m - s] for s in range(1, m + 1)])
    if not all(_safe_arg(v) for v in tp):
        return False
    e = np.exp(t[:m])
    for k in range(m):
        for s in range(m):
            if s != k and not _safe_arg(e[s] - e[k]):
                return False
    # The cross charts take further logarithms of their own coordinates.
    for j in range(1, m + 1):
        x = chart_from_phi0(t, ChartId("PhiJ", j))
        y = chart_from_phi0(t, ChartId("Phi2mJ", j))
        for s in range(1, m + 1):
            if s != j:
                if not _safe_arg(x[2 * m - s]) or not _safe_arg(y[s - 1]):
                    return False
                for r in range(1, m + 1):
                    if r not in (s, j) and not (_safe_arg(y[r - 1] - y[s - 1])
                                                and _safe_arg(np.exp(x[r - 1]) - np.exp(x[s - 1]))):
                        return False
            if not _safe_arg(y[2 * m - s]) and s != j:
                return False
        if not _safe_arg(sum(y[2 * m - s] for s in range(1, m + 1))):
            return False
    return True


# ---------------------------------------------------------------------------
# Flat charts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartId:
    """Name of a flat chart: ``Phi0``, ``PhiJ`` or ``Phi2mJ`` with index ``j``."""

    kind: str
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("Phi0", "PhiJ", "Phi2mJ"):
            raise DomainError(f"unknown chart kind {self.kind!r}")
        if self.kind == "Phi0" and self.j != 0:
            raise DomainError("Phi0 takes no index")
        if self.kind != "Phi0" and self.j < 1:
            raise DomainError("chart index j must be >= 1")

    def __str__(self):
        return "Phi0" if self.kind == "Phi0" else f"{self.kind}({self.j})"

    def differential(self, m: int) -> str:
        """Identifier of the differential whose metric this chart flattens."""
        if self.kind == "Phi0":
            return "phi0"
        if self.kind == "PhiJ":
            return f"phi{self.j}"
        return f"phi{2 * m + 1 - self.j}"


def parse_chart_id(chart) -> ChartId:
    """Accept a :class:`ChartId` or a string such as ``"PhiJ(2)"``."""
    if isinstance(chart, ChartId):
        return chart
    text = str(chart).replace(" ", "")
    if text == "Phi0":
        return ChartId("Phi0")
    mt = re.fullmatch(r"(PhiJ|Phi2mJ)\((\d+)\)", text)
    if not mt:
        raise DomainError(f"cannot parse chart id {chart!r}")
    return ChartId(mt.group(1), int(mt.group(2)))


@dataclass(frozen=True)
class FlatChart:
    """Coordinates of one flat chart, positions ``0..2m-1`` for indices ``1..2m``."""

    chart_id: ChartId
    coords: np.ndarray

    @property
    def m(self) -> int:
        return self.coords.size // 2


def _log(z: complex) -> complex:
    if z == 0:
        raise DomainError("logarithm of zero")
    return cmath.log(z)


def flat_chart(cov: RationalCovering, chart_id) -> FlatChart:
    """Flat coordinates of a covering in the requested chart.

    The Phi0 chart comes straight from the covering data; the other two are
    the closed-form functions of the Phi0 chart (see
    :func:`chart_from_phi0`).

    Raises
    ------
    DomainError
        If ``j`` is out of range or a logarithm argument vanishes.
    """
    cid = parse_chart_id(chart_id)
    m = cov.m
    if cid.j > m:
        raise DomainError(f"chart index {cid.j} exceeds m={m}")
    t = np.zeros(2 * m, dtype=complex)
    lb0 = _log(cov.b[0])
    for s in range(1, m + 1):
        t[s - 1] = lb0 - _log(cov.a[s - 1])
        t[2 * m - s] = -cov.b[s] / cov.a[s - 1]
    if cid.kind == "Phi0":
        return FlatChart(cid, t)
    return FlatChart(cid, chart_from_phi0(t, cid))


class _Phi0View:
    """Cross-chart functions ``x_{k,.}``, ``y_{k,.}`` of a Phi0 point (1-based)."""

    def __init__(self, t):
        self.t = np.asarray(t, dtype=complex)
        self.m = m = self.t.size // 2
        self.e = np.exp(self.t[:m])

    def ts(self, s):
        return self.t[s - 1]

    def tp(self, s):
        """``t_{2m+1-s}``."""
        return self.t[2 * self.m - s]

    def x(self, k, r):
        """``x_{k,r}`` for ``r`` in ``1..2m``."""
        m = self.m
        if r <= m:
            if r == k:
                return self.ts(k) + _log(self.tp(k))
            return _log(self.e[r - 1] - self.e[k - 1])
        s = 2 * m + 1 - r
        if s != k:
            return self.tp(s) * self.e[s - 1] / (self.e[s - 1] - self.e[k - 1])
        return (self.e[k - 1] + sum(self.tp(q) for q in range(1, m + 1))
                - sum(self.x(k, 2 * m + 1 - q) for q in range(1, m + 1) if q != k))

    def y(self, k, r):
        """``y_{k,r}`` for ``r`` in ``1..2m``."""
        m = self.m
        if r <= m:
            if r != k:
                return self.tp(k) * self.e[k - 1] / (self.e[k - 1] - self.e[r - 1])
            return self.x(k, 2 * m + 1 - k)
        s = 2 * m + 1 - r
        if s != k:
            return (self.tp(k) * self.tp(s) * self.e[k - 1] * self.e[s - 1]
                    / (self.e[k - 1] - self.e[s - 1]) ** 2)
        return self.tp(k) * self.e[k - 1] - sum(self.y(k, 2 * m + 1 - q) for q in range(1, m + 1) if q != k)


def chart_from_phi0(t, chart_id) -> np.ndarray:
    """Map a Phi0 point to the PhiJ or Phi2mJ chart by the closed forms."""
    cid = parse_chart_id(chart_id)
    view = _Phi0View(t)
    m = view.m
    if cid.kind == "Phi0":
        return view.t.copy()
    if not 1 <= cid.j <= m:
        raise DomainError(f"chart index {cid.j} out of range")
    get = view.x if cid.kind == "PhiJ" else view.y
    return np.array([get(cid.j, r) for r in range(1, 2 * m + 1)], dtype=complex)


def _near_log(z: complex, ref: complex) -> complex:
    """Branch of ``log z`` closest to ``ref``."""
    w = _log(z)
    return w + 2j * np.pi * round((ref - w).imag / (2 * np.pi))


def _scalar_newton(g, e0: complex, what: str, tol: float = 1e-13, max_iter: int = 60) -> complex:
    """Newton iteration with a central-difference slope.

    Converges once the step is below ``tol`` relative to ``|e|``; once the
    steps stop shrinking at the rounding floor the last iterate is accepted.
    """
    e = e0
    prev = np.inf
    for _ in range(max_iter):
        h = 1e-7 * max(1.0, abs(e))
        val = g(e)
        dval = (g(e + h) - g(e - h)) / (2 * h)
        if dval == 0:
            raise InversionError(f"{what}: zero derivative")
        step = val / dval
        e = e - step
        size = abs(step) / max(1.0, abs(e))
        if size <= tol or (size <= 1e-11 and size >= 0.5 * prev):
            return e
        prev = size
    raise InversionError(f"{what}: Newton did not converge")


def phi0_from_chart(coords, chart_id, t_seed, steps: int = 16) -> np.ndarray:
    """Invert :func:`chart_from_phi0` near a known Phi0 point ``t_seed``.

    The inversion reduces to one scalar equation in ``E = exp(t_j)`` solved
    by Newton from the seed; logarithm branches are chosen closest to the
    seed. If Newton fails from the seed, the target coordinates are reached
    by continuation along the straight segment from the chart image of the
    seed, in ``steps`` increments.
    """
    try:
        return _phi0_from_chart(coords, chart_id, t_seed)
    except InversionError:
        pass
    cid = parse_chart_id(chart_id)
    c1 = np.asarray(coords, dtype=complex)
    t = np.asarray(t_seed, dtype=complex)
    c0 = chart_from_phi0(t, cid)
    for k in range(1, steps + 1):
        t = _phi0_from_chart(c0 + (c1 - c0) * k / steps, cid, t)
    return t


def _phi0_from_chart(coords, chart_id, t_seed) -> np.ndarray:
    cid = parse_chart_id(chart_id)
    c = np.asarray(coords, dtype=complex)
    seed = np.asarray(t_seed, dtype=complex)
    m = c.size // 2
    if cid.kind == "Phi0":
        return c.copy()
    j = cid.j
    others = [s for s in range(1, m + 1) if s != j]
    pos = lambda r: r - 1  # noqa: E731
    t = np.zeros(2 * m, dtype=complex)
    if cid.kind == "PhiJ":
        ex = {s: np.exp(c[pos(s)]) for s in others}
        xp = {s: c[pos(2 * m + 1 - s)] for s in range(1, m + 1)}
        exjj = np.exp(c[pos(j)])

        def g(e):
            return (e + exjj / e + sum(xp[s] * ex[s] / (e + ex[s]) for s in others)
                    - sum(xp[s] for s in others) - xp[j])

        e = _scalar_newton(g, np.exp(seed[j - 1]), "PhiJ inversion")
        t[j - 1] = _near_log(e, seed[j - 1])
        t[2 * m - j] = exjj / e
        for s in others:
            es = e + ex[s]
            t[s - 1] = _near_log(es, seed[s - 1])
            t[2 * m - s] = xp[s] * ex[s] / es
        return t
    # Phi2mJ
    y = {r: c[pos(r)] for r in range(1, 2 * m + 1)}
    p = sum(y[2 * m + 1 - s] for s in range(1, m + 1))

    def parts(e):
        es = {s: e - p / y[s] for s in others}
        tps = {s: y[2 * m + 1 - s] * p / (y[s] ** 2 * es[s]) for s in others}
        return es, tps

    def g(e):
        es, tps = parts(e)
        tpj = p / e
        cross = sum(-tps[s] * es[s] * y[s] / p for s in others)
        return e + tpj + sum(tps.values()) - cross - y[j]

    e = _scalar_newton(g, np.exp(seed[j - 1]), "Phi2mJ inversion")
    es, tps = parts(e)
    t[j - 1] = _near_log(e, seed[j - 1])
    t[2 * m - j] = p / e
    for s in others:
        t[s - 1] = _near_log(es[s], seed[s - 1])
        t[2 * m - s] = tps[s]
    return t


def phi0_to_covering(t) -> RationalCovering:
    """Recover the covering from its Phi0 chart.

    Uses ``a_j = b0 exp(-t_j)``, ``b_j = -b0 t_{2m+1-j} exp(-t_j)`` and
    ``1/b0 = 1 - sum_r t_{2m+1-r} exp(-t_r)``.
    """
    t = np.asarray(t, dtype=complex)
    m = t.size // 2
    tp = np.array([t[2 * m - s] for s in range(1, m + 1)])
    em = np.exp(-t[:m])
    denom = 1.0 - np.sum(tp * em)
    if denom == 0:
        raise DomainError("Phi0 point has no covering (b0 would be infinite)")
    b0 = 1.0 / denom
    return RationalCovering(b0 * em, np.concatenate([[b0], -b0 * tp * em]))


def phi0_unit(t) -> np.ndarray:
    """Components of the unit field in the Phi0 chart.

    ``e^{t_s} = exp(-t_s)/D`` and ``e^{t_{2m+1-s}} = -t_{2m+1-s} exp(-t_s)/D``
    with ``D = 1 - sum_r t_{2m+1-r} exp(-t_r)``.
    """
    t = np.asarray(t, dtype=complex)
    m = t.size // 2
    u = np.zeros(2 * m, dtype=complex)
    em = np.exp(-t[:m])
    tp = np.array([t[2 * m - s] for s in range(1, m + 1)])
    d = 1.0 - np.sum(tp * em)
    for s in range(1, m + 1):
        u[s - 1] = em[s - 1] / d
        u[2 * m - s] = -tp[s - 1] * em[s - 1] / d
    return u


# ---------------------------------------------------------------------------
# Differentials, Gram pairings and the canonical-coordinate Jacobian
# ---------------------------------------------------------------------------

def parse_differential(name, m: int) -> int:
    """Index ``0..2m`` of a differential given as ``phi<k>`` or ``s<i>``.

    ``s<i>`` is an alias of the third-kind differential ``phi<i>``
    (``1 <= i <= m``).
    """
    if isinstance(name, (int, np.integer)):
        k = int(name)
    else:
        mt = re.fullmatch(r"(phi|s)(\d+)", str(name).strip())
        if not mt:
            raise DomainError(f"cannot parse differential id {name!r}")
        k = int(mt.group(2))
        if mt.group(1) == "s" and not 1 <= k <= m:
            raise DomainError(f"alias s{k} needs 1 <= i <= m")
    if not 0 <= k <= 2 * m:
        raise DomainError(f"differential index {k} out of range 0..{2 * m}")
    return k


def differential_coefficient(cov: RationalCovering, which, z):
    """Rational coefficient ``f_X(z)`` of a primary differential ``X = f_X dz``.

    ``phi0 = -dz/z``; ``phi_k = dz/(z - a_k) - dz/z`` and
    ``phi_{2m+1-k} = b_k dz/(z - a_k)^2`` for ``k = 1..m``.
    """
    m = cov.m
    k = parse_differential(which, m)
    z = np.asarray(z, dtype=complex)
    if k == 0:
        return -1.0 / z
    if k <= m:
        return 1.0 / (z - cov.a[k - 1]) - 1.0 / z
    kk = 2 * m + 1 - k
    return cov.b[kk] / (z - cov.a[kk - 1]) ** 2


def gram_pairing(cov: RationalCovering, bd: BranchData, A, B, beta=(0.0, 1.0)) -> complex:
    """Residue pairing ``sum_j (beta1 lambda_j + beta2) f_A f_B / lambda''`` at the critical points.

    With ``beta = (0, 1)`` this is the inverse flat metric; with
    ``beta = (1, 0)`` it is the intersection form.

    Raises
    ------
    DomainError
        If ``beta = (1, 0)`` and some branch point vanishes.
    """
    b1, b2 = complex(beta[0]), complex(beta[1])
    if b1 != 0 and b2 == 0 and np.min(np.abs(bd.lam)) < 1e-14 * max(1.0, float(np.max(np.abs(bd.lam)))):
        raise DomainError("a branch point vanishes")
    fa = differential_coefficient(cov, A, bd.alpha)
    fb = differential_coefficient(cov, B, bd.alpha)
    return complex(np.sum((b1 * bd.lam + b2) * fa * fb / bd.lambda2nd))


def gram_matrix(cov: RationalCovering, bd: BranchData, beta=(0.0, 1.0)) -> np.ndarray:
    """Pairings of ``phi_1..phi_2m`` as a ``2m x 2m`` matrix."""
    m = cov.m
    ids = range(1, 2 * m + 1)
    return np.array([[gram_pairing(cov, bd, a, b, beta) for b in ids] for a in ids])


def intersection_closed_form(cov: RationalCovering) -> np.ndarray:
    """Closed form ``(d_A + d_B) t^A(phi_B) + r_AB`` of the intersection form.

    Here ``t^A(phi_B)`` is coordinate ``A`` of the chart flattening
    ``phi_B``, ``d_A = 0`` for ``A <= m`` and 1 otherwise, and
    ``r_AB = 1 + delta_AB`` when both ``A, B <= m`` (zero otherwise).
    """
    m = cov.m
    t = flat_chart(cov, "Phi0").coords
    charts = {}
    for b in range(1, 2 * m + 1):
        cid = ChartId("PhiJ", b) if b <= m else ChartId("Phi2mJ", 2 * m + 1 - b)
        charts[b] = chart_from_phi0(t, cid)
    g = np.zeros((2 * m, 2 * m), dtype=complex)
    for a in range(1, 2 * m + 1):
        for b in range(1, 2 * m + 1):
            d = (a > m) + (b > m)
            r = (1.0 + (a == b)) if (a <= m and b <= m) else 0.0
            g[a - 1, b - 1] = d * charts[b][a - 1] + r
    return g


def _chart_of_params(params, cid: ChartId) -> np.ndarray:
    return flat_chart(RationalCovering.from_params(params), cid).coords


def _unwrap(d: np.ndarray) -> np.ndarray:
    """Remove ``2 pi i`` jumps produced by a log branch cut between stencil nodes."""
    return d - 2j * np.pi * np.round(d.imag / (2 * np.pi))


def _param_jacobians(cov: RationalCovering, cid: ChartId, bd: BranchData, step: float):
    """Central differences of the chart and of the branch points in the covering parameters."""
    p0 = cov.params
    n = p0.size
    jc = np.zeros((n, n), dtype=complex)
    jl = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h = step * max(1.0, abs(p0[i]))
        cols_c, cols_l = [], []
        for sgn in (1.0, -1.0):
            p = p0.copy()
            p[i] += sgn * h
            cols_c.append(_chart_of_params(p, cid))
            cols_l.append(_track_roots(RationalCovering.from_params(p), bd.alpha).lam)
        jc[:, i] = _unwrap(cols_c[0] - cols_c[1]) / (2 * h)
        jl[:, i] = (cols_l[0] - cols_l[1]) / (2 * h)
    return jc, jl


def lambda_jacobian(cov: RationalCovering, chart_id, step: float = 1e-4):
    """Finite-difference ``d lambda_j / d t^A`` via the covering parameters.

    Central differences at ``step`` and ``step/2`` are combined by one
    Richardson extrapolation, which leaves an ``O(step^4)`` error.

    Returns
    -------
    numpy.ndarray
        Matrix with rows ``j`` (critical points, in :func:`critical_data`
        order) and columns ``A``.

    Raises
    ------
    SingularJacobian
        If the chart Jacobian has condition number above ``1e10``.
    """
    cid = parse_chart_id(chart_id)
    bd = critical_data(cov)
    jc1, jl1 = _param_jacobians(cov, cid, bd, step)
    jc2, jl2 = _param_jacobians(cov, cid, bd, step / 2)
    jc = (4 * jc2 - jc1) / 3
    jl = (4 * jl2 - jl1) / 3
    cond = np.linalg.cond(jc)
    if not np.isfinite(cond) or cond > 1e10:
        raise SingularJacobian(f"chart Jacobian condition number {cond:.3e}")
    return jl @ np.linalg.inv(jc)


def lambda_jacobian_closed_form(cov: RationalCovering, chart_id, bd: BranchData | None = None) -> np.ndarray:
    """Closed form ``d lambda_j/d t^A = f_{2m+1-A}(alpha_j) / f_omega(alpha_j)``."""
    cid = parse_chart_id(chart_id)
    bd = bd or critical_data(cov)
    m = cov.m
    omega = differential_coefficient(cov, cid.differential(m), bd.alpha)
    cols = [differential_coefficient(cov, 2 * m + 1 - a, bd.alpha) / omega for a in range(1, 2 * m + 1)]
    return np.array(cols).T


def lambda_jacobian_residual(cov: RationalCovering, chart_id, step: float = 1e-4) -> float:
    """Largest relative gap between the FD and closed-form ``d lambda/d t`` matrices."""
    num = lambda_jacobian(cov, chart_id, step)
    ref = lambda_jacobian_closed_form(cov, chart_id)
    floor = 1e-12 * float(np.max(np.abs(ref)))
    return float(np.max(np.abs(num - ref) / np.maximum(np.abs(ref), floor)))


def unit_action_residual(cov: RationalCovering) -> float:
    """``max_j |sum_A (d lambda_j/d t^A) e^A - 1|`` for the Phi0 unit field."""
    jac = lambda_jacobian_closed_form(cov, "Phi0")
    unit = phi0_unit(flat_chart(cov, "Phi0").coords)
    return float(np.max(np.abs(jac @ unit - 1.0)))


def chart_composition_residual(cov: RationalCovering, j: int, kind: str = "PhiJ", step: float = 1e-5) -> float:
    """Check that the two routes to ``d(chart)/d(Phi0)`` compose to the identity.

    One Jacobian is the finite difference of the closed-form map
    :func:`chart_from_phi0`; the other comes from the covering parameters,
    ``J_t J_x^{-1}``. Their product must be the identity matrix.
    """
    cid = ChartId(kind, j)
    p0 = cov.params
    n = p0.size
    jt = np.zeros((n, n), dtype=complex)
    jx = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h = step * max(1.0, abs(p0[i]))
        pp, pm = p0.copy(), p0.copy()
        pp[i] += h
        pm[i] -= h
        jt[:, i] = _unwrap(_chart_of_params(pp, "Phi0") - _chart_of_params(pm, "Phi0")) / (2 * h)
        jx[:, i] = _unwrap(_chart_of_params(pp, cid) - _chart_of_params(pm, cid)) / (2 * h)
    t0 = flat_chart(cov, "Phi0").coords
    dxdt = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h = step * max(1.0, abs(t0[i]))
        tp, tm = t0.copy(), t0.copy()
        tp[i] += h
        tm[i] -= h
        dxdt[:, i] = _unwrap(chart_from_phi0(tp, cid) - chart_from_phi0(tm, cid)) / (2 * h)
    dtdx = jt @ np.linalg.inv(jx)
    return float(np.max(np.abs(dxdt @ dtdx - np.eye(n))))


# ---------------------------------------------------------------------------
# Generic prepotential assembler and Hessian oracle
# ---------------------------------------------------------------------------

def generic_prepotential(chart0, family_choice) -> complex:
    """Prepotential assembled from degrees, Euler actions and cross-chart entries.

    With ``d`` the degree of the chosen differential and ``E.t^A`` the
    Euler action on its flat coordinates (all written as functions of the
    Phi0 point)::

        F = 1/(2(1+d)(2+d)) sum_{k,s} E.t^k E.t^s y_{k,2m+1-s}
          + (2d+3)/(2(1+d)^2(2+d)) sum_{k,s} E.t^s E.t^{2m+1-k} x_{k,2m+1-s}
          + 1/(2(1+d)^2) sum_{k,s} E.t^{2m+1-k} E.t^{2m+1-s} x_{k,s}

    Parameters
    ----------
    chart0 : FlatChart or array_like
        A Phi0 point.
    family_choice : str
        ``"phi0"``, ``"phi<j>"`` (third kind, ``j <= m``) or
        ``"phi<2m+1-j>"`` (second kind).

    Returns
    -------
    complex
        Differs from the closed-form prepotentials by at most quadratic terms.
    """
    t = chart0.coords if isinstance(chart0, FlatChart) else np.asarray(chart0, dtype=complex)
    view = _Phi0View(t)
    m = view.m
    k_choice = parse_differential(family_choice, m)
    # et[r] = E.t^r for r = 1..2m in the chart of the chosen differential.
    et = {}
    if k_choice == 0:
        d = 0
        for s in range(1, m + 1):
            et[s] = 1.0
            et[2 * m + 1 - s] = view.tp(s)
    elif k_choice <= m:
        d = 0
        j = k_choice
        for r in range(1, m + 1):
            et[r] = 1.0 + (r == j)
            et[2 * m + 1 - r] = view.x(j, 2 * m + 1 - r)
    else:
        d = 1
        j = 2 * m + 1 - k_choice
        for r in range(1, m + 1):
            et[r] = view.y(j, r)
            et[2 * m + 1 - r] = 2.0 * view.y(j, 2 * m + 1 - r)
    c1 = 1.0 / (2 * (1 + d) * (2 + d))
    c2 = (2 * d + 3) / (2 * (1 + d) ** 2 * (2 + d))
    c3 = 1.0 / (2 * (1 + d) ** 2)
    total = 0j
    rng = range(1, m + 1)
    for k in rng:
        for s in rng:
            total += c1 * et[k] * et[s] * view.y(k, 2 * m + 1 - s)
            total += c2 * et[s] * et[2 * m + 1 - k] * view.x(k, 2 * m + 1 - s)
            total += c3 * et[2 * m + 1 - k] * et[2 * m + 1 - s] * view.x(k, s)
    return total


def generic_in_chart(coords, chart_id, family_choice, t_seed) -> complex:
    """The assembled prepotential as a function of the chosen chart's coordinates."""
    t = phi0_from_chart(coords, chart_id, t_seed)
    return generic_prepotential(t, family_choice)


def phi0_hessian_closed_form(t) -> np.ndarray:
    """Hessian of the Phi0 prepotential from cross-chart entries.

    ``H[t_s, t_k] = y_{k,2m+1-s}``, ``H[t_s, t_{2m+1-k}] = x_{k,2m+1-s}``,
    ``H[t_{2m+1-s}, t_{2m+1-k}] = (x_{s,k} + x_{k,s})/2`` for ``s != k`` and
    ``x_{k,k} + 3/2`` on the diagonal of that block.
    """
    view = _Phi0View(t)
    m = view.m
    n = 2 * m
    h = np.zeros((n, n), dtype=complex)
    for s in range(1, m + 1):
        for k in range(1, m + 1):
            h[s - 1, k - 1] = view.y(k, 2 * m + 1 - s)
            h[s - 1, 2 * m - k] = view.x(k, 2 * m + 1 - s)
            h[2 * m - k, s - 1] = h[s - 1, 2 * m - k]
            if s == k:
                h[2 * m - s, 2 * m - k] = view.x(k, k) + 1.5
            else:
                h[2 * m - s, 2 * m - k] = 0.5 * (view.x(s, k) + view.x(k, s))
    return h


def sum_rule_residuals(t) -> dict:
    """Relative residuals of the cross-chart sum rules at a Phi0 point.

    Keys
    ----
    R1
        ``sum_s x_{k,2m+1-s} = e^{t_k} + sum_s t_{2m+1-s} = sum_s y_{s,k}``.
    R2
        ``sum_s y_{k,2m+1-s} = t_{2m+1-k} e^{t_k} = e^{x_{k,k}}``.
    swap
        ``x_{k,s} = x_{s,k} + i pi`` for ``s != k``, compared modulo
        ``2 pi i`` because each side carries its own principal logarithm.

    Each entry is the maximum over ``k`` (and ``s``).
    """
    view = _Phi0View(t)
    m = view.m
    r1 = r2 = sw = 0.0
    for k in range(1, m + 1):
        a = sum(view.x(k, 2 * m + 1 - s) for s in range(1, m + 1))
        b = view.e[k - 1] + sum(view.tp(s) for s in range(1, m + 1))
        c = sum(view.y(s, k) for s in range(1, m + 1))
        r1 = max(r1, max(abs(a - b), abs(c - b)) / max(1.0, abs(b)))
        a = sum(view.y(k, 2 * m + 1 - s) for s in range(1, m + 1))
        b = view.tp(k) * view.e[k - 1]
        c = np.exp(view.x(k, k))
        r2 = max(r2, max(abs(a - b), abs(c - b)) / max(1.0, abs(b)))
        for s in range(1, m + 1):
            if s != k:
                d = view.x(k, s) - view.x(s, k) - 1j * np.pi
                d -= 2j * np.pi * round(d.imag / (2 * np.pi))
                sw = max(sw, abs(d) / max(1.0, abs(view.x(k, s))))
    return {"R1": float(r1), "R2": float(r2), "swap": float(sw)}


def third_tensor_in_chart(f, coords, spec: DerivSpec):
    """Convenience wrapper used by the cross-checks."""
    return derivative_tensor(f, coords, 3, spec).tensor
