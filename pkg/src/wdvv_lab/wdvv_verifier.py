"""Numerical checks of the four contracts a prepotential must satisfy.

For a family ``F`` with metric ``eta`` the checks are

* associativity: ``F_a eta^-1 F_b = F_b eta^-1 F_a`` for the slice matrices
  ``(F_a)_{cd} = d_a d_c d_d F``;
* eta recovery: ``sum_a e^a F_a = eta`` for the unit field ``e``;
* quasi-homogeneity: ``E.F = nu F + Q``;
* Hessian consistency: the numerical Hessian against closed-form entries.

All derivatives come from :mod:`wdvv_lab.numdiff`. When no ``spec`` is
given, the adaptive sweep of :func:`numdiff.adaptive_derivative_tensor` is
used, which is what the default tolerances are calibrated for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hurwitz_g0 as hg
from . import prepotential_zoo as zoo
from .errors import DegenerateCovering, DomainError
from .numdiff import DerivResult, DerivSpec, adaptive_derivative_tensor, derivative_tensor

__all__ = [
    "DEFAULT_TOLERANCES",
    "CustomPrepotential",
    "WdvvCheckResult",
    "check_associativity",
    "check_eta_recovery",
    "check_quasihomogeneity",
    "check_hessian_consistency",
    "has_hessian_oracle",
    "hessian_oracle",
    "run_checks",
    "assembler_residual",
    "sample_covering",
]

#: Third-derivative checks get 1e-5; gradient and Hessian checks get 1e-7.
DEFAULT_TOLERANCES = {"assoc": 1e-5, "eta": 1e-5, "homog": 1e-7, "hessian": 1e-7}

# Constant offsets by which the genus-0 chart Hessians may differ from the
# Phi0 closed form: the branch of log(-1) and the 3/2 diagonal convention.
_G0_REAL_STEP = 1.5
_G0_IMAG_STEP = math.pi / 2


@dataclass(frozen=True)
class CustomPrepotential:
    """A user-supplied prepotential with its metadata.

    Parameters
    ----------
    family_id : str
    func : callable
        ``func(t) -> complex``.
    metadata : prepotential_zoo.FamilyMetadata
    hessian : callable, optional
        Closed-form Hessian ``hessian(t) -> (N, N) array`` used by
        :func:`check_hessian_consistency`.
    """

    family_id: str
    func: Callable
    metadata: zoo.FamilyMetadata
    hessian: Callable | None = None


@dataclass(frozen=True)
class _Target:
    family_id: str
    f: Callable
    md: zoo.FamilyMetadata
    fam: object


def _target(fam, tau_seed) -> _Target:
    if isinstance(fam, CustomPrepotential):
        return _Target(fam.family_id, lambda v: complex(fam.func(v)), fam.metadata, fam)
    fam = zoo.make_family(fam)
    seed = None if isinstance(tau_seed, np.ndarray) else tau_seed
    return _Target(fam.family_id, lambda v: zoo.eval_prepotential(fam, v, seed),
                   zoo.family_metadata(fam), fam)


def _tensor(tg: _Target, t, order: int, spec: DerivSpec | None) -> DerivResult:
    if spec is None:
        return adaptive_derivative_tensor(tg.f, t, order)
    return derivative_tensor(tg.f, t, order, spec)


def _slices(tg, t, spec, tensor):
    return np.asarray(tensor) if tensor is not None else _tensor(tg, t, 3, spec).tensor


def check_associativity(fam, t, spec: DerivSpec | None = None, tau_seed=None, tensor=None) -> float:
    """Largest normalized commutator ``F_a eta^-1 F_b - F_b eta^-1 F_a``.

    Parameters
    ----------
    fam : str, PrepotentialFamily or CustomPrepotential
    t : array_like
        Point in the family's domain.
    spec : DerivSpec, optional
        Fixed finite-difference policy; adaptive when omitted.
    tau_seed : complex, optional
        Newton seed for inverse-function families.
    tensor : numpy.ndarray, optional
        Precomputed third-derivative tensor.

    Returns
    -------
    float
        ``max_{a,b} ||F_a eta^-1 F_b - F_b eta^-1 F_a||_F / max(1, max_a ||F_a||_F)``.

    Examples
    --------
    >>> from wdvv_lab.prepotential_zoo import FamilyMetadata
    >>> import numpy as np
    >>> md = FamilyMetadata(3, np.fliplr(np.eye(3)), 0, ((1, 0),) * 3, 3.0, lambda t: 0)
    >>> cubic = CustomPrepotential("cubic", lambda t: t[0]**2*t[2]/2 + t[0]*t[1]**2/2, md)
    >>> check_associativity(cubic, [0.1, 0.2, 0.3]) < 1e-9
    True
    """
    tg = _target(fam, tau_seed)
    T = _slices(tg, t, spec, tensor)
    eta_inv = np.linalg.inv(tg.md.eta)
    n = tg.md.N
    scale = max(1.0, max(np.linalg.norm(T[a]) for a in range(n)))
    worst = 0.0
    for a in range(n):
        left = T[a] @ eta_inv
        for b in range(a + 1, n):
            worst = max(worst, float(np.linalg.norm(left @ T[b] - T[b] @ eta_inv @ T[a])))
    return worst / scale


def check_eta_recovery(fam, t, spec: DerivSpec | None = None, tau_seed=None, tensor=None) -> float:
    """Frobenius distance between ``sum_a e^a(t) F_a`` and ``eta``.

    For constant-unit families this is the single slice along the unit
    direction; for ``G0_Phi0`` the unit components are the functions
    ``f_a(t)``.
    """
    tg = _target(fam, tau_seed)
    T = _slices(tg, t, spec, tensor)
    u = tg.md.unit_vector(np.asarray(t, dtype=complex))
    return float(np.linalg.norm(np.einsum("a,abc->bc", u, T) - tg.md.eta))


def check_quasihomogeneity(fam, t, spec: DerivSpec | None = None, tau_seed=None) -> float:
    """``|E.F - nu F - Q| / max(1, |F|)`` with ``E.F`` from the numerical gradient."""
    tg = _target(fam, tau_seed)
    v = np.asarray(t, dtype=complex)
    grad = _tensor(tg, v, 1, spec).tensor
    euler = sum((d * v[a] + r) * grad[a] for a, (d, r) in enumerate(tg.md.euler))
    F = tg.f(v)
    return abs(euler - tg.md.degree * F - tg.md.quadratic_correction(v)) / max(1.0, abs(F))


# ---------------------------------------------------------------------------
# Hessian oracles
# ---------------------------------------------------------------------------

_G0_CHART = {
    "G0_Phi0": lambda fam: "Phi0",
    "G0_PhiJ": lambda fam: f"PhiJ({fam.j})",
    "G0_Phi2mJ": lambda fam: f"Phi2mJ({fam.j})",
    "G0_M2_Remark": lambda fam: {"F1": "Phi0", "F2": "PhiJ(1)", "F3": "Phi2mJ(1)"}[fam.variant],
}
_3D = ("G1_3D_Phi1", "G1_3D_QPhi1", "G1_3D_Phi2", "G1_3D_QPhi2", "G1_3D_Phi3", "G1_3D_QPhi3")


def has_hessian_oracle(fam) -> bool:
    """Whether :func:`check_hessian_consistency` applies to ``fam``."""
    if isinstance(fam, CustomPrepotential):
        return fam.hessian is not None
    kind = zoo.make_family(fam).kind
    return kind in _G0_CHART or kind in _3D


def _phi1_point(fam, v, seed):
    """The ``(t1, t2, t3)`` point of the 3D manifold with chart coordinates ``v``."""
    k = fam.kind
    q = fam.q if k.startswith("G1_3D_Q") else None
    ctl = fam.ctl
    if k in ("G1_3D_Phi1", "G1_3D_QPhi1"):
        return v
    seed = complex(seed if seed is not None else (fam.tau_seed or 1j))
    if k in ("G1_3D_Phi2", "G1_3D_QPhi2"):
        x1, x2, x3 = v
        tau = zoo.invert_e2prime(3 * x3 / (1j * math.pi ** 3 * x1 ** 3), seed, q, ctl)
        return np.array([tau / zoo.TWO_PI_I, x1, x2 - math.pi ** 2 / 2 * x1 ** 2 * zoo._e2(tau, q, 0, ctl)])
    y1, y2, y3 = v
    tau = zoo.invert_chi(-8.0 / 3.0 * y3 ** 3 / y2 ** 4, seed, q, ctl)
    t2 = -2j * y3 * zoo._e2(tau, q, 1, ctl) / (math.pi * y2 * zoo._e2(tau, q, 2, ctl))
    return np.array([tau / zoo.TWO_PI_I, t2, y1])


def hessian_oracle(fam, t, tau_seed=None) -> np.ndarray:
    """Closed-form Hessian of a family at ``t``.

    For the three-dimensional genus-1 families it is the chart-independent
    matrix ``[[y3, x3, t3], [x3, x2, x1], [t3, x1, t1]]`` evaluated at the
    manifold point of ``t``. For genus-0 families it is
    :func:`hurwitz_g0.phi0_hessian_closed_form` at the Phi0 point of the same
    covering; ``tau_seed`` must then be that Phi0 point (as returned by
    :func:`prepotential_zoo.sample_point`) unless the family is already in
    the Phi0 chart.

    Raises
    ------
    DomainError
        If the family has no closed-form Hessian or a needed seed is missing.
    """
    if isinstance(fam, CustomPrepotential):
        if fam.hessian is None:
            raise DomainError(f"{fam.family_id} has no closed-form Hessian")
        return np.asarray(fam.hessian(np.asarray(t, dtype=complex)), dtype=complex)
    fam = zoo.make_family(fam)
    v = np.asarray(t, dtype=complex)
    if fam.kind in _3D:
        p = _phi1_point(fam, v, tau_seed)
        q = fam.q if fam.kind.startswith("G1_3D_Q") else None
        x, y, _ = zoo.phi1_to_phi23(p, q, fam.ctl)
        return np.array([[y[2], x[2], p[2]], [x[2], x[1], x[0]], [p[2], x[0], p[0]]])
    if fam.kind in _G0_CHART:
        chart = _G0_CHART[fam.kind](fam)
        if chart == "Phi0":
            t0 = v
        else:
            if not isinstance(tau_seed, np.ndarray):
                raise DomainError("genus-0 cross charts need the Phi0 point as seed")
            t0 = hg.phi0_from_chart(v, chart, tau_seed)
        return hg.phi0_hessian_closed_form(t0)
    raise DomainError(f"{fam.family_id} has no closed-form Hessian")


def check_hessian_consistency(fam, t, spec: DerivSpec | None = None, tau_seed=None) -> float:
    """Largest entry of ``|H_num - H_closed| / max(1, |H_closed|)``.

    Genus-0 differences are first reduced modulo the constant offsets
    ``1.5 Z + (i pi / 2) Z`` that the various charts attach to their
    quadratic terms; a true mismatch does not land on that lattice.
    """
    tg = _target(fam, tau_seed)
    v = np.asarray(t, dtype=complex)
    closed = hessian_oracle(fam, v, tau_seed)
    H = _tensor(tg, v, 2, spec).tensor
    d = H - closed
    if not isinstance(fam, CustomPrepotential) and zoo.make_family(fam).kind.startswith("G0_"):
        d = d - _G0_REAL_STEP * np.round(d.real / _G0_REAL_STEP) \
            - 1j * _G0_IMAG_STEP * np.round(d.imag / _G0_IMAG_STEP)
    return float(np.max(np.abs(d) / np.maximum(1.0, np.abs(closed))))


# ---------------------------------------------------------------------------
# All four at once
# ---------------------------------------------------------------------------

@dataclass
class WdvvCheckResult:
    """Residuals of the four checks at one point.

    ``residual_hessian`` is ``None`` for families without a closed-form
    Hessian; such a check counts as not applicable rather than failed.
    """

    family_id: str
    point: list
    residual_assoc: float
    residual_eta: float
    residual_homog: float
    residual_hessian: float | None
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self) -> dict:
        out = {}
        for key, val in self.residuals().items():
            if val is not None:
                out[key] = bool(math.isfinite(val) and val <= self.tolerances[key])
        return out

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def residuals(self) -> dict:
        return {"assoc": self.residual_assoc, "eta": self.residual_eta,
                "homog": self.residual_homog, "hessian": self.residual_hessian}


def run_checks(fam, t, tau_seed=None, spec: DerivSpec | None = None, tolerances: dict | None = None) -> WdvvCheckResult:
    """Run every applicable check at ``t``, sharing one third-derivative tensor."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    tg = _target(fam, tau_seed)
    v = np.asarray(t, dtype=complex)
    T = _tensor(tg, v, 3, spec).tensor
    hess = check_hessian_consistency(fam, v, spec, tau_seed) if has_hessian_oracle(fam) else None
    return WdvvCheckResult(
        family_id=tg.family_id,
        point=[complex(x) for x in v],
        residual_assoc=check_associativity(fam, v, spec, tau_seed, tensor=T),
        residual_eta=check_eta_recovery(fam, v, spec, tau_seed, tensor=T),
        residual_homog=check_quasihomogeneity(fam, v, spec, tau_seed),
        residual_hessian=hess,
        tolerances=tol,
    )


def assembler_residual(cov: hg.RationalCovering, kind: str = "Phi0", j: int = 0,
                       spec: DerivSpec | None = None) -> float:
    """Third-tensor distance between the generic assembler and the closed-form prepotential.

    Parameters
    ----------
    cov : RationalCovering
    kind : {"Phi0", "PhiJ", "Phi2mJ"}
        Chart, which fixes both the differential and the closed-form family.
    j : int
        Chart index for ``PhiJ`` / ``Phi2mJ``.
    spec : DerivSpec, optional
        Fixed finite-difference policy; adaptive when omitted.

    Returns
    -------
    float
        ``max |T_generic - T_closed| / max(1, max |T_closed|)``. The two
        prepotentials may differ by quadratic terms, which third derivatives
        do not see.
    """
    m = cov.m
    t0 = hg.flat_chart(cov, "Phi0").coords
    if kind == "Phi0":
        cid, choice, fid = "Phi0", "phi0", f"G0_Phi0({m})"
    elif kind == "PhiJ":
        cid, choice, fid = f"PhiJ({j})", f"phi{j}", f"G0_PhiJ({m},{j})"
    elif kind == "Phi2mJ":
        cid, choice, fid = f"Phi2mJ({j})", f"phi{2 * m + 1 - j}", f"G0_Phi2mJ({m},{j})"
    else:
        raise DomainError(f"unknown chart kind {kind!r}")
    coords = hg.flat_chart(cov, cid).coords
    generic = _Target("generic", lambda v: hg.generic_in_chart(v, cid, choice, t0), None, None)
    closed = _target(fid, None)
    a = _tensor(generic, coords, 3, spec).tensor
    b = _tensor(closed, coords, 3, spec).tensor
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def sample_covering(m: int, rng: np.random.Generator, max_tries: int = 2000) -> hg.RationalCovering:
    """A random covering that is admissible for every closed-form genus-0 family.

    Besides the conditions of :func:`hurwitz_g0.random_covering`, every
    logarithm argument of the ``G0_Phi0``, ``G0_PhiJ`` and ``G0_Phi2mJ``
    prepotentials must have modulus above 0.05, so that finite-difference
    stencils in any of the charts stay inside the domain of holomorphy.
    """
    fams = [(f"G0_Phi0({m})", "Phi0")]
    fams += [(f"G0_PhiJ({m},{j})", f"PhiJ({j})") for j in range(1, m + 1)]
    fams += [(f"G0_Phi2mJ({m},{j})", f"Phi2mJ({j})") for j in range(1, m + 1)]
    for _ in range(max_tries):
        try:
            cov = hg.random_covering(m, rng)
        except DegenerateCovering:
            continue
        if all(zoo._log_safe(zoo.make_family(fid), hg.flat_chart(cov, cid).coords, None)
               for fid, cid in fams):
            return cov
    raise DomainError(f"could not sample a covering admissible for all charts (m={m})")
