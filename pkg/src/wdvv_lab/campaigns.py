"""Verification campaigns shared by the command line and the acceptance tests.

A campaign is a list of :class:`Task` objects. Every task owns its inputs,
drawn up front from a seeded generator, so tasks can run in any order or
concurrently without changing the report. :func:`run_tasks` turns tasks
into flat records sorted by check id and sample index.

Random streams are keyed by a seed and a label
(``numpy.random.default_rng([seed, crc32(label)])``), which keeps each
section of a campaign reproducible on its own.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hurwitz_g0 as hg
from . import identity_suite as ids
from . import prepotential_zoo as zoo
from . import wdvv_verifier as wv
from .errors import WdvvLabError
from .special_fn import eisenstein, eisenstein_q

__all__ = [
    "Task",
    "rng_for",
    "thread_count",
    "run_tasks",
    "identity_tasks",
    "wdvv_tasks",
    "hurwitz_tasks",
    "selftest_tasks",
    "DEFAULT_WDVV_FAMILIES",
    "HURWITZ_TOLERANCES",
    "IDENTITY_EXTRA_TOLERANCES",
    "CRITERIA",
    "known_tolerance_keys",
]

#: Families run by ``wdvv`` when none are selected.
DEFAULT_WDVV_FAMILIES = (
    "G0_Phi0(2)", "G0_Phi0(3)", "G0_PhiJ(2,1)", "G0_PhiJ(2,2)", "G0_Phi2mJ(2,1)",
    "G0_Phi2mJ(2,2)", "G0_M2_Remark(F1)", "G0_M2_Remark(F2)", "G0_M2_Remark(F3)",
    "G1_Holo(1)", "G1_Holo(2)", "G1_Holo_M1", "G1_Holo_Q(1,0.2+0.1i)", "G1_3D_Phi1",
    "G1_3D_Phi2", "G1_3D_Phi3", "G1_3D_QPhi1(0.2+0.1i)",
)

HURWITZ_TOLERANCES = {
    "gram": 1e-9,
    "intersection": 1e-9,
    "sum_R1": 1e-10,
    "sum_R2": 1e-10,
    "sum_swap": 1e-10,
    "lambda_jacobian": 1e-5,
    "unit_action": 1e-9,
    "chart_composition": 1e-5,
    "assembler": 1e-5,
}

#: Identity checks that have no entry in :data:`identity_suite.TOLERANCES`.
IDENTITY_EXTRA_TOLERANCES = {"q_chazy": 1e-9, "q_degeneration": 1e-13}

#: One-line description of each acceptance criterion, keyed by check-id prefix.
CRITERIA = {
    "C01": "generalized WDVV and eta recovery for G0_Phi0, m = 2, 3",
    "C02": "standard WDVV and unit slice for G0_PhiJ / G0_Phi2mJ, m = 2",
    "C03": "Euler quasi-homogeneity of the closed-form genus-0 and theta prepotentials",
    "C04": "theta prepotential WDVV, eta recovery and m = 1 closed form",
    "C05": "3D family associativity, Hessian oracle and Chazy equation",
    "C06": "Ramanujan system and its q-deformation with q = 0 degeneration",
    "C07": "Weierstrass identity suite",
    "C08": "Gram pairing and intersection form on random coverings",
    "C09": "sum rules, branch-point Jacobians and generic assembler",
    "C10": "q-deformed 3D family and its q = 0 reduction",
    "C11": "differential equation of the half-period values e_j",
}


@dataclass(frozen=True)
class Task:
    """A unit of work producing one or more records.

    ``fn`` returns a mapping from check id to residual (``None`` marks a
    check that does not apply). ``tolerances`` maps the same check ids to
    thresholds; an exception raised by ``fn`` fails all of them.
    """

    sample: int
    inputs: dict
    fn: Callable[[], dict]
    tolerances: dict


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Generator for one labelled section of a campaign."""
    return np.random.default_rng([int(seed), zlib.crc32(label.encode())])


def thread_count() -> int:
    """Worker count from ``WDVV_LAB_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("WDVV_LAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"WDVV_LAB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("WDVV_LAB_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _execute(task: Task) -> list[dict]:
    start = time.perf_counter()
    error = None
    try:
        res = task.fn()
    except (WdvvLabError, ArithmeticError, ValueError) as exc:
        res, error = {}, f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - start
    inputs = _jsonable(task.inputs)
    out = []
    for cid, tol in task.tolerances.items():
        val = res.get(cid) if error is None else None
        if error is None and cid in res and val is None:
            continue  # not applicable
        residual = float(val) if val is not None and math.isfinite(float(val)) else None
        rec = {
            "check_id": cid,
            "sample": task.sample,
            "inputs": inputs,
            "residual": residual,
            "tolerance": tol,
            "pass": residual is not None and residual <= tol,
            "wall_time": wall,
        }
        if error is not None:
            rec["error"] = error
        elif residual is None:
            rec["error"] = "missing or non-finite residual"
        out.append(rec)
    return out


def run_tasks(tasks: list[Task], threads: int | None = None) -> list[dict]:
    """Run tasks (concurrently when ``threads > 1``) and return sorted records."""
    n = thread_count() if threads is None else max(1, int(threads))
    if n == 1 or len(tasks) <= 1:
        chunks = [_execute(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            chunks = list(pool.map(_execute, tasks))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r["check_id"], r["sample"]))
    return records


def known_tolerance_keys() -> set:
    """Names accepted by ``--tol.<check>``."""
    return (set(wv.DEFAULT_TOLERANCES) | set(ids.TOLERANCES) | set(HURWITZ_TOLERANCES)
            | set(IDENTITY_EXTRA_TOLERANCES))


def _tol(key: str, overrides: dict | None, default: float) -> float:
    return float((overrides or {}).get(key, default))


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def _random_q(rng) -> complex:
    return complex(*rng.uniform(-0.3, 0.3, 2))


def _q_degeneration(tau: complex) -> float:
    worst = 0.0
    for w in ("E2", "E4", "E6"):
        for k in range(2):
            a, b = eisenstein_q(tau, 0.0, w, k), eisenstein(tau, w, k)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return worst


def identity_tasks(samples: int, seed: int, overrides: dict | None = None, prefix: str = "identity") -> list[Task]:
    """Identity-suite campaign: every identity at ``samples`` random inputs."""
    T = lambda key: _tol(key, overrides, {**ids.TOLERANCES, **IDENTITY_EXTRA_TOLERANCES}[key])  # noqa: E731
    P = lambda key: f"{prefix}:{key}"  # noqa: E731
    tasks = []
    r_mod, r_q, r_w, r_e, r_f = (rng_for(seed, f"{prefix}:{s}") for s in ("modular", "q", "weierstrass", "ej", "flat"))
    for i in range(samples):
        tau = ids.random_modulus(r_mod)

        def modular(tau=tau):
            r = ids.ramanujan_residuals(tau)
            return {P("chazy"): ids.chazy_residual(tau), P("ramanujan_E2"): r[0],
                    P("ramanujan_E4"): r[1], P("ramanujan_E6"): r[2]}
        keys = ["chazy", "ramanujan_E2", "ramanujan_E4", "ramanujan_E6"]
        tasks.append(Task(i, {"tau": tau}, modular, {P(k): T(k) for k in keys}))

        tq_base = ids.random_modulus(r_q)
        q = 0j if i == 0 else _random_q(r_q)
        tau_q = tq_base / (1 + q * tq_base)

        def deformed(tau_q=tau_q, q=q, first=(i == 0)):
            r = ids.ramanujan_residuals(None, (tau_q, q))
            out = {P("q_chazy"): ids.chazy_residual(tau_q, q), P("q_ramanujan_E2"): r[0],
                   P("q_ramanujan_E4"): r[1], P("q_ramanujan_E6"): r[2]}
            if first:
                out[P("q_degeneration")] = _q_degeneration(tau_q)
            return out
        keys = ["q_chazy", "q_ramanujan_E2", "q_ramanujan_E4", "q_ramanujan_E6"] + (["q_degeneration"] if i == 0 else [])
        tasks.append(Task(i, {"tau_q": tau_q, "q": q}, deformed, {P(k): T(k) for k in keys}))

        L = ids.random_lattice(r_w)
        u, v = ids.random_arguments(L, r_w)
        wkeys = ["p_ode", "p_second", "legendre", "addition_p", "addition_zeta",
                 "zeta_period_1", "zeta_period_2", "zeta_e2", "g2_e4", "g3_e6"]
        tasks.append(Task(i, {"omega1": L.omega1, "omega2": L.omega2, "u": u, "v": v},
                          lambda L=L, u=u, v=v: {P(k): val for k, val in ids.weierstrass_suite(L, u, v).items()},
                          {P(k): T(k) for k in wkeys}))

        tau_e = ids.random_modulus(r_e)

        def ej(tau=tau_e):
            out = {P(f"ej_ode_{j}"): ids.ej_ode_residual(tau, j) for j in (1, 2, 3)}
            out.update({P(k): v for k, v in ids.ej_side_checks(tau).items()})
            return out
        etol = {P(f"ej_ode_{j}"): T("ej_ode") for j in (1, 2, 3)}
        etol.update({P(k): T(k) for k in ("ej_sum", "ej_shift")})
        tasks.append(Task(i, {"tau": tau_e}, ej, etol))

        omega1 = complex(r_f.uniform(0.3, 1.0) * np.exp(2j * np.pi * r_f.uniform()))
        tau_f = ids.random_modulus(r_f)
        c = complex(*r_f.normal(size=2))
        tasks.append(Task(i, {"omega1": omega1, "tau": tau_f, "c": c},
                          lambda o=omega1, t=tau_f, c=c: {P(k): v for k, v in ids.genus1_flat_coords(o, t, c)["residuals"].items()},
                          {P(k): T(k) for k in ("flat_x2", "flat_x3", "flat_y3")}))
    return tasks


# ---------------------------------------------------------------------------
# wdvv
# ---------------------------------------------------------------------------

def _wdvv_point_tasks(fid: str, samples: int, seed: int, label: str, checks: dict) -> list[Task]:
    """Tasks running :func:`wdvv_verifier.run_checks` at sampled points.

    ``checks`` maps a verifier check name (``assoc``, ``eta``, ``homog``,
    ``hessian``) to ``(check_id, tolerance)``.
    """
    fam = zoo.make_family(fid)
    rng = rng_for(seed, label)
    tasks = []
    for i in range(samples):
        t, s = zoo.sample_point(fam, rng)

        def fn(t=t, s=s):
            res = wv.run_checks(fam, t, tau_seed=s).residuals()
            return {cid: res[name] for name, (cid, _) in checks.items()}
        tasks.append(Task(i, {"family": fam.family_id, "point": t, "seed": s}, fn,
                          {cid: tol for cid, tol in checks.values()}))
    return tasks


def wdvv_tasks(families, samples: int, seed: int, overrides: dict | None = None) -> list[Task]:
    """All four verifier checks at ``samples`` points of each family.

    The Hessian check is only emitted for families with a closed-form
    Hessian.
    """
    tasks = []
    for f in families:
        fam = zoo.make_family(f)
        names = ["assoc", "eta", "homog"] + (["hessian"] if wv.has_hessian_oracle(fam) else [])
        checks = {n: (f"wdvv:{fam.family_id}:{n}", _tol(n, overrides, wv.DEFAULT_TOLERANCES[n])) for n in names}
        tasks += _wdvv_point_tasks(fam.family_id, samples, seed, f"wdvv:{fam.family_id}", checks)
    return tasks


# ---------------------------------------------------------------------------
# hurwitz
# ---------------------------------------------------------------------------

def _chart_ids(m: int) -> list[str]:
    return ["Phi0"] + [f"PhiJ({j})" for j in range(1, m + 1)] + [f"Phi2mJ({j})" for j in range(1, m + 1)]


def _covering_checks(cov: hg.RationalCovering) -> dict:
    m = cov.m
    bd = hg.critical_data(cov)
    gram = hg.gram_matrix(cov, bd)
    inter = hg.gram_matrix(cov, bd, (1.0, 0.0))
    ref = hg.intersection_closed_form(cov)
    sums = hg.sum_rule_residuals(hg.flat_chart(cov, "Phi0").coords)
    comp = max(hg.chart_composition_residual(cov, j, kind)
               for kind in ("PhiJ", "Phi2mJ") for j in range(1, m + 1))
    return {
        "gram": float(np.max(np.abs(gram - np.fliplr(np.eye(2 * m))))),
        "intersection": float(np.max(np.abs(inter - ref)) / max(1.0, float(np.max(np.abs(ref))))),
        "sum_R1": sums["R1"],
        "sum_R2": sums["R2"],
        "sum_swap": sums["swap"],
        "lambda_jacobian": max(hg.lambda_jacobian_residual(cov, c) for c in _chart_ids(m)),
        "unit_action": hg.unit_action_residual(cov),
        "chart_composition": comp,
    }


def _assembler_checks(cov: hg.RationalCovering) -> dict:
    out = {}
    for cid in _chart_ids(cov.m):
        kind, j = (cid, 0) if cid == "Phi0" else (cid[:cid.index("(")], int(cid[cid.index("(") + 1:-1]))
        out[cid] = wv.assembler_residual(cov, kind, j)
    return out


def hurwitz_tasks(ms, samples: int, seed: int, overrides: dict | None = None,
                  assembler_max_m: int = 3, prefix: str = "hurwitz") -> list[Task]:
    """Covering checks for each ``m`` plus the assembler comparison for ``m <= assembler_max_m``."""
    T = lambda key: _tol(key, overrides, HURWITZ_TOLERANCES[key])  # noqa: E731
    tasks = []
    for m in ms:
        rng = rng_for(seed, f"{prefix}:m{m}")
        for i in range(samples):
            cov = hg.random_covering(m, rng)
            tasks.append(Task(i, {"m": m, "params": cov.params},
                              lambda cov=cov, m=m: {f"{prefix}:m{m}:{k}": v for k, v in _covering_checks(cov).items()},
                              {f"{prefix}:m{m}:{k}": T(k) for k in HURWITZ_TOLERANCES if k != "assembler"}))
        if m > assembler_max_m:
            continue
        rng = rng_for(seed, f"{prefix}:assembler:m{m}")
        for i in range(samples):
            cov = wv.sample_covering(m, rng)
            tasks.append(Task(i, {"m": m, "params": cov.params},
                              lambda cov=cov, m=m: {f"{prefix}:m{m}:assembler:{c}": v for c, v in _assembler_checks(cov).items()},
                              {f"{prefix}:m{m}:assembler:{c}": T("assembler") for c in _chart_ids(m)}))
    return tasks


# ---------------------------------------------------------------------------
# selftest (acceptance criteria)
# ---------------------------------------------------------------------------

def _wdvv_criterion(crit_checks: list, fid: str, samples: int, seed: int) -> list[Task]:
    """Verifier tasks whose checks are filed under acceptance criteria.

    ``crit_checks`` holds ``(criterion, check name, tolerance)`` triples with
    distinct check names.
    """
    checks = {name: (f"{crit}:{fid}:{name}", tol) for crit, name, tol in crit_checks}
    return _wdvv_point_tasks(fid, samples, seed, f"selftest:{fid}", checks)


def selftest_tasks(seed: int) -> list[Task]:
    """Tasks for acceptance criteria C01..C11 at their stated sample sizes.

    Check ids start with the criterion label, so a criterion passes when
    every record whose id starts with it passes.
    """
    tasks = []
    for m in (2, 3):
        tasks += _wdvv_criterion([("C01", "assoc", 1e-5), ("C01", "eta", 1e-5), ("C03", "homog", 1e-6)],
                                 f"G0_Phi0({m})", 20, seed)
    for kind in ("G0_PhiJ", "G0_Phi2mJ"):
        for j in (1, 2):
            tasks += _wdvv_criterion([("C02", "assoc", 1e-5), ("C02", "eta", 1e-7), ("C03", "homog", 1e-6)],
                                     f"{kind}(2,{j})", 20, seed)
    for m in (1, 2):
        tasks += _wdvv_criterion([("C04", "assoc", 1e-5), ("C04", "eta", 1e-7), ("C03", "homog", 1e-6)],
                                 f"G1_Holo({m})", 20, seed)
    tasks += _wdvv_criterion([("C05", "assoc", 1e-6), ("C05", "hessian", 1e-6)], "G1_3D_Phi1", 20, seed)
    for q in ("0", "0.2+0.1i"):
        fid = zoo.make_family(f"G1_3D_QPhi1({q})").family_id
        tasks += _wdvv_criterion([("C10", "assoc", 1e-5)], fid, 20, seed)

    holo, m1 = zoo.make_family("G1_Holo(1)"), zoo.make_family("G1_Holo_M1")
    rng = rng_for(seed, "selftest:holo_m1")
    for i in range(10):
        t, _ = zoo.sample_point(holo, rng)

        def fn(t=t):
            a, b = zoo.eval_prepotential(holo, t), zoo.eval_prepotential(m1, t)
            return {"C04:G1_Holo_M1:closed_form": abs(a - b) / max(1.0, abs(b))}
        tasks.append(Task(i, {"point": t}, fn, {"C04:G1_Holo_M1:closed_form": 1e-10}))

    rng = rng_for(seed, "selftest:chazy")
    for i in range(20):
        tau = ids.random_modulus(rng)
        tasks.append(Task(i, {"tau": tau}, lambda tau=tau: {"C05:chazy": ids.chazy_residual(tau)}, {"C05:chazy": 1e-9}))

    rng = rng_for(seed, "selftest:ramanujan")
    for i in range(50):
        tau = ids.random_modulus(rng)
        keys = [f"C06:ramanujan_{w}" for w in ("E2", "E4", "E6")]
        tasks.append(Task(i, {"tau": tau}, lambda tau=tau, keys=keys: dict(zip(keys, ids.ramanujan_residuals(tau))),
                          {k: 1e-10 for k in keys}))
    rng = rng_for(seed, "selftest:q_ramanujan")
    for i in range(20):
        base = ids.random_modulus(rng)
        q = 0j if i == 0 else _random_q(rng)
        tau_q = base / (1 + q * base)
        keys = [f"C06:q_ramanujan_{w}" for w in ("E2", "E4", "E6")]
        tol = {k: 1e-9 for k in keys}

        def fn(tau_q=tau_q, q=q, keys=keys, first=(i == 0)):
            out = dict(zip(keys, ids.ramanujan_residuals(None, (tau_q, q))))
            if first:
                out["C06:q_degeneration"] = _q_degeneration(tau_q)
            return out
        if i == 0:
            tol["C06:q_degeneration"] = IDENTITY_EXTRA_TOLERANCES["q_degeneration"]
        tasks.append(Task(i, {"tau_q": tau_q, "q": q}, fn, tol))

    rng = rng_for(seed, "selftest:weierstrass")
    wkeys = ["p_ode", "p_second", "legendre", "addition_p", "addition_zeta",
             "zeta_period_1", "zeta_period_2", "zeta_e2", "g2_e4", "g3_e6"]
    for i in range(100):
        L = ids.random_lattice(rng)
        u, v = ids.random_arguments(L, rng)
        tasks.append(Task(i, {"omega1": L.omega1, "omega2": L.omega2, "u": u, "v": v},
                          lambda L=L, u=u, v=v: {f"C07:{k}": val for k, val in ids.weierstrass_suite(L, u, v).items()},
                          {f"C07:{k}": ids.TOLERANCES[k] for k in wkeys}))

    cov_keys = {"gram": "C08", "intersection": "C08", "sum_R1": "C09", "sum_R2": "C09",
                "lambda_jacobian": "C09"}
    for m in (2, 3, 4):
        rng = rng_for(seed, f"selftest:coverings:m{m}")
        for i in range(10):
            cov = hg.random_covering(m, rng)

            def fn(cov=cov, m=m):
                res = _covering_checks(cov)
                return {f"{c}:m{m}:{k}": res[k] for k, c in cov_keys.items()}
            tasks.append(Task(i, {"m": m, "params": cov.params}, fn,
                              {f"{c}:m{m}:{k}": HURWITZ_TOLERANCES[k] for k, c in cov_keys.items()}))
    for m in (2, 3):
        rng = rng_for(seed, f"selftest:assembler:m{m}")
        for i in range(3):
            cov = wv.sample_covering(m, rng)
            tasks.append(Task(i, {"m": m, "params": cov.params},
                              lambda cov=cov, m=m: {f"C09:m{m}:assembler:{c}": v for c, v in _assembler_checks(cov).items()},
                              {f"C09:m{m}:assembler:{c}": HURWITZ_TOLERANCES["assembler"] for c in _chart_ids(m)}))

    phi1 = zoo.make_family("G1_3D_Phi1")
    q0 = zoo.make_family("G1_3D_QPhi1(0)")
    rng = rng_for(seed, "selftest:q_reduction")
    for i in range(20):
        t, _ = zoo.sample_point(phi1, rng)

        def fn(t=t):
            a, b = zoo.eval_prepotential(q0, t), zoo.eval_prepotential(phi1, t)
            return {"C10:q_reduction": abs(a - b) / max(1.0, abs(b))}
        tasks.append(Task(i, {"point": t}, fn, {"C10:q_reduction": 1e-13}))

    rng = rng_for(seed, "selftest:ej")
    for i in range(20):
        tau = ids.random_modulus(rng)
        keys = {j: f"C11:ej_ode_{j}" for j in (1, 2, 3)}
        tasks.append(Task(i, {"tau": tau}, lambda tau=tau, keys=keys: {k: ids.ej_ode_residual(tau, j) for j, k in keys.items()},
                          {k: ids.TOLERANCES["ej_ode"] for k in keys.values()}))
    return tasks
