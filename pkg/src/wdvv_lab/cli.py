"""Command-line front end.

Subcommands
-----------
identities
    Identity-suite campaign over random moduli, lattices and arguments.
wdvv
    The four prepotential checks (associativity, eta recovery,
    quasi-homogeneity and, where available, the Hessian oracle) at sampled
    points of the selected families.
hurwitz
    Residue pairings, sum rules, branch-point Jacobians, chart
    compositions and the generic assembler on random coverings.
eval
    Value of one prepotential at a user point, optionally with its
    gradient and Hessian.
selftest
    Every acceptance criterion at its stated sample size.

Reports are JSON objects tagged ``"schema": "wdvv-lab/1"`` or CSV tables
with the columns in :data:`CSV_COLUMNS`. Records are sorted by check id and
sample index; apart from the ``wall_time`` fields the report depends only
on the command line. The exit status is 0 when every check passes, 1 when
some check fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys

import numpy as np

from . import __version__
from . import campaigns as cp
from . import prepotential_zoo as zoo
from .errors import WdvvLabError
from .numdiff import adaptive_derivative_tensor

__all__ = ["main", "build_parser", "parse_point", "build_report", "CSV_COLUMNS", "SCHEMA"]

SCHEMA = "wdvv-lab/1"
CSV_COLUMNS = ("check_id", "sample", "residual", "tolerance", "pass", "wall_time", "error", "inputs")

_TOL_RE = re.compile(r"--tol\.([A-Za-z0-9_]+)(?:=(.*))?$")


class UsageError(Exception):
    """Bad command line; reported with exit status 2."""


def parse_point(text: str) -> np.ndarray:
    """Comma-separated complex literals, e.g. ``"0.16+0i,0.3+0i,0.2"``."""
    parts = str(text).split(",")
    if not parts or any(p.strip() == "" for p in parts):
        raise UsageError(f"malformed point {text!r}")
    try:
        return np.array([zoo.parse_complex(p) for p in parts], dtype=complex)
    except WdvvLabError as exc:
        raise UsageError(str(exc)) from None


def _split_tolerances(argv: list[str]) -> tuple[list[str], dict]:
    """Pull ``--tol.<check>=<value>`` (or ``--tol.<check> <value>``) out of argv."""
    rest, tol = [], {}
    known = cp.known_tolerance_keys()
    i = 0
    while i < len(argv):
        mt = _TOL_RE.match(argv[i])
        if not mt:
            rest.append(argv[i])
            i += 1
            continue
        key, val = mt.group(1), mt.group(2)
        if val is None:
            if i + 1 >= len(argv):
                raise UsageError(f"--tol.{key} needs a value")
            val = argv[i + 1]
            i += 1
        i += 1
        if key not in known:
            raise UsageError(f"unknown tolerance key {key!r}; known: {', '.join(sorted(known))}")
        try:
            v = float(val)
        except ValueError:
            raise UsageError(f"--tol.{key}: not a number: {val!r}") from None
        if not v > 0:
            raise UsageError(f"--tol.{key} must be positive")
        tol[key] = v
    return rest, tol


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdvv-lab",
        description="Numerical verification of WDVV prepotentials and the special-function identities behind them.",
        epilog="Tolerances are overridden with --tol.<check>=<value>, e.g. --tol.assoc=1e-6.",
    )
    parser.add_argument("--version", action="version", version=f"wdvv-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples=True):
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        if samples:
            p.add_argument("--samples", type=_positive_int, default=10, help="samples per check (default 10)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("identities", help="identity-suite campaign")
    common(p)

    p = sub.add_parser("wdvv", help="prepotential checks over sampled points")
    common(p)
    p.add_argument("--family", action="append", help="family id, repeatable (default: a representative set)")
    p.add_argument("--point", help="check this point instead of sampling")
    p.add_argument("--tau-seed", help="Newton seed for inverse-function families when --point is given")

    p = sub.add_parser("hurwitz", help="checks on random rational coverings")
    common(p)
    p.add_argument("--m", type=int, action="append", help="number of poles, repeatable (default 2, 3, 4)")
    p.add_argument("--assembler-max-m", type=int, default=3,
                   help="largest m for the generic assembler comparison (default 3)")

    p = sub.add_parser("eval", help="evaluate one prepotential at a point")
    p.add_argument("--family", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--tau-seed", help="Newton seed for inverse-function families")
    p.add_argument("--derivatives", type=int, choices=(0, 1, 2), default=0,
                   help="also print the gradient (1) or gradient and Hessian (2)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("selftest", help="run all acceptance criteria")
    common(p, samples=False)
    return parser


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def build_report(command: str, config: dict, records: list[dict], criteria: bool = False) -> dict:
    """Assemble the report object; summary counts are tallied from ``records``."""
    passed = sum(r["pass"] for r in records)
    report = {
        "schema": SCHEMA,
        "tool": {"name": "wdvv-lab", "version": __version__},
        "command": command,
        "config": config,
        "summary": {
            "total": len(records),
            "passed": passed,
            "failed": len(records) - passed,
            "errors": sum("error" in r for r in records),
        },
    }
    if criteria:
        crit = {}
        for label, text in cp.CRITERIA.items():
            mine = [r for r in records if r["check_id"].startswith(label + ":")]
            crit[label] = {"description": text, "records": len(mine),
                           "passed": bool(mine) and all(r["pass"] for r in mine)}
        report["criteria"] = crit
    report["records"] = records
    return report


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report["records"]:
        w.writerow([r["check_id"], r["sample"], "" if r["residual"] is None else repr(r["residual"]),
                    repr(r["tolerance"]), "true" if r["pass"] else "false", f"{r['wall_time']:.6f}",
                    r.get("error", ""), json.dumps(r["inputs"], separators=(",", ":"))])
    return buf.getvalue()


def _emit(text: str, out: str | None, summary_line: str) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary_line)
    else:
        sys.stdout.write(text)
        print(summary_line, file=sys.stderr)


def _summary_line(report: dict) -> str:
    s = report["summary"]
    line = f"{report['command']}: {s['passed']}/{s['total']} checks passed, {s['failed']} failed"
    if "criteria" in report:
        bad = [k for k, v in report["criteria"].items() if not v["passed"]]
        line += "; criteria failing: " + (", ".join(bad) if bad else "none")
    return line


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _families(names) -> list[str]:
    try:
        return [zoo.make_family(f).family_id for f in (names or cp.DEFAULT_WDVV_FAMILIES)]
    except WdvvLabError as exc:
        raise UsageError(str(exc)) from None


def _run_campaign(args, tol: dict) -> int:
    config = {"seed": args.seed, "format": args.format, "tolerance_overrides": dict(sorted(tol.items()))}
    criteria = False
    if args.command == "identities":
        config["samples"] = args.samples
        tasks = cp.identity_tasks(args.samples, args.seed, tol)
    elif args.command == "wdvv":
        fams = _families(args.family)
        config.update(samples=args.samples, families=fams)
        if args.point is not None:
            tasks = _point_tasks(fams, parse_point(args.point), args.tau_seed, tol)
            config.update(samples=1, point=args.point, tau_seed=args.tau_seed)
        else:
            tasks = cp.wdvv_tasks(fams, args.samples, args.seed, tol)
    elif args.command == "hurwitz":
        ms = sorted(set(args.m or (2, 3, 4)))
        if any(m < 2 for m in ms):
            raise UsageError("--m must be >= 2")
        config.update(samples=args.samples, m=ms, assembler_max_m=args.assembler_max_m)
        tasks = cp.hurwitz_tasks(ms, args.samples, args.seed, tol, args.assembler_max_m)
    else:
        if tol:
            raise UsageError("selftest uses the fixed acceptance tolerances")
        tasks = cp.selftest_tasks(args.seed)
        criteria = True
    report = build_report(args.command, config, cp.run_tasks(tasks), criteria)
    _emit(_render(report, args.format), args.out, _summary_line(report))
    return 0 if report["summary"]["failed"] == 0 else 1


def _point_tasks(fams, t, tau_seed, tol) -> list[cp.Task]:
    from . import wdvv_verifier as wv

    seed = zoo.parse_complex(tau_seed) if tau_seed is not None else None
    tasks = []
    for fid in fams:
        fam = zoo.make_family(fid)
        if t.size != fam.N:
            raise UsageError(f"{fid} needs {fam.N} coordinates, got {t.size}")
        names = ["assoc", "eta", "homog"] + (["hessian"] if wv.has_hessian_oracle(fam) else [])

        def fn(fam=fam, names=names):
            res = wv.run_checks(fam, t, tau_seed=seed).residuals()
            return {f"wdvv:{fam.family_id}:{n}": res[n] for n in names}
        tasks.append(cp.Task(0, {"family": fid, "point": t, "seed": seed}, fn,
                             {f"wdvv:{fid}:{n}": tol.get(n, wv.DEFAULT_TOLERANCES[n]) for n in names}))
    return tasks


def _run_eval(args) -> int:
    try:
        fam = zoo.make_family(args.family)
    except WdvvLabError as exc:
        raise UsageError(str(exc)) from None
    t = parse_point(args.point)
    seed = zoo.parse_complex(args.tau_seed) if args.tau_seed is not None else None
    value = zoo.eval_prepotential(fam, t, seed)
    f = lambda v: zoo.eval_prepotential(fam, v, seed)  # noqa: E731
    derivs = {}
    if args.derivatives >= 1:
        derivs["gradient"] = adaptive_derivative_tensor(f, t, 1).tensor
    if args.derivatives >= 2:
        derivs["hessian"] = adaptive_derivative_tensor(f, t, 2).tensor
    if args.format == "json":
        out = {"schema": SCHEMA, "command": "eval", "family": fam.family_id,
               "point": cp._jsonable(t), "value": cp._jsonable(value)}
        out.update({k: cp._jsonable(v) for k, v in derivs.items()})
        text = json.dumps(out, indent=2) + "\n"
    else:
        lines = [repr(value)]
        if "gradient" in derivs:
            lines.append("gradient: " + " ".join(repr(complex(x)) for x in derivs["gradient"]))
        if "hessian" in derivs:
            lines += ["hessian: " + " ".join(repr(complex(x)) for x in row) for row in derivs["hessian"]]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    """Entry point of the ``wdvv-lab`` script; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, tol = _split_tolerances(argv)
        args = parser.parse_args(argv)
        if args.command == "eval":
            if tol:
                raise UsageError("eval takes no tolerances")
            return _run_eval(args)
        cp.thread_count()  # validate WDVV_LAB_THREADS before any work
        return _run_campaign(args, tol)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wdvv-lab: error: {exc}", file=sys.stderr)
        return 2
    except (WdvvLabError, ValueError, ArithmeticError) as exc:
        print(f"wdvv-lab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
