"""Acceptance criteria C01..C12.

The selftest subcommand evaluates C01..C11 at their stated sample sizes and
tolerances. It is run twice with the same seed; C12 requires both reports to
agree once the wall-time fields are removed. One PASS/FAIL line is printed
per criterion, with the worst residual-to-tolerance ratio where it applies.

Run directly (``python tests/test_acceptance.py``) to print the lines
without pytest.
"""

import json
import sys
import tempfile
from pathlib import Path

import pytest

from wdvv_lab.campaigns import CRITERIA
from wdvv_lab.cli import main

SEED = 1
LABELS = list(CRITERIA) + ["C12"]


def _selftest(path: Path) -> tuple[int, dict]:
    code = main(["selftest", "--seed", str(SEED), "--out", str(path)])
    return code, json.loads(path.read_text())


def _without_times(report: dict) -> dict:
    report = json.loads(json.dumps(report))
    for r in report["records"]:
        r.pop("wall_time", None)
    return report


def evaluate() -> dict:
    """Return ``{label: (passed, detail)}`` for every criterion."""
    with tempfile.TemporaryDirectory() as tmp:
        code1, first = _selftest(Path(tmp) / "a.json")
        code2, second = _selftest(Path(tmp) / "b.json")
    out = {}
    for label, text in CRITERIA.items():
        recs = [r for r in first["records"] if r["check_id"].startswith(label + ":")]
        worst = max(recs, default=None, key=lambda r: float("inf") if r["residual"] is None
                    else r["residual"] / r["tolerance"])
        ok = first["criteria"][label]["passed"]
        if worst is None:
            detail = f"{text}: no records"
        elif worst["residual"] is None:
            detail = f"{text}: {worst['check_id']} errored ({worst.get('error', '')})"
        else:
            detail = (f"{text}: {len(recs)} checks, worst {worst['check_id']} "
                      f"{worst['residual']:.1e} <= {worst['tolerance']:.0e}" if ok else
                      f"{text}: {sum(not r['pass'] for r in recs)} of {len(recs)} checks failed, worst "
                      f"{worst['check_id']} {worst['residual']:.1e} > {worst['tolerance']:.0e}")
        out[label] = (ok, detail)
    same = _without_times(first) == _without_times(second)
    out["C12"] = (same and code1 == code2,
                  f"selftest --seed {SEED} twice: reports {'identical' if same else 'DIFFER'} apart from wall times")
    return out


def line(label: str, result: tuple) -> str:
    return f"{label} {'PASS' if result[0] else 'FAIL'}  {result[1]}"


@pytest.fixture(scope="module")
def results():
    return evaluate()


@pytest.mark.parametrize("label", LABELS)
def test_criterion(label, results, capsys):
    with capsys.disabled():
        print("\n" + line(label, results[label]), end="")
    assert results[label][0], results[label][1]


if __name__ == "__main__":
    res = evaluate()
    for lab in LABELS:
        print(line(lab, res[lab]))
    sys.exit(0 if all(r[0] for r in res.values()) else 1)
