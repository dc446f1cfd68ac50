import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from wdvv_lab import prepotential_zoo as zoo
from wdvv_lab.cli import CSV_COLUMNS, SCHEMA, main, parse_point


def run(args, tmp_path, name="r.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def strip_times(report):
    for r in report["records"]:
        r.pop("wall_time")
    return report


def test_wdvv_phi1_example(tmp_path):
    code, out = run(["wdvv", "--family", "G1_3D_Phi1", "--samples", "20", "--seed", "7"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0
    assert rep["schema"] == SCHEMA
    assert len(rep["records"]) == 80 and all(r["pass"] for r in rep["records"])
    assert rep["summary"] == {"total": 80, "passed": 80, "failed": 0, "errors": 0}


def test_records_are_sorted(tmp_path):
    _, out = run(["wdvv", "--family", "G1_3D_Phi1", "--family", "G1_Holo(1)", "--samples", "3"], tmp_path)
    recs = json.loads(out.read_text())["records"]
    keys = [(r["check_id"], r["sample"]) for r in recs]
    assert keys == sorted(keys)


def test_eval_matches_library(capsys):
    point = "0.16+0i,0.3+0i,0.2+0i"
    assert main(["eval", "--family", "G1_3D_Phi1", "--point", point]) == 0
    printed = capsys.readouterr().out.strip()
    expected = zoo.eval_prepotential("G1_3D_Phi1", parse_point(point))
    assert printed == repr(expected)
    assert complex(printed) == expected


def test_eval_json_with_derivatives(capsys):
    assert main(["eval", "--family", "G1_3D_Phi1", "--point", "0.16,0.3,0.2", "--derivatives", "2",
                 "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert len(rep["gradient"]) == 3 and len(rep["hessian"]) == 3


def test_eval_outside_domain(capsys):
    # t1 = 0.5i puts tau = 2 pi i t1 on the negative real axis
    assert main(["eval", "--family", "G1_3D_Phi1", "--point", "0+0.5i,0.3+0i,0.2+0i"]) == 2
    assert "upper half-plane" in capsys.readouterr().err


def test_identities_campaign(tmp_path):
    code, out = run(["identities", "--samples", "100", "--seed", "1"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0 and rep["summary"]["failed"] == 0
    assert rep["summary"]["total"] == len(rep["records"])


def test_hurwitz_campaign(tmp_path):
    code, out = run(["hurwitz", "--m", "2", "--samples", "2", "--seed", "4"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0
    ids = {r["check_id"] for r in rep["records"]}
    assert "hurwitz:m2:gram" in ids and "hurwitz:m2:assembler:Phi0" in ids


def test_failure_exit_status_and_report(tmp_path):
    code, out = run(["wdvv", "--family", "G1_3D_Phi1", "--samples", "2", "--tol.assoc=1e-30"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 1
    assert rep["summary"]["failed"] == 2
    assert rep["config"]["tolerance_overrides"] == {"assoc": 1e-30}


def test_tolerance_with_separate_value(tmp_path):
    code, out = run(["wdvv", "--family", "G1_3D_Phi1", "--samples", "1", "--tol.homog", "1e-30"], tmp_path)
    assert code == 1


def test_printed_variant_fails(tmp_path):
    code, _ = run(["wdvv", "--family", "G1_3D_Phi2(printed)", "--samples", "2"], tmp_path)
    assert code == 1


@pytest.mark.parametrize("args", [
    ["wdvv", "--tol.bogus=1"],
    ["wdvv", "--tol.assoc=-1"],
    ["wdvv", "--samples", "0"],
    ["wdvv", "--family", "G9_Nothing"],
    ["frobnicate"],
    ["eval", "--family", "G1_3D_Phi1", "--point", "0.1,,0.2"],
    ["eval", "--family", "G1_3D_Phi1", "--point", "0.1,0.2"],
])
def test_usage_errors(args, capsys):
    assert main(args) == 2


def test_csv_format(tmp_path):
    code, out = run(["wdvv", "--family", "G1_3D_Phi1", "--samples", "2", "--format", "csv"], tmp_path, "r.csv")
    rows = list(csv.reader(out.open()))
    assert code == 0
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 8
    assert all(r[4] == "true" for r in rows[1:])
    json.loads(rows[1][7])


def test_point_mode(tmp_path):
    code, out = run(["wdvv", "--family", "G1_3D_Phi1", "--point", "0.16,0.3,0.2"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0 and len(rep["records"]) == 4


def test_determinism_across_threads(tmp_path, monkeypatch):
    args = ["wdvv", "--family", "G0_Phi0(2)", "--family", "G1_3D_Phi3", "--samples", "3", "--seed", "11"]
    monkeypatch.setenv("WDVV_LAB_THREADS", "1")
    _, a = run(args, tmp_path, "a.json")
    monkeypatch.setenv("WDVV_LAB_THREADS", "4")
    _, b = run(args, tmp_path, "b.json")
    assert strip_times(json.loads(a.read_text())) == strip_times(json.loads(b.read_text()))


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("WDVV_LAB_THREADS", "many")
    assert main(["identities", "--samples", "1"]) == 2


def test_parse_point():
    assert np.array_equal(parse_point("1,i,-0.5+2i"), np.array([1, 1j, -0.5 + 2j]))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wdvv_lab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "wdvv-lab" in res.stdout
