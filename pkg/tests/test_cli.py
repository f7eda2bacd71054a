"""End-to-end command-line runs on small grids."""
from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from ymheat.cli import dumps, main
from ymheat.model import eval_profile, make_dimension


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dumps_round_trips_floats():
    x = 0.1 + 0.2
    assert json.loads(dumps({"x": x}))["x"] == x
    assert json.loads(dumps({"v": np.array([1.0 / 3.0])}))["v"][0] == 1.0 / 3.0


def test_profile_json_stdout(capsys):
    code, out, _ = run(capsys, "profile", "--d", "6", "--kind", "W",
                       "--rho", "0,1.5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["d"] == 6 and doc["n"] == 8 and doc["kind"] == "W"
    dim = make_dimension(6)
    assert doc["values"][0] == float(eval_profile(dim, "W", 0.0))
    assert doc["values"][1] == float(eval_profile(dim, "W", 1.5))


def test_profile_csv_file(tmp_path, capsys):
    path = tmp_path / "w.csv"
    code, _, _ = run(capsys, "profile", "--n", "8", "--R", "10", "--N", "50",
                     "--out", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["rho", "value"]
    assert len(rows) == 51
    rho, val = (float(s) for s in rows[1])
    assert val == pytest.approx(float(eval_profile(make_dimension(6), "W", rho)))


def test_ggmt_exit_codes(capsys):
    code, out, _ = run(capsys, "ggmt", "--n", "8", "--p", "4",
                       "--pathway", "exactCertificate")
    doc = json.loads(out)
    assert code == 0 and doc["passes"] and doc["B"] < 1
    assert doc["constantExact"] == f"945/{8**9}"
    # p = 2 bound exceeds 1: command reports it and signals failure
    code, out, _ = run(capsys, "ggmt", "--n", "8", "--p", "2")
    assert code == 1
    assert json.loads(out)["B"] > 1


def test_ggmt_scan_lines(capsys):
    code, out, _ = run(capsys, "ggmt", "--d", "5", "--scan-p", "2..4")
    assert code == 0
    docs = [json.loads(line) for line in out.strip().splitlines()]
    assert [d["p"] for d in docs] == [2, 3, 4]
    assert all(d["pathway"] == "tightQminus" for d in docs)


def test_spectrum_extrapolated_ground_state(capsys):
    code, out, _ = run(capsys, "spectrum", "--d", "5", "--N", "1000",
                       "--k", "2", "--extrapolate")
    assert code == 0
    doc = json.loads(out)
    assert doc["extrapolated"][0] == pytest.approx(-1.0, abs=1e-2)
    assert len(doc["eigenvalues"]) == 2
    assert doc["N"] == 2000      # reported grid is the fine one


def test_evolve_summary_and_trace(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    with pytest.warns(RuntimeWarning, match="low-accuracy"):
        code, out, _ = run(capsys, "evolve", "--d", "5", "--N", "300", "--R", "12",
                           "--dt", "0.01", "--tau-max", "0.5",
                           "--sample-stride", "5", "--out", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["diverged"] is False
    assert doc["supEnd"] == 0.0           # unperturbed shrinker stays put
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["tau", "sup", "sigma", "xproxy", "c1"]
    assert len(rows) > 5


def test_blowup_summary(capsys):
    code, out, _ = run(capsys, "blowup", "--d", "6", "--N", "800", "--R", "12",
                       "--dt", "0.002", "--sup-stop", "100")
    assert code == 0
    doc = json.loads(out)
    assert doc["blowup"] is True and doc["stopped"] == "supStop"
    assert doc["TFit"] == pytest.approx(1.0, abs=3e-2)
    assert doc["profileDistance"] < 0.2
    assert doc["steps"] > 100


def test_report_document(capsys):
    code, out, _ = run(capsys, "report", "--n", "8", "--N", "800")
    assert code == 0
    doc = json.loads(out)
    assert set(doc["ggmt"]) == {"tightQminus", "paperOverestimate", "exactCertificate"}
    assert doc["spectrum"]["lambda0"] == pytest.approx(-1.0, abs=1e-2)
    assert doc["spectrum"]["lambda1"] > 0.2
    assert doc["rhoStar"] == pytest.approx(4.604376, abs=1e-4)


def test_repro_single_criterion(capsys):
    code, out, _ = run(capsys, "repro", "--only", "2")
    assert code == 0
    assert out.startswith("[PASS] 2")


def test_usage_and_error_paths(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["profile", "--d", "5", "--n", "7"])       # mutually exclusive
    assert exc.value.code == 2
    code, _, err = run(capsys, "profile", "--d", "2")
    assert code == 1
    assert "error:" in err
