import json
import os
import subprocess
import sys

import pytest

from gkzrec.cli import run


def _json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_compare_cp1(capsys):
    code, rep = _json(capsys, ["compare", "--model", "cpn", "--N", "2", "--w", "1,0", "--orders", "4"])
    assert code == 0 and rep["status"] == "pass"
    rows = rep["detail"]["rows"]
    assert [r["m"] for r in rows] == [0, 1, 2, 3, 4]
    assert all(r["F_m_equals_S_m"] for r in rows)


def test_reconstruct_complete_intersection(capsys):
    code, rep = _json(capsys, ["reconstruct", "--model", "ci", "--N", "3", "--n", "2",
                               "--w", "0,1,2", "--lambda", "5,7"])
    assert code == 0
    assert rep["detail"]["equal_up_to_constant"]["equal"] is True


def test_stokes_graph_writes_svg(capsys, tmp_path):
    svg = tmp_path / "g.svg"
    code, rep = _json(capsys, ["stokes-graph", "--w0", "1", "--w1", "0", "--theta", "0.5pi", "--svg", str(svg)])
    assert code == 0
    assert rep["detail"]["saddle_connections"]
    assert svg.read_text().startswith("<?xml")


@pytest.mark.parametrize("theta", ["1/2pi", "1.5707963267948966"])
def test_phase_spellings(capsys, theta):
    code, rep = _json(capsys, ["stokes-graph", "--w0", "1", "--w1", "0", "--theta", theta])
    assert code == 0 and rep["detail"]["saddle_connections"]


def test_out_file_matches_stdout(capsys, tmp_path):
    argv = ["wkb", "--model", "cpn", "--N", "2", "--w", "0,0", "--orders", "3"]
    assert run(argv) == 0
    stdout = capsys.readouterr().out
    out = tmp_path / "r.json"
    assert run(["--out", str(out)] + argv) == 0
    assert out.read_text() == stdout


def test_deterministic_output(capsys):
    argv = ["toprec", "--model", "cpn", "--N", "2", "--w", "1,0", "--g-max", "1", "--n-max", "2"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_identity_failure_exit_two(capsys):
    # hbar = -i puts x2 outside the convergence domain of the infinite product
    code, rep = _json(capsys, ["stokes-total", "--region", "x2", "--hbar=-1j"])
    assert code == 2 and rep["status"] == "fail"


def test_symbolic_total_matrix(capsys):
    code, rep = _json(capsys, ["stokes-total", "--region", "x3"])
    assert code == 0 and rep["detail"]["det"] == "1"


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["compare", "--bogus"],
    ["compare", "--model", "cpn", "--N", "2", "--w", "0.5,0"],
    ["stokes-graph", "--w0", "1", "--w1", "0", "--theta", "halfpi"],
    ["stokes-total", "--region", "x1", "--w0", "1", "--w1", "1"],
    ["report-all", "--only", "99_nope"],
])
def test_usage_errors_exit_one(capsys, argv):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_bad_model_exit_one(capsys):
    assert run(["curve", "--model", "cpn", "--N", "2", "--w", "1,1,1"]) == 1


def test_digits_env(monkeypatch, capsys):
    monkeypatch.setenv("GKZREC_DIGITS", "abc")
    assert run(["curve", "--model", "cpn", "--N", "2", "--w", "1,0"]) == 1
    monkeypatch.setenv("GKZREC_DIGITS", "30")
    assert run(["curve", "--model", "cpn", "--N", "2", "--w", "1,0"]) == 0


def test_report_all_subset(capsys):
    code, rep = _json(capsys, ["report-all", "--only", "01_cpn_wkb_closed_forms"])
    assert code == 0
    assert [r["check"] for r in rep] == ["01_cpn_wkb_closed_forms"]
    assert set(rep[0]) == {"check", "status", "detail"}


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gkzrec", "curve", "--model", "cpn", "--N", "2", "--w", "1,0"],
        capture_output=True, text=True, cwd=tmp_path, env=dict(os.environ), timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"
