"""cli: commands, output formats and the exit-code contract."""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from cohaq.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from cohaq.verify import SUITE_NAMES

QUIVERS = Path(__file__).resolve().parents[1] / "quivers"
JORDAN = str(QUIVERS / "jordan.json")
POINT = str(QUIVERS / "point.json")
A2 = str(QUIVERS / "a2.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_suites(capsys):
    code, out, _ = run(capsys, "list-suites")
    assert code == EXIT_OK
    assert [line.split()[0] for line in out.splitlines()] == SUITE_NAMES
    code, out, _ = run(capsys, "list-suites", "--json")
    data = json.loads(out)
    assert [s["name"] for s in data] == SUITE_NAMES and len(data) == 10


def test_rmatrix_example(capsys):
    code, out, _ = run(capsys, "rmatrix", "--quiver", JORDAN, "--d1", "1", "--d2", "1", "--mode", "full")
    assert code == EXIT_OK
    assert out.strip() == "(h - x[1,1,1] + x[2,1,1] + z)/(-h - x[1,1,1] + x[2,1,1] + z)"


def test_rmatrix_series_and_json(capsys):
    code, out, _ = run(capsys, "rmatrix", "--quiver", JORDAN, "--d1", "1", "--d2", "1", "--order", "2", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["mode"] == "full" and data["d1"] == [1]
    assert data["series"].startswith("1 + ")
    code, _, err = run(capsys, "rmatrix", "--quiver", JORDAN, "--d1", "1", "--d2", "1", "--mode", "localised", "--order", "2")
    assert code == EXIT_USAGE and "spectral" in err


def test_coproduct_and_product(capsys):
    code, out, _ = run(capsys, "coproduct", "--quiver", POINT, "--class", "1", "--d1", "1", "--d2", "1")
    assert code == EXIT_OK and out.strip() == "-x[1,1,1] + x[2,1,1] - z"
    code, out, _ = run(capsys, "coproduct", "--quiver", POINT, "--class", "1", "--d1", "1", "--d2", "1", "--kind", "localised")
    assert code == EXIT_OK and out.strip() == "-x[1,1,1] + x[2,1,1]"
    code, out, _ = run(capsys, "coha-mult", "--quiver", POINT, "--a", "x[1,1]", "--da", "1", "--b", "1", "--db", "1")
    assert code == EXIT_OK and out.strip() == "-1"
    code, _, err = run(capsys, "coproduct", "--quiver", POINT, "--class", "x[1,1]", "--d1", "1", "--d2", "1")
    assert code == EXIT_USAGE and "symmetric" in err


def test_verify_pass_and_json(capsys):
    code, out, _ = run(capsys, "verify", "--quiver", JORDAN, "--suite", "psi,coassoc", "--max-dim", "2")
    assert code == EXIT_OK and out.rstrip().endswith("result: PASS")
    code, out, _ = run(capsys, "verify", "--quiver", JORDAN, "--suite", "psi", "--max-dim", "2", "--json")
    assert json.loads(out)["schema"] == "cohaq.verify/1"


def test_verify_failure_exit_code(capsys, monkeypatch):
    import cohaq.verify as V
    from cohaq.spectral import SpectralFraction

    monkeypatch.setattr(V, "_hexagon_factor", lambda k, num: SpectralFraction(1))
    code, out, _ = run(capsys, "verify", "--quiver", A2, "--suite", "hexagon", "--max-dim", "2")
    assert code == EXIT_FAIL
    assert "first counterexample" in out


def test_verify_rejections(capsys):
    code, _, err = run(capsys, "verify", "--quiver", JORDAN, "--suite", "nope")
    assert code == EXIT_USAGE
    assert "valid names" in err and "davison-joyce" in err
    code, out, err = run(capsys, "verify", "--quiver", A2, "--suite", "bps", "--max-dim", "2")
    assert code == EXIT_USAGE and "rejected" in err and "SKIPPED" in out
    # an explicitly requested inapplicable suite is rejected even next to others
    code, out, _ = run(capsys, "verify", "--quiver", A2, "--suite", "colocality,psi", "--max-dim", "1")
    assert code == EXIT_USAGE


def test_bps_command(capsys):
    code, out, _ = run(capsys, "bps", "--quiver", POINT, "--max-dim", "3", "--order", "6")
    assert code == EXIT_OK
    assert "Omega_(1) = 1*q^1 + O(q^7)" in out and "Omega_(2) = O(q^7)" in out and "integral: yes" in out
    code, _, err = run(capsys, "bps", "--quiver", A2)
    assert code == EXIT_USAGE and "symmetric" in err


def test_yangian_command(capsys):
    code, out, _ = run(capsys, "yangian", "--quiver", str(QUIVERS / "a2.json"), "--check", "r2,drinfeld", "--order", "3", "--max-exp", "1")
    assert code == EXIT_OK, out
    code, _, err = run(capsys, "yangian", "--quiver", A2, "--check", "r9")
    assert code == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["rmatrix", "--quiver", JORDAN, "--d1", "1"],
        ["rmatrix", "--quiver", JORDAN, "--d1", "a", "--d2", "1"],
        ["rmatrix", "--quiver", JORDAN, "--d1", "1,1", "--d2", "1"],
        ["rmatrix", "--quiver", JORDAN, "--d1", "1", "--d2", "1", "--order", "0"],
        ["verify", "--quiver", JORDAN, "--max-dim", "-1"],
        ["coha-mult", "--quiver", POINT, "--a", "x[1,1", "--da", "1", "--b", "1", "--db", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err.startswith("cohaq: error:")


def test_quiver_file_errors(capsys, tmp_path):
    missing = tmp_path / "nope.json"
    code, _, err = run(capsys, "verify", "--quiver", str(missing))
    assert code == EXIT_USAGE and "not found" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["1"],\n "edges": [}')
    code, _, err = run(capsys, "verify", "--quiver", str(bad))
    assert code == EXIT_USAGE and "line 2" in err
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"vertices": ["1"], "edges": [{"src": "1", "tgt": "9"}]}))
    code, _, err = run(capsys, "verify", "--quiver", str(wrong))
    assert code == EXIT_USAGE and "edge 0" in err


def test_console_script_is_deterministic(tmp_path):
    exe = shutil.which("cohaq")
    cmd = [exe] if exe else [sys.executable, "-m", "cohaq.cli"]
    argv = cmd + ["verify", "--quiver", JORDAN, "--suite", "psi,bps", "--max-dim", "2", "--json"]
    first = subprocess.run(argv, capture_output=True, check=True)
    second = subprocess.run(argv, capture_output=True, check=True)
    assert first.stdout == second.stdout and first.returncode == 0


def test_verify_all_reports_inapplicable_suites_as_skipped(capsys):
    code, out, _ = run(capsys, "verify", "--quiver", A2, "--suite", "all", "--max-dim", "1")
    assert code == EXIT_OK
    assert out.count("[SKIPPED]") == 3 and "[FAIL" not in out
