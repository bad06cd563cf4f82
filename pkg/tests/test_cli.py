from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hmskit.cli import main, thread_cap


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_hh_small_case(capsys):
    code, out = run_json(capsys, "hh", "--n", "2")
    assert code == 0
    assert (out["hh1"], out["hh2"]) == (3, 7)
    assert out["schema"] == "1"
    assert all(c["status"] == "pass" for c in out["checks"])


def test_hh_failing_case_exits_one(capsys):
    # the computed (4, 11) differs from the tabulated (4, 9)
    code, out = run_json(capsys, "hh", "--n", "3")
    assert code == 1
    assert (out["hh1"], out["hh2"]) == (4, 11)
    assert out["ok"] is False


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["hh", "--n", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_json_is_deterministic(capsys):
    first = run_json(capsys, "critical", "--n", "3")
    second = run_json(capsys, "critical", "--n", "3")
    assert first == second
    assert "runtime" not in json.dumps(first[1])


def test_zonotope_and_flow(capsys):
    code, out = run_json(capsys, "zonotope", "--n", "1", "--check-lifts", "--thimbles")
    assert code == 0
    code, out = run_json(capsys, "flow", "--n", "2", "--k", "2", "--t", "0.1")
    assert code == 0


def test_flow_csv(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    code = main(["flow", "--n", "1", "--k", "2", "--t", "0.01", "--csv", str(path)])
    assert code == 0
    assert path.read_text().startswith("t,")


def test_coamoeba_writes_files(tmp_path, capsys):
    prefix = tmp_path / "fig"
    code, out = run_json(capsys, "coamoeba", "--n", "1", "--resolution", "64", "--out", str(prefix) + ".ppm")
    assert code == 0
    assert (tmp_path / "fig.ppm").exists() and (tmp_path / "fig.svg").exists()


def test_unwritable_output_exits_one(tmp_path, capsys):
    code = main(["coamoeba", "--n", "1", "--resolution", "16", "--out", str(tmp_path / "missing" / "fig")])
    assert code == 1


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("HMSKIT_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("HMSKIT_THREADS", "zero")
    with pytest.raises(ValueError):
        thread_cap()


def test_console_entry_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "hmskit.cli", "critical", "--n", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("OK")
