import json
import subprocess
import sys

import numpy as np
import pytest

from killingchain.cli import (
    CHECKS, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, ConfigError, RunConfig, export_report, main,
    reports_csv, reports_json, run_checks,
)
from killingchain.report import ResidualReport


def test_exit_zero_for_schwarzschild_time_translation():
    status, reports = run_checks(RunConfig("schwarzschild", "d_t", ["killing", "lemmas", "maxwell"],
                                           count=10))
    assert status == EXIT_OK
    assert {r.check_id for r in reports} >= {"killing", "lemmas.lorenz", "maxwell.dF"}


def test_exit_one_for_negative_control(capsys, tmp_path):
    assert main(["verify", "--scenario", "schwarzschild", "--killing", "r_dr",
                 "--checks", "killing", "--count", "5", "--out", str(tmp_path)]) == EXIT_FAIL
    assert (tmp_path / "report.json").exists() and (tmp_path / "report.csv").exists()
    assert "fail" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["verify", "--scenario", "kerr"],
    ["verify", "--checks", "bogus"],
    ["verify", "--killing", "d_x"],
    ["verify", "--count", "0"],
    ["verify", "--tolerance", "killing=-1"],
    ["verify", "--params", "m"],
    ["verify", "--scenario-file", "/nonexistent/file.json"],
])
def test_exit_two_for_configuration_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("minkowski", "d_t", []).validate()
    RunConfig("minkowski", "d_t", list(CHECKS)).validate()


def test_tolerance_override_changes_status():
    cfg = RunConfig("schwarzschild", "r_dr", ["killing"], count=5, tolerances={"killing": 1e6})
    status, reports = run_checks(cfg)
    assert status == EXIT_OK and reports[0].tolerance == 1e6


def test_empty_json_and_two_row_csv(tmp_path):
    assert json.loads(reports_json([])) == []
    assert reports_json([]).strip() == "[]"
    r = ResidualReport("killing", "minkowski", "d_t", np.zeros((2, 4)), [0.0, 1e-12], 1e-10)
    text = reports_csv([r])
    lines = text.split("\n")
    assert lines[0] == "check_id,x0,x1,x2,x3,residual,tolerance,pass"
    assert len(lines) == 4 and lines[-1] == ""  # header, two rows, trailing newline
    assert lines[2] == "killing,0,0,0,0,9.9999999999999998e-13,1e-10,true"   # 17 significant digits
    path = export_report([r], "json", tmp_path / "sub" / "r.json")
    data = json.loads(path.read_text())
    assert set(data[0]) >= {"check_id", "scenario", "killing_field", "conventions", "max_residual",
                            "mean_residual", "tolerance", "pass", "per_point"}
    assert data[0]["per_point"][1] == {"coords": [0.0, 0.0, 0.0, 0.0], "residual": 1e-12}
    assert set(data[0]["conventions"]) == {"signature", "orientation", "units"}


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        export_report([], "json", blocker / "x.json")
    assert main(["verify", "--scenario", "minkowski", "--count", "2", "--out", str(tmp_path),
                 "--json", str(blocker / "x.json")]) == EXIT_CONFIG


def test_komar_subcommand_reports_table(tmp_path, capsys):
    assert main(["komar", "--scenario", "schwarzschild", "--radii", "50,100,200",
                 "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "r = 50:" in out and "extrapolated energy: 0.99999" in out
    data = json.loads((tmp_path / "komar.json").read_text())
    assert [row["radius"] for row in data[0]["table"]] == [50.0, 100.0, 200.0]
    assert abs(data[0]["values"]["energy"] - 1.0) < 1e-6


def test_findings_do_not_fail_the_run():
    status, reports = run_checks(RunConfig("schwarzschild", "d_t", ["teleparallel"], count=4))
    assert status == EXIT_OK and reports[0].status == "gauge-violated"


def test_list_scenarios_entry_point():
    out = subprocess.run([sys.executable, "-m", "killingchain", "list-scenarios"],
                         capture_output=True, text=True, check=True).stdout
    assert "schwarzschild" in out and "de_sitter" in out and "minkowski" in out
