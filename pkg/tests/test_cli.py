import json
import os

import pytest

from prs3.cli import main


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


def test_parasitic_csv_contract(tmp_path):
    assert main(["parasitic", "--grid", "5", "--z", "0.39",
                 "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "parasitic.csv")
    assert lines[0] == "theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,torsion_deg,converged"
    assert len(lines) == 1 + 25
    center = lines[1 + 12].split(",")
    assert center == ["0", "0", "0", "0", "0", "1"]
    # default tilt limit: first/last nodes at -/+40 deg
    assert lines[1].split(",")[0] == "-40"
    assert lines[-1].split(",")[0] == "40"
    manifest = json.loads((tmp_path / "parasitic.manifest.json").read_text())
    assert manifest["command"] == "parasitic"
    assert manifest["config"]["r_base"] == pytest.approx(0.326923)
    assert "x_par_mm" in manifest["summary"]


def test_parasitic_grid_3(tmp_path):
    assert main(["parasitic", "--grid", "3", "--out", str(tmp_path)]) == 0
    assert len(read_lines(tmp_path / "parasitic.csv")) == 1 + 9


def test_stiffness_csv_contract(tmp_path):
    assert main(["stiffness", "--grid", "5", "--space", "both",
                 "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "stiffness.csv")
    assert lines[0] == ("theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,"
                        "kpx,kpy,kpz,kax,kay,kaz")
    assert len(lines) == 1 + 25
    center = lines[1 + 12].split(",")
    kpx, kpy = float(center[4]), float(center[5])
    assert kpx == pytest.approx(kpy, rel=1e-9)
    manifest = json.loads((tmp_path / "stiffness.manifest.json").read_text())
    assert manifest["units"]["kax"] == "N*m/rad"
    for col in ("kpx", "kpy", "kpz", "kax", "kay", "kaz"):
        assert "max" in manifest["summary"][col]
        assert "min" in manifest["summary"][col]


def test_trajectory_csv_contract(tmp_path):
    assert main(["trajectory", "--shape", "ramp", "--amplitude-deg", "0",
                 "--duration", "0.05", "--step", "1e-3",
                 "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "trajectory.csv")
    assert lines[0] == ("t,theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,"
                        "torsion_deg,residual_m")
    # zero-amplitude ramp: constant (all-zero) parasitic columns
    assert len(lines) == 1 + 51
    for line in lines[1:]:
        cols = line.split(",")
        assert cols[3] == "0" and cols[4] == "0" and cols[5] == "0"


def test_trajectory_circle_holonomy(tmp_path):
    assert main(["trajectory", "--shape", "circle", "--amplitude-deg", "10",
                 "--duration", "1.0", "--step", "1e-3",
                 "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "trajectory.csv")
    first = [float(v) for v in lines[1].split(",")]
    last = [float(v) for v in lines[-1].split(",")]
    # closed tilt loop: parasitic translation returns to start (< 1e-8 m = 1e-5 mm)
    assert abs(last[3] - first[3]) < 1e-5
    assert abs(last[4] - first[4]) < 1e-5


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["parasitic", "--grid", "notanumber"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_computation_error_exit_code(tmp_path, capsys):
    # even grid resolution violates the sweep contract -> computation error
    assert main(["parasitic", "--grid", "4", "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_config_file_and_set_override(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text("tilt_limit_deg: 20\n")
    assert main(["parasitic", "--grid", "3", "--config", str(cfg_path),
                 "--set", "r_platform=0.24", "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "parasitic.csv")
    assert lines[1].split(",")[0] == "-20"
    manifest = json.loads((tmp_path / "parasitic.manifest.json").read_text())
    assert manifest["config"]["r_platform"] == 0.24


def test_env_var_default_config(tmp_path, monkeypatch):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text("tilt_limit_deg: 10\n")
    monkeypatch.setenv("PRS3_CONFIG", str(cfg_path))
    assert main(["parasitic", "--grid", "3", "--out", str(tmp_path)]) == 0
    assert read_lines(tmp_path / "parasitic.csv")[1].split(",")[0] == "-10"


def test_rerun_byte_identical(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        assert main(["stiffness", "--grid", "5", "--out", str(out)]) == 0
    assert (out1 / "stiffness.csv").read_bytes() == (out2 / "stiffness.csv").read_bytes()
    # atomic write: no leftover temp files
    assert not [f for f in os.listdir(out1) if f.endswith(".tmp")]
