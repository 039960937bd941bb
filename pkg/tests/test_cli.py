"""The ``rho-select`` command line."""

import json
import shutil
import subprocess
import sys

import pytest
import yaml

import scenarios
from rhosel import cli
from rhosel.expfam import NumericalError


@pytest.fixture
def config_path(tmp_path):
    raw = scenarios.piecewise_recovery()
    raw["n"] = 300
    raw["menu"] = {"kind": "dyadic-poly", "s_max": 3, "r_max": 1}
    raw["mc_points"] = 2000
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(raw))
    return path


def test_simulate_then_select_from_file(config_path, tmp_path, capsys):
    data = tmp_path / "data.csv"
    assert cli.main(["simulate", str(config_path), "--out", str(data)]) == 0
    assert data.read_text().startswith("w1,y\n")
    out = tmp_path / "report.json"
    assert cli.main(["select", str(config_path), "--data", str(data), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["n"] == 300
    assert report["selected"].startswith("dyadic-poly")
    assert report["mc_risk"] >= 0


def test_select_is_byte_identical(config_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["select", str(config_path), "--out", str(a)]) == 0
    assert cli.main(["select", str(config_path), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_vc_and_weights_tables(config_path, capsys):
    assert cli.main(["vc", str(config_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "model,kind,V"
    assert len(lines) == 1 + 4 * 2
    assert cli.main(["weights", str(config_path)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "model,kind,delta"


def test_rate_writes_tables(config_path, tmp_path, capsys):
    raw = yaml.safe_load(config_path.read_text())
    raw["rate"] = {"n_grid": [100, 200], "reps": 5}
    config_path.write_text(yaml.safe_dump(raw))
    prefix = tmp_path / "study"
    assert cli.main(["rate", str(config_path), "--out-prefix", str(prefix)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_grid"] == [100, 200]
    assert (tmp_path / "study.csv").read_text().startswith("n,rep,mc_risk")
    assert json.loads((tmp_path / "study.json").read_text())["reps"] == 5


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("family: poisson\nn: 10\n")
    assert cli.main(["select", str(path)]) == 2
    assert "config error" in capsys.readouterr().err
    assert cli.main(["select", str(tmp_path / "missing.yaml")]) == 2


def test_unreadable_data_exit_code(config_path, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("w1,y\n0.5,abc\n")
    assert cli.main(["select", str(config_path), "--data", str(bad)]) == 2


def test_out_of_support_data_exit_code(tmp_path):
    raw = scenarios.variable_selection("bernoulli")
    raw["covariates"] = {"law": "uniform", "d": 1}
    raw["truth"] = {"kind": "external"}
    raw["menu"] = {"kind": "linear-varsel"}
    path = tmp_path / "b.yaml"
    path.write_text(yaml.safe_dump(raw))
    data = tmp_path / "d.csv"
    data.write_text("w1,y\n0.1,0\n0.2,3\n")
    assert cli.main(["select", str(path), "--data", str(data)]) == 2


def test_numerical_failure_exit_code(config_path, monkeypatch):
    def boom(*args, **kwargs):
        raise NumericalError("quadrature failed")

    monkeypatch.setattr(cli, "run_selection", boom)
    assert cli.main(["select", str(config_path)]) == 3


def test_console_script_is_installed(config_path):
    exe = shutil.which("rho-select")
    cmd = [exe] if exe else [sys.executable, "-m", "rhosel.cli"]
    res = subprocess.run(cmd + ["weights", str(config_path)], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("model,kind,delta")
