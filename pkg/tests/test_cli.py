import json

import numpy as np
import pytest

from siruv.cli import run_cli
from siruv.io import read_trajectory

FAST = {"solver": {"dt": 0.05, "t_end": 100.0}}


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "fast.json"
    path.write_text(json.dumps(FAST))
    return path


def test_simulate(fast_config, tmp_path, capsys):
    out = tmp_path / "run"
    assert run_cli(["simulate", "--config", str(fast_config), "--model", "legacy", "--out", str(out)]) == 0
    traj = read_trajectory(out / "trajectory.csv")
    assert traj.states.shape == (101, 3, 5)
    summary = json.loads((out / "conservation.json").read_text())
    assert summary["model"] == "legacy"
    assert summary["conservation"]["breached"] is False
    assert "legacy" in capsys.readouterr().out


def test_simulate_single_patch_reference(fast_config, tmp_path):
    out = tmp_path / "run"
    assert run_cli(["simulate", "--config", str(fast_config), "--model", "single", "--out", str(out)]) == 0
    assert read_trajectory(out / "trajectory.csv").states.shape == (101, 3, 5)


def test_compare_decoupled(fast_config, tmp_path):
    out = tmp_path / "cmp"
    assert run_cli(["compare-decoupled", "--config", str(fast_config), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["models"]["effective"]["decoupling"] == "pass"
    assert report["models"]["legacy"]["decoupling"] == "fail"
    for name in ("effective_decoupled", "legacy_decoupled", "single_patch", "effective_coupled", "legacy_coupled"):
        assert (out / f"{name}.csv").exists()
    single = read_trajectory(out / "single_patch.csv")
    effective = read_trajectory(out / "effective_decoupled.csv")
    assert np.abs(single.states - effective.states).max() <= 1e-6


def test_compare_skip_coupled(fast_config, tmp_path):
    out = tmp_path / "cmp"
    assert run_cli(["compare-decoupled", "--config", str(fast_config), "--out", str(out), "--skip-coupled"]) == 0
    assert not (out / "legacy_coupled.csv").exists()


def test_presets(capsys):
    assert run_cli(["presets", "list"]) == 0
    assert "paper-3patch" in capsys.readouterr().out
    assert run_cli(["presets", "show", "single-patch"]) == 0
    assert json.loads(capsys.readouterr().out)["n"] == 1


def test_unknown_subcommand(capsys):
    assert run_cli(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_arguments():
    assert run_cli([]) == 1
    assert run_cli(["simulate"]) == 1


def test_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "P": [[0.5, 0.6], [0.5, 0.5]]}))
    assert run_cli(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "row 0" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert run_cli(["simulate", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 1


def test_numerical_failure(tmp_path, capsys):
    cfg = tmp_path / "stiff.json"
    cfg.write_text(json.dumps({"patches": [{"beta": 20.0, "alpha": 1.0}] * 3, "solver": {"dt": 0.5, "t_end": 50}}))
    with np.errstate(all="ignore"):
        assert run_cli(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "numerical failure" in capsys.readouterr().err
