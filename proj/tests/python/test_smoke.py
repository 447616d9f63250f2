import json
import math
import os
import subprocess
from pathlib import Path

import pytest

import meshrl

CLI = os.environ.get("MESHRL_CLI")
CONFIGS = Path(os.environ.get("MESHRL_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))

TINY = {
    "seed": 5,
    "collection": {"steps": 1200},
    "surrogate": {"num_trees": 6},
    "training": {"total_steps": 1024, "hidden": 16},
    "evaluation": {"random_steps": 10, "sinusoidal_steps": 10, "baselines": False},
}


def test_grid_and_rewards():
    grid = meshrl.ActionGrid(6)
    assert len(grid) == 1296
    assert grid[0] == meshrl.Action(0, 0, 0, 0)
    mo1 = meshrl.ManagementObjective(meshrl.ObjectiveKind.MO1)
    assert math.isclose(meshrl.reward(mo1, 10, 10, grid[0], 0.0, 0.0), 20 * 0.99995, rel_tol=1e-4)
    assert meshrl.carried_load(10, 0.4) == pytest.approx(6.0)
    assert meshrl.normalized_reward(0.0, 0.0) == (1.0, False)


def test_ground_truth_and_oracle():
    gt = meshrl.GroundTruthParams()
    gt.noise_rel = 0.0
    out = meshrl.expected_step(gt, 10, 10, meshrl.Action(1, 0, 0, 0))
    assert out.d1 == pytest.approx(0.035)
    assert out.d2 == pytest.approx(0.065)
    mo1 = meshrl.ManagementObjective(meshrl.ObjectiveKind.MO1)
    res = meshrl.optimal_ground_truth(gt, mo1, 5, 5)
    assert res.best_action.b1 == 0 and res.best_action.b2 == 0


def test_surrogate_round_trip(tmp_path):
    trace = meshrl.collect_trace_random(meshrl.GroundTruthParams(), 600, 1)
    train, test = trace.split()
    model = meshrl.fit_system_model(train, num_trees=5)
    acc = meshrl.evaluate_model(model, test)
    assert acc.samples == len(test)
    path = str(tmp_path / "model.bin")
    model.save(path)
    again = meshrl.SystemModel.load(path)
    assert again.predict(10, 10, 0.5, 0.5, 0, 0) == model.predict(10, 10, 0.5, 0.5, 0, 0)


def test_config_errors():
    with pytest.raises(meshrl.ConfigError):
        meshrl.ScenarioConfig.from_json('{"bogus": 1}')
    cfg = meshrl.ScenarioConfig.from_json(json.dumps(TINY))
    assert cfg.seed == 5


def test_run_pipeline(tmp_path):
    cfg = meshrl.ScenarioConfig.from_json(json.dumps(dict(TINY, output_dir=str(tmp_path))))
    rows = meshrl.run_pipeline(cfg)
    assert len(rows) == 4
    assert {r[1] for r in rows} == {"simulation", "ground-truth"}
    assert all(0.0 <= r[4] <= 1.0 + 1e-9 for r in rows)
    assert (tmp_path / "results.csv").exists()


@pytest.mark.skipif(not CLI, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cfg = tmp_path / "tiny.json"
    cfg.write_text(json.dumps(dict(TINY, output_dir=str(tmp_path / "out"))))
    ok = subprocess.run([CLI, "pipeline", "--config", str(cfg)], capture_output=True, text=True)
    assert ok.returncode == 0, ok.stderr
    assert ok.stdout.splitlines()[1] == "scenario,environment,load_pattern,steps,anr"

    bad = tmp_path / "bad.json"
    bad.write_text('{"training": {"learning_rate": -1}}')
    res = subprocess.run([CLI, "collect", "--config", str(bad)], capture_output=True, text=True)
    assert res.returncode == 1
    assert "training.learning_rate" in res.stderr

    strict_cfg = dict(TINY, output_dir=str(tmp_path / "strict"), floors={"trained_anr": 1.01})
    cfg.write_text(json.dumps(strict_cfg))
    res = subprocess.run([CLI, "pipeline", "--strict", "--config", str(cfg)],
                         capture_output=True, text=True)
    assert res.returncode == 3

    res = subprocess.run([CLI, "sweep", "--delay-model", "ground-truth", "--l1", "20", "--l2", "5",
                          "--out", str(tmp_path / "sw")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "sw" / "sweep_MO1_20_5.csv").exists()

    assert subprocess.run([CLI, "frobnicate"], capture_output=True).returncode == 1


def test_shipped_configs_parse():
    for name in ("default.json", "smoke.json"):
        meshrl.ScenarioConfig.load(str(CONFIGS / name))
