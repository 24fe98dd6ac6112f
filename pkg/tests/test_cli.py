"""Command line behaviour, exercised in-process through main()."""

import dataclasses
import json

import pytest

from chargeplan.cli import main
from chargeplan.scenario import DESK_PRESET, generate_scenario, save_scenario
from chargeplan.schedule import load_schedule


@pytest.fixture()
def tiny_scenario_file(tmp_path):
    params = dataclasses.replace(DESK_PRESET, n=5)
    sc = generate_scenario(seed=7, params=params)
    path = tmp_path / "scenario.json"
    save_scenario(sc, path)
    return path


def test_plan_stdout_json(tiny_scenario_file, capsys):
    code = main(["plan", "--config", str(tiny_scenario_file),
                 "--scheme", "node:funceqv:greedy"])
    assert code == 0
    out = capsys.readouterr()
    doc = json.loads(out.out)
    assert set(doc) >= {"items", "tour"}
    assert all(set(it) >= {"state", "t"} for it in doc["items"])
    assert "e_loss_total=" in out.err


def test_plan_out_directory_and_reruns_match(tiny_scenario_file, tmp_path):
    args = ["plan", "--config", str(tiny_scenario_file), "--scheme",
            "node:funceqv:lkh_style"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("schedule.json", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()
    sched = load_schedule(tmp_path / "a" / "schedule.json")
    assert sched.items and sched.tour


def test_plan_seeded_scenario(tmp_path, capsys):
    code = main(["plan", "--seed", "3", "--preset", "desk",
                 "--scheme", "cluster:funceqv:greedy",
                 "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "schedule.json").exists()


def test_plan_rejects_unknown_scheme(tiny_scenario_file, capsys):
    code = main(["plan", "--config", str(tiny_scenario_file),
                 "--scheme", "node:funceqv:warp"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_experiment_subcommand(tmp_path, capsys):
    config = {"schemes": ["node:funceqv:greedy"], "seeds": 2, "n": 4,
              "ratios": [1.0], "planner": {"refine_steps": 24}}
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    out_dir = tmp_path / "results"
    code = main(["experiment", "--config", str(cfg_path),
                 "--out", str(out_dir), "--jobs", "1"])
    assert code == 0
    lines = (out_dir / "metrics.csv").read_text().splitlines()
    assert len(lines) == 3  # header + two seeds
    assert "2 runs ok" in capsys.readouterr().err


def test_experiment_requires_out_dir(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({"schemes": ["node:funceqv:greedy"]}))
    assert main(["experiment", "--config", str(cfg_path)]) == 2


def test_experiment_bad_config_exit(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({"schemes": ["node:funceqv:greedy"],
                                    "bogus": True}))
    code = main(["experiment", "--config", str(cfg_path),
                 "--out", str(tmp_path / "x")])
    assert code == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_oracle_pass_and_fail(tiny_scenario_file, tmp_path, capsys):
    out_dir = tmp_path / "plan"
    assert main(["plan", "--config", str(tiny_scenario_file),
                 "--scheme", "node:funceqv:greedy",
                 "--out", str(out_dir)]) == 0
    sched_path = out_dir / "schedule.json"
    code = main(["oracle", str(sched_path),
                 "--config", str(tiny_scenario_file)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("[PASS]") >= 2 and "[FAIL]" not in out

    doc = json.loads(sched_path.read_text())
    doc["items"] = [it for it in doc["items"] if it["state"] != 1][:1]
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    code = main(["oracle", str(broken),
                 "--config", str(tiny_scenario_file)])
    out = capsys.readouterr().out
    assert code == 1
    assert "[FAIL]" in out
