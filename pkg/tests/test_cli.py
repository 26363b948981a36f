import json
import os

import pytest

from restartbandits.cli import main

SIM_CONFIG = {
    "arms": [
        {"label": "exp", "completion": {"kind": "exponential", "rate": 1.0},
         "reward": {"kind": "constant", "value": 1.0}},
        {"label": "par", "completion": {"kind": "pareto", "scale": 1.0, "shape": 1.5},
         "reward": {"kind": "bernoulli", "p": 0.8}},
    ],
    "policy": {"name": "ucb-rb", "grid": [0.5, 1.5, 4.0]},
    "horizons": [200],
    "replications": 3,
    "seed": 1,
}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


class TestRateSweep:
    def test_default_preset(self, tmp_path):
        out = str(tmp_path / "out")
        assert main(["rate-sweep", "--out", out]) == 0
        files = sorted(os.listdir(out))
        assert "rate_sweep_summary.csv" in files
        assert "manifest.json" in files
        assert sum(f.startswith("rate_sweep_gamma_") for f in files) == 4

    def test_rerun_is_bit_identical(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        cfg = write_config(tmp_path, {"gammas": [0.0, 0.5]})
        main(["rate-sweep", "--config", cfg, "--out", out1])
        main(["rate-sweep", "--config", cfg, "--out", out2])
        name = "rate_sweep_summary.csv"
        a = open(os.path.join(out1, name)).read()
        b = open(os.path.join(out2, name)).read()
        assert a == b

    def test_empty_gamma_list_summary_only(self, tmp_path):
        out = str(tmp_path / "out")
        cfg = write_config(tmp_path, {"gammas": []})
        assert main(["rate-sweep", "--config", cfg, "--out", out]) == 0
        files = os.listdir(out)
        assert not any(f.startswith("rate_sweep_gamma_") for f in files)
        lines = open(os.path.join(out, "rate_sweep_summary.csv")).read().splitlines()
        assert lines == ["gamma,t_star,rate_star"]


class TestSimulate:
    def test_report_written(self, tmp_path):
        out = str(tmp_path / "out")
        cfg = write_config(tmp_path, SIM_CONFIG)
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        lines = open(os.path.join(out, "regret_report.csv")).read().splitlines()
        assert lines[0] == "tau,policy,mean_reward,stderr,pseudo_regret,reps"
        assert len(lines) == 2

    def test_policy_override_flag_wins(self, tmp_path):
        out = str(tmp_path / "out")
        cfg = dict(SIM_CONFIG)
        cfg["policy"] = {"name": "ucb-rb", "grid": [1.0, 2.0]}
        path = write_config(tmp_path, cfg)
        assert main(["simulate", "--config", path, "--out", out, "--policy", "static"]) == 0
        body = open(os.path.join(out, "regret_report.csv")).read()
        assert ",static," in body

    def test_unknown_key_fails_with_path(self, tmp_path, capsys):
        cfg = dict(SIM_CONFIG)
        cfg["bogus"] = 1
        path = write_config(tmp_path, cfg)
        assert main(["simulate", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_bad_arm_kind_reports_key_path(self, tmp_path, capsys):
        cfg = json.loads(json.dumps(SIM_CONFIG))
        cfg["arms"][0]["completion"]["kind"] = "gamma"
        path = write_config(tmp_path, cfg)
        assert main(["simulate", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "arms[0].completion" in capsys.readouterr().err

    def test_unknown_policy_name(self, tmp_path, capsys):
        cfg = dict(SIM_CONFIG)
        cfg["policy"] = {"name": "thompson"}
        path = write_config(tmp_path, cfg)
        assert main(["simulate", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "policy.name" in capsys.readouterr().err

    def test_seed_flag_changes_results(self, tmp_path):
        cfg = write_config(tmp_path, SIM_CONFIG)
        outs = []
        for seed in (1, 2):
            out = str(tmp_path / f"out{seed}")
            main(["simulate", "--config", cfg, "--out", out, "--seed", str(seed)])
            outs.append(open(os.path.join(out, "regret_report.csv")).read())
        assert outs[0] != outs[1]

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["simulate", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")]) == 2


class TestConcentration:
    def test_coverage_csv(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"arm": {"completion": {"kind": "deterministic", "value": 1.0},
                     "reward": {"kind": "constant", "value": 1.0}},
             "t": 2.0, "estimators": ["bernstein"], "ns": [100],
             "deltas": [0.05], "replications": 50},
        )
        out = str(tmp_path / "out")
        assert main(["concentration", "--config", cfg, "--out", out]) == 0
        lines = open(os.path.join(out, "coverage.csv")).read().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("bernstein,100,0.05,0,")

    def test_empty_delta_list_header_only(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"arm": {"completion": {"kind": "deterministic", "value": 1.0},
                     "reward": {"kind": "constant", "value": 1.0}},
             "t": 2.0, "ns": [100], "deltas": [], "replications": 10},
        )
        out = str(tmp_path / "out")
        assert main(["concentration", "--config", cfg, "--out", out]) == 0
        lines = open(os.path.join(out, "coverage.csv")).read().splitlines()
        assert len(lines) == 1


class TestSat:
    def test_bundled_smoke_preset(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"reps": 2, "cap": 20000, "taus": [2000.0], "replications": 2,
             "policies": ["luby"], "luby_bases": [30.0]},
        )
        out = str(tmp_path / "out")
        assert main(["sat", "--config", cfg, "--out", out]) == 0
        files = os.listdir(out)
        assert "samples.csv" in files and "sat_report.csv" in files
        report = open(os.path.join(out, "sat_report.csv")).read()
        assert "luby[30]" in report

    def test_missing_instance_file(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {"instances": {"kind": "files", "paths": ["/nonexistent.cnf"]}},
        )
        assert main(["sat", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "missing file" in capsys.readouterr().err


class TestManifest:
    def test_contents(self, tmp_path):
        cfg_path = write_config(tmp_path, SIM_CONFIG)
        out = str(tmp_path / "out")
        main(["simulate", "--config", cfg_path, "--out", out])
        manifest = json.load(open(os.path.join(out, "manifest.json")))
        assert manifest["command"] == "simulate"
        assert manifest["config"]["replications"] == 3
        assert cfg_path in manifest["inputs"]
        assert "restartbandits" in manifest["versions"]
