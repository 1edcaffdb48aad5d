import csv
import io
import json
import subprocess
import sys

import pytest

from irsdfrc.config import RunConfig, parse_config, parse_config_dict, run_config_to_dict
from irsdfrc.errors import ConfigError


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "irsdfrc", *args],
        capture_output=True,
        text=True,
        timeout=300,
    )
    return proc


def minimal_config_dict(**extra):
    d = {
        "scenario": {
            "n_tx": 4,
            "n_rx": 2,
            "n_irs_y": 3,
            "n_irs_z": 1,
            "power_budget": 4.0,
            "cascaded_gain": [0.8, 0.0],
            "rng_seed": 5,
        },
        "method": "mm",
        "alpha": 0.9,
        "outer_max_iter": 20,
    }
    d.update(extra)
    return d


def write_config(tmp_path, d, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


class TestParseConfig:
    def test_minimal_defaults_and_round_trip(self):
        cfg = parse_config_dict(minimal_config_dict())
        assert cfg.outer_tol == 1e-5
        assert cfg.mm.max_iter == 500
        again = parse_config_dict(run_config_to_dict(cfg))
        assert again == cfg

    def test_alpha_range_rejected(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config_dict(minimal_config_dict(alpha=1.5))

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config_dict(minimal_config_dict(surprise=1))

    def test_unknown_section_key_rejected(self):
        with pytest.raises(ConfigError, match="mm"):
            parse_config_dict(minimal_config_dict(mm={"bogus": 1}))

    def test_tradeoff_regime_config_accepted(self):
        d = minimal_config_dict()
        d["scenario"].update({"n_tx": 16, "n_irs_y": 6, "n_irs_z": 6, "power_budget": 1000.0})
        cfg = parse_config_dict(d)
        assert cfg.scenario.n_irs == 36
        assert cfg.scenario.power_budget == 1000.0

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"method": mm}')
        with pytest.raises(ConfigError, match="line 1"):
            parse_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            parse_config(tmp_path / "nope.json")


class TestCliSolve:
    def test_csv_columns_and_exit_zero(self, tmp_path):
        path = write_config(tmp_path, minimal_config_dict())
        out = tmp_path / "report.csv"
        proc = run_cli("solve", "--config", path, "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0].keys()) == ["iteration", "objective", "gamma_r_db_gain", "gamma_u_db_gain", "wall_ns"]
        assert rows[0]["iteration"] == "0"
        assert float(rows[0]["gamma_r_db_gain"]) == 0.0

    def test_json_format(self, tmp_path):
        path = write_config(tmp_path, minimal_config_dict())
        proc = run_cli("solve", "--config", path, "--format", "json")
        assert proc.returncode == 0, proc.stderr
        doc = json.loads(proc.stdout)
        assert doc["converged"] is True
        assert doc["iterations"][0]["gamma_r_db_gain"] == 0.0

    def test_config_error_exit_two(self, tmp_path):
        path = write_config(tmp_path, minimal_config_dict(alpha=2.0))
        proc = run_cli("solve", "--config", path)
        assert proc.returncode == 2
        assert "configuration error" in proc.stderr

    def test_missing_config_exit_two(self):
        proc = run_cli("solve", "--config", "/does/not/exist.json")
        assert proc.returncode == 2

    def test_non_convergence_exit_three(self, tmp_path):
        d = minimal_config_dict(outer_max_iter=1, outer_tol=1e-300)
        path = write_config(tmp_path, d)
        proc = run_cli("solve", "--config", path)
        assert proc.returncode == 3

    def test_method_and_seed_overrides(self, tmp_path):
        path = write_config(tmp_path, minimal_config_dict())
        a = run_cli("solve", "--config", path, "--seed", "11", "--format", "json")
        b = run_cli("solve", "--config", path, "--seed", "12", "--format", "json")
        # A slow seed may stop on the iteration cap (exit 3); output is still written.
        assert a.returncode in (0, 3) and b.returncode in (0, 3)
        assert json.loads(a.stdout)["iterations"] != json.loads(b.stdout)["iterations"]


class TestCliOracleValidate:
    def test_guard_exit_four(self, tmp_path):
        d = minimal_config_dict()
        d["scenario"]["n_irs_y"] = 5
        path = write_config(tmp_path, d)
        proc = run_cli("oracle-validate", "--config", path)
        assert proc.returncode == 4
        assert "oracle guard" in proc.stderr

    def test_emits_ratio_rows(self, tmp_path):
        d = minimal_config_dict(oracle={"k_levels": 16, "trials": 1})
        path = write_config(tmp_path, d)
        proc = run_cli("oracle-validate", "--config", path, "--method", "mm")
        assert proc.returncode == 0, proc.stderr
        rows = list(csv.DictReader(io.StringIO(proc.stdout)))
        assert len(rows) == 3  # mm, rmo, mbnb for one trial
        assert {r["method"] for r in rows} == {"mm", "rmo", "mbnb"}


class TestCliSweepAndBench:
    def test_sweep_alpha_csv(self, tmp_path):
        d = minimal_config_dict(sweep={"alphas": [0.9, 0.1], "trials": 1})
        path = write_config(tmp_path, d)
        proc = run_cli("sweep-alpha", "--config", path)
        assert proc.returncode == 0, proc.stderr
        rows = list(csv.DictReader(io.StringIO(proc.stdout)))
        assert [r["alpha"] for r in rows] == ["0.1", "0.9"]
        assert all(r["radar_gain_db_var"] == "0.0" for r in rows)

    def test_bench_n_csv(self, tmp_path):
        d = minimal_config_dict(bench={"n_list": [3, 4], "trials": 1, "methods": ["mm"]})
        path = write_config(tmp_path, d)
        proc = run_cli("bench-n", "--config", path)
        assert proc.returncode == 0, proc.stderr
        rows = list(csv.DictReader(io.StringIO(proc.stdout)))
        assert [r["n"] for r in rows] == ["3", "4"]


class TestCliGenScenario:
    def test_round_trip(self, tmp_path):
        path = write_config(tmp_path, minimal_config_dict())
        out = tmp_path / "scenario.json"
        proc = run_cli("gen-scenario", "--config", path, "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        from irsdfrc.scenario import load_scenario

        s = load_scenario(out)
        assert s.config.n_tx == 4
        assert s.channels.h_ul.shape == (2, 3)
