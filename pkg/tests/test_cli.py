import csv
import json
import os
import subprocess
import sys

import pytest

BASE_CMD = [sys.executable, "-m", "normrange"]

# Tiny workloads: run the CLI subprocesses on the pure-Python path so each
# invocation does not pay numba compilation.
ENV = dict(os.environ, NORMRANGE_DISABLE_NUMBA="1")

FAST = ["--iterations", "600", "--burn-in", "200"]


def run_cli(*args, env=ENV):
    return subprocess.run(BASE_CMD + list(args), capture_output=True,
                          text=True, env=env)


class TestEstimate:
    ARGS = ["estimate", "--n", "100", "--mean", "0.1", "--min", "-13.2",
            "--max", "12.8", "--seed", "7", *FAST]

    def test_json_schema(self):
        res = run_cli(*self.ARGS)
        assert res.returncode == 0, res.stderr
        doc = json.loads(res.stdout)
        assert doc["schema_version"] == 1
        assert doc["seed"] == 7
        for param in ("mu", "sigma"):
            assert set(doc[param]) == {"post_mean", "post_sd", "ci_lower",
                                       "ci_upper", "ess", "rhat"}
        assert doc["config"]["iterations"] == 600
        assert doc["config"]["priors"]["alpha0"] == 2.0

    def test_validation_exit_code(self):
        res = run_cli("estimate", "--n", "2", "--mean", "0.5", "--min", "0",
                      "--max", "1", "--seed", "1", *FAST)
        assert res.returncode == 2
        assert "N_TOO_SMALL" in res.stderr

    def test_missing_flag_usage_error(self):
        res = run_cli("estimate", "--n", "10")
        assert res.returncode == 2

    def test_byte_determinism(self):
        a = run_cli(*self.ARGS)
        b = run_cli(*self.ARGS)
        assert a.stdout == b.stdout

    def test_entropy_seed_printed_when_absent(self):
        res = run_cli("estimate", "--n", "20", "--mean", "0", "--min", "-2",
                      "--max", "2", *FAST)
        assert res.returncode == 0
        assert "seed:" in res.stderr
        assert json.loads(res.stdout)["seed"] > 0

    def test_metropolis_method(self):
        res = run_cli(*self.ARGS, "--method", "metropolis")
        assert res.returncode == 0
        doc = json.loads(res.stdout)
        assert doc["diagnostics"]["acceptance_rate"] is not None

    def test_csv_format(self):
        res = run_cli(*self.ARGS, "--format", "csv")
        rows = list(csv.reader(res.stdout.splitlines()))
        assert rows[0][0] == "param"
        assert {r[0] for r in rows[1:]} == {"mu", "sigma"}

    def test_output_file(self, tmp_path):
        out = tmp_path / "result.json"
        res = run_cli(*self.ARGS, "--output", str(out))
        assert res.returncode == 0
        assert out.read_text() == res.stdout

    def test_config_file_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"iterations": 600, "burn_in": 200,
                                   "alpha0": 3.0, "seed": 3}))
        res = run_cli("estimate", "--n", "50", "--mean", "0", "--min", "-4",
                      "--max", "4", "--config", str(cfg), "--seed", "9")
        doc = json.loads(res.stdout)
        assert doc["config"]["priors"]["alpha0"] == 3.0  # from file
        assert doc["seed"] == 9  # flag overrides file

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        res = run_cli("estimate", "--n", "50", "--mean", "0", "--min", "-4",
                      "--max", "4", "--config", str(cfg), "--seed", "9")
        assert res.returncode == 2


class TestSimulate:
    def test_smoke_run_row_counts(self, tmp_path):
        res = run_cli("simulate", "--sizes", "10,20", "--replicates", "2",
                      "--methods", "gibbs", "--seed", "5", "--workers", "1",
                      "--out", str(tmp_path), *FAST)
        assert res.returncode == 0, res.stderr
        with open(tmp_path / "tidy.csv") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) - 1 == 2 * 2 * 1 * 2  # sizes x reps x methods x params
        with open(tmp_path / "aggregate.csv") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) - 1 == 2 * 1 * 2

    def test_both_methods_in_aggregate(self, tmp_path):
        res = run_cli("simulate", "--sizes", "10", "--replicates", "1",
                      "--methods", "gibbs,metropolis", "--seed", "5",
                      "--workers", "1", "--out", str(tmp_path), *FAST)
        assert res.returncode == 0, res.stderr
        with open(tmp_path / "aggregate.csv") as fh:
            methods = {r["method"] for r in csv.DictReader(fh)}
        assert methods == {"gibbs", "metropolis"}

    def test_env_var_output_dir(self, tmp_path):
        env = dict(ENV, NORMRANGE_OUTPUT_DIR=str(tmp_path / "envdir"))
        res = run_cli("simulate", "--sizes", "10", "--replicates", "1",
                      "--methods", "gibbs", "--seed", "5", "--workers", "1",
                      *FAST, env=env)
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "envdir" / "tidy.csv").exists()

    def test_unwritable_out_dir_exit_4(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("a file, not a directory")
        res = run_cli("simulate", "--sizes", "10", "--replicates", "1",
                      "--methods", "gibbs", "--seed", "5", "--workers", "1",
                      "--out", str(target), *FAST)
        assert res.returncode == 4


class TestCompare:
    def test_comparison_rows(self, tmp_path):
        res = run_cli("compare", "--sizes", "10,20", "--replicates", "2",
                      "--seed", "5", "--workers", "1",
                      "--out", str(tmp_path), *FAST)
        assert res.returncode == 0, res.stderr
        doc = json.loads((tmp_path / "comparison.json").read_text())
        assert len(doc["comparison"]) == 2 * 2  # sizes x params
        for row in doc["comparison"]:
            assert set(row) >= {"size", "param", "rmse_gibbs",
                                "rmse_metropolis", "rel_diff", "flagged"}


class TestHelp:
    @pytest.mark.parametrize("sub", ["estimate", "simulate", "compare"])
    def test_help_lists_defaults(self, sub):
        res = run_cli(sub, "--help")
        assert res.returncode == 0
        assert "10000" in res.stdout  # iterations default
        assert "5000" in res.stdout  # burn-in default
        if sub != "estimate":
            assert "10,50,100,500,1000" in res.stdout
            assert "20" in res.stdout
