import csv
import json
import math

import pytest

from cyclebench.experiment import (
    TIMING_FIELDS,
    TRIAL_FIELDS,
    ExperimentConfig,
    is_success,
    report,
    run_experiment,
    summarize,
)
from cyclebench.pgo import write_g2o
from cyclebench.synthetic import generate_synthetic


class TestSuccess:
    @pytest.mark.parametrize(
        "f, ref, ok",
        [
            (1.0, 1.0, True),
            (1.0099, 1.0, True),
            (1.0101, 1.0, False),
            (0.985, 1.0, False),
            (0.0, 0.0, True),
            (1e-12, 0.0, True),
            (1e-3, 0.0, False),
            (math.nan, 1.0, False),
            (1.0, math.nan, False),
            (math.inf, 1.0, False),
        ],
    )
    def test_rule(self, f, ref, ok):
        assert is_success(f, ref) is ok


def small_config(**kw):
    base = dict(solvers=("cb-mcb", "cb-fcb", "vb"), poses=30, cycle_ratio=0.2, trials=2, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


class TestRun:
    def test_rows(self):
        results = list(run_experiment(small_config()))
        assert len(results) == 6
        for row, timings in results:
            assert row["error"] == ""
            assert row["nu"] == row["edges"] - row["vertices"] + 1
            rows6 = 6 * row["nu"] if row["solver"] != "vb" else 6 * (row["vertices"] - 1)
            assert row["system_rows"] == rows6
            assert timings["solve"] > 0

    def test_noise_free_all_succeed(self):
        cfg = small_config(trans_std=0.0, rot_std=0.0)
        for row, _ in run_experiment(cfg):
            assert row["success"] and row["converged"]
            assert row["objective"] < 1e-9

    def test_trials_independent(self):
        a = [r for r, _ in run_experiment(small_config(trials=3, solvers=("vb",)))]
        b = [r for r, _ in run_experiment(small_config(trials=2, solvers=("vb",)))]
        assert a[:2] == b

    def test_dataset(self, tmp_path):
        path = tmp_path / "g.g2o"
        path.write_text(write_g2o(generate_synthetic(25, 0.2, seed=1)[1]))
        rows = [r for r, _ in run_experiment(small_config(dataset=str(path)))]
        assert {r["vertices"] for r in rows} == {25}
        assert all(r["success"] for r in rows)

    def test_unknown_solver(self):
        with pytest.raises(ValueError):
            list(run_experiment(small_config(solvers=("nope",))))


class TestReport:
    def test_byte_identical_trials(self, tmp_path):
        cfg = small_config()
        report(list(run_experiment(cfg)), tmp_path / "a", cfg)
        report(list(run_experiment(cfg)), tmp_path / "b", cfg)
        a = (tmp_path / "a" / "trials.csv").read_bytes()
        b = (tmp_path / "b" / "trials.csv").read_bytes()
        assert a == b
        assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()

    def test_files(self, tmp_path):
        cfg = small_config()
        summary = report(list(run_experiment(cfg)), tmp_path, cfg)
        with open(tmp_path / "trials.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == TRIAL_FIELDS and len(rows) == 6
        with open(tmp_path / "timings.csv") as fh:
            assert list(next(csv.DictReader(fh))) == TIMING_FIELDS
        saved = json.loads((tmp_path / "summary.json").read_text())
        assert saved["solvers"] == summary["solvers"]
        assert saved["config"]["seed"] == 3

    def test_summarize(self):
        rows = [
            {"solver": "vb", "success": True, "converged": True, "error": "", "iterations": 3},
            {"solver": "vb", "success": False, "converged": False, "error": "x", "iterations": ""},
        ]
        s = summarize(rows)["vb"]
        assert s == {
            "trials": 2,
            "successes": 1,
            "success_rate": 0.5,
            "converged": 1,
            "errors": 1,
            "mean_iterations": 3.0,
        }
