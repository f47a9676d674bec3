import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from firebreak_opt.errors import ConfigurationError
from firebreak_opt.fire_engine import SpreadParams
from firebreak_opt.harness import (ExperimentConfig, RunRow, _table_text,
                                   assess_patterns, load_config, run_comparison)
from firebreak_opt.landscape import synthetic_landscape
from firebreak_opt.objective import evaluate
from firebreak_opt.placement import load_solution
from firebreak_opt.scenarios import make_sampler


def small_config(tmp_path, **overrides) -> ExperimentConfig:
    base = dict(
        landscape={"synthetic": {"width": 40, "height": 40,
                                 "base_spread_prob": 0.4}},
        scenario="m2",
        alphas=[0.05],
        algorithms=["random"],
        seeds=[1, 2],
        time_budget=2.0,
        final_replications=40,
        greedy_replications=30,
        workers=1,
        output_dir=str(tmp_path / "out"),
        plots=False,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_yaml_round_trip(self, tmp_path):
        cfg_file = tmp_path / "config.yaml"
        cfg_file.write_text(yaml.safe_dump({
            "landscape": {"synthetic": {"width": 30, "height": 30,
                                        "base_spread_prob": 0.4}},
            "scenario": "m1",
            "alphas": [0.05, 0.10],
            "algorithms": ["random", "greedy"],
            "seeds": [1, 2, 3],
            "final_replications": 50,
            "output_dir": str(tmp_path / "runs"),
        }))
        config = load_config(cfg_file)
        assert config.scenario == "m1"
        assert config.alphas == [0.05, 0.10]
        assert config.resolve_landscape().n_cells == 900

    def test_unknown_keys_rejected(self, tmp_path):
        cfg_file = tmp_path / "config.yaml"
        cfg_file.write_text("landscape: {synthetic: {width: 10, height: 10}}\n"
                            "bogus_key: 1\n")
        with pytest.raises(ConfigurationError, match="bogus_key"):
            load_config(cfg_file)

    def test_missing_landscape_rejected(self, tmp_path):
        cfg_file = tmp_path / "config.yaml"
        cfg_file.write_text("scenario: m2\n")
        with pytest.raises(ConfigurationError, match="landscape"):
            load_config(cfg_file)

    def test_validation(self, tmp_path):
        with pytest.raises(ConfigurationError):
            small_config(tmp_path, seeds=[])
        with pytest.raises(ConfigurationError):
            small_config(tmp_path, algorithms=["annealing"])
        with pytest.raises(ConfigurationError):
            small_config(tmp_path, final_replications=1)


class TestTableLayout:
    def test_mean_row_arithmetic(self):
        rows = [RunRow(algorithm="random", alpha=0.01, seed=s, percent_burned=v)
                for s, v in zip(range(1, 6), (31.8, 31.9, 31.4, 31.3, 31.5))]
        text = _table_text(rows, [0.01], [1, 2, 3, 4, 5],
                           lambda r: r.percent_burned)
        lines = text.strip().splitlines()
        assert lines[0] == "test,1%"
        assert lines[1] == "1,31.8000"
        assert lines[-1] == "Mean,31.5800"

    def test_failed_cells_left_empty(self):
        rows = [RunRow(algorithm="ga", alpha=0.05, seed=1, percent_burned=10.0),
                RunRow(algorithm="ga", alpha=0.05, seed=2, error="boom")]
        text = _table_text(rows, [0.05], [1, 2], lambda r: r.percent_burned)
        lines = text.strip().splitlines()
        assert lines[2] == "2,"
        assert lines[3] == "Mean,10.0000"


class TestRunComparison:
    def test_report_schema(self, tmp_path):
        config = small_config(tmp_path, seeds=[1, 2, 3, 4, 5])
        report = run_comparison(config)
        rows = report.rows_for("random", 0.05)
        assert len(rows) == 5
        assert all(r.error is None for r in rows)
        assert all(0.0 <= r.percent_burned <= 100.0 for r in rows)
        table = report.tables["random"]["burned"].read_text().strip().splitlines()
        assert len(table) == 7  # header + 5 seeds + mean
        parsed = [float(line.split(",")[1]) for line in table[1:6]]
        mean = float(table[6].split(",")[1])
        assert mean == pytest.approx(np.mean(parsed), abs=2e-4)

    def test_baselines_auto_added_with_optimizer(self, tmp_path):
        config = small_config(
            tmp_path, algorithms=["ga"], seeds=[1],
            ga={"population_size": 4, "eval_replications": 4,
                "max_generations": 2})
        report = run_comparison(config)
        assert {r.algorithm for r in report.rows} == {"ga", "random", "greedy"}
        # budget parity: baselines run at exactly the optimizer's alphas/seeds
        for algo in ("random", "greedy"):
            assert [(r.alpha, r.seed) for r in report.rows_for(algo)] \
                == [(r.alpha, r.seed) for r in report.rows_for("ga")]

    def test_failure_isolated_per_run(self, tmp_path):
        # alpha too small for one block: every algorithm fails on that alpha
        # but the feasible alpha still completes.
        config = small_config(tmp_path, alphas=[0.001, 0.05])
        report = run_comparison(config)
        bad = report.rows_for("random", 0.001)
        good = report.rows_for("random", 0.05)
        assert all(r.error is not None for r in bad)
        assert all(r.error is None for r in good)

    def test_reevaluation_reproduces_row(self, tmp_path):
        config = small_config(tmp_path)
        report = run_comparison(config)
        row = report.rows_for("random", 0.05)[0]
        landscape = config.resolve_landscape()
        sampler = config.resolve_sampler(landscape)
        solution = load_solution(row.solution_file, landscape)
        est = evaluate(landscape, solution, sampler, config.spread_params(),
                       config.final_replications, row.final_seed)
        assert est.percent_burned == pytest.approx(row.percent_burned, abs=1e-9)
        assert est.mean_loss + row.treatment_cost == pytest.approx(row.lost_total)

    def test_deterministic_across_runs_and_workers(self, tmp_path):
        config = small_config(tmp_path)
        deterministic = ["report/burned_random.csv", "report/lost_random.csv",
                         "report/summary.json", "solutions/random_a0p05_s1.csv",
                         "solutions/random_a0p05_s1.asc"]
        run_comparison(config)
        first = {f: (Path(config.output_dir) / f).read_bytes()
                 for f in deterministic}
        run_comparison(small_config(tmp_path, workers=2))
        second = {f: (Path(config.output_dir) / f).read_bytes()
                  for f in deterministic}
        assert first == second

    def test_figures_rendered_when_enabled(self, tmp_path):
        config = small_config(tmp_path, plots=True)
        report = run_comparison(config)
        assert report.figure_files
        for fig in report.figure_files:
            assert fig.exists() and fig.stat().st_size > 0


class TestAssessPatterns:
    def test_alpha_zero_patterns_identical(self, tmp_path):
        ls = synthetic_landscape(30, 30, 0.4)
        samp = make_sampler("m2", ls)
        report = assess_patterns(ls, samp, SpreadParams(), [0.0], trials=2,
                                 R=20, seed=5)
        assert report.cluster[0.0] == report.scattered[0.0]

    def test_tables_layout_and_figure(self, tmp_path):
        ls = synthetic_landscape(30, 30, 0.4)
        samp = make_sampler("m2", ls)
        report = assess_patterns(ls, samp, SpreadParams(), [0.05, 0.10],
                                 trials=3, R=20, seed=5,
                                 output_dir=tmp_path / "patterns")
        text = report.cluster_table.read_text().strip().splitlines()
        assert text[0] == "test,5%,10%"
        assert len(text) == 5  # header + 3 trials + mean
        assert report.figure_files and report.figure_files[0].exists()
        summary = json.loads(report.summary_file.read_text())
        assert "cluster" in summary["mean_percent_burned"]

    def test_cluster_beats_scattered_on_fixture(self):
        ls = synthetic_landscape(40, 40, 0.4)
        samp = make_sampler("m2", ls)
        report = assess_patterns(ls, samp, SpreadParams(), [0.10], trials=3,
                                 R=60, seed=2)
        assert report.mean_cluster(0.10) < report.mean_scattered(0.10)
