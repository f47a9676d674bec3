"""Experiment harness: configuration, the comparison protocol, pattern
assessment, and report emission.

A comparison runs every (algorithm, alpha, seed) combination, re-evaluates
each final solution with a large fresh replication count, and writes
per-algorithm delimited tables (seed rows plus a mean row per alpha column)
alongside solution files, search traces, figures, and a machine-readable
summary.

Determinism contract: with iteration-capped stopping (``max_generations`` /
``max_restarts``) and fixed seeds, everything under ``report/`` (except
``timings.csv``) and ``solutions/`` is byte-identical across runs and worker
counts.  Wall-clock artifacts (timings, trace elapsed columns) are kept in
separate files for exactly that reason.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import yaml

from ._rng import stream_seed
from .errors import ConfigurationError, FirebreakOptError
from .fire_engine import SpreadParams
from .landscape import Landscape, load_landscape, synthetic_landscape
from .objective import evaluate, evaluate_with_cost
from .optimizers import (GAConfig, GRASPConfig, SearchTrace, ga_optimize,
                         grasp_optimize, greedy_baseline, random_baseline,
                         write_trace)
from .placement import (BlockShape, Solution, default_block_shape, load_shape,
                        random_solution, scattered_solution, write_solution,
                        write_treated_raster)
from .scenarios import ScenarioSampler, make_sampler

ALGORITHMS = ("ga", "grasp", "random", "greedy")

DEFAULT_SEEDS = (1, 2, 3, 4, 5)
DEFAULT_ALPHAS = (0.01, 0.03, 0.05, 0.075, 0.10, 0.125, 0.15)
FIXTURE_BASE_SPREAD_PROB = 0.40


def fixture_landscape(width: int = 100, height: int = 100,
                      base_spread_prob: float = FIXTURE_BASE_SPREAD_PROB) -> Landscape:
    """The desk-scale homogeneous fixture used throughout tests and demos."""
    return synthetic_landscape(width, height, base_spread_prob)


@dataclass
class ExperimentConfig:
    """One comparison experiment, loadable from a YAML file."""

    landscape: dict
    scenario: str = "m2"
    wind_speed: float = 20.0
    weather_file: str | None = None
    spread: dict = field(default_factory=dict)
    alphas: list[float] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    time_budget: float = 120.0
    final_replications: int = 1000
    greedy_replications: int = 1000
    workers: int = 1
    output_dir: str = "runs/comparison"
    shape_file: str | None = None
    ga: dict = field(default_factory=dict)
    grasp: dict = field(default_factory=dict)
    plots: bool = True

    def __post_init__(self):
        if not self.seeds:
            raise ConfigurationError("seeds list must be non-empty")
        if self.final_replications < 2:
            raise ConfigurationError("final_replications must be >= 2")
        if self.greedy_replications < 1:
            raise ConfigurationError("greedy_replications must be >= 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigurationError(
                    f"unknown algorithm {algo!r} (expected one of {ALGORITHMS})")
        for alpha in self.alphas:
            if not 0.0 <= alpha <= 1.0:
                raise ConfigurationError(f"alpha {alpha} outside [0, 1]")

    def spread_params(self) -> SpreadParams:
        return SpreadParams(**self.spread)

    def ga_config(self) -> GAConfig:
        return GAConfig(**{"time_budget": self.time_budget, **self.ga})

    def grasp_config(self) -> GRASPConfig:
        return GRASPConfig(**{"time_budget": self.time_budget, **self.grasp})

    def resolve_landscape(self) -> Landscape:
        spec = self.landscape
        if "synthetic" in spec:
            syn = dict(spec["synthetic"])
            return synthetic_landscape(
                width=int(syn.get("width", 100)), height=int(syn.get("height", 100)),
                base_spread_prob=float(syn.get("base_spread_prob",
                                               FIXTURE_BASE_SPREAD_PROB)),
                cell_size=float(syn.get("cell_size", 100.0)))
        if "fuel_raster" in spec:
            return load_landscape(spec["fuel_raster"], spec["lookup"],
                                  elevation_path=spec.get("elevation"),
                                  slope_path=spec.get("slope"),
                                  aspect_path=spec.get("aspect"))
        raise ConfigurationError(
            "landscape must define either 'synthetic' or 'fuel_raster' + 'lookup'")

    def resolve_shape(self) -> BlockShape:
        return load_shape(self.shape_file) if self.shape_file else default_block_shape()

    def resolve_sampler(self, landscape: Landscape) -> ScenarioSampler:
        return make_sampler(self.scenario, landscape, wind_speed=self.wind_speed,
                            weather_file=self.weather_file)


_CONFIG_KEYS = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}


def load_config(path: str | Path) -> ExperimentConfig:
    """Load an ExperimentConfig from a YAML key-value file."""
    path = Path(path)
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config must be a key-value mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {sorted(unknown)}")
    if "landscape" not in raw:
        raise ConfigurationError(f"{path}: missing required key 'landscape'")
    return ExperimentConfig(**raw)


# ---------------------------------------------------------------------------
# Comparison protocol


@dataclass
class RunRow:
    """Final result of one (algorithm, alpha, seed) run."""

    algorithm: str
    alpha: float
    seed: int
    percent_burned: float | None = None
    mean_loss: float | None = None
    std_err: float | None = None
    treatment_cost: float | None = None
    lost_total: float | None = None
    lost_percent: float | None = None
    wall_time_s: float = 0.0
    solution_id: str | None = None
    solution_file: str | None = None
    raster_file: str | None = None
    trace_file: str | None = None
    final_seed: int | None = None
    error: str | None = None


@dataclass
class RunReport:
    output_dir: Path
    rows: list[RunRow]
    tables: dict[str, dict[str, Path]]
    summary_file: Path
    figure_files: list[Path] = field(default_factory=list)

    def rows_for(self, algorithm: str, alpha: float | None = None) -> list[RunRow]:
        return [r for r in self.rows
                if r.algorithm == algorithm
                and (alpha is None or r.alpha == alpha)]


def _alpha_label(alpha: float) -> str:
    return f"{alpha * 100:g}%"


def _alpha_token(alpha: float) -> str:
    return f"{alpha:g}".replace(".", "p")


def run_single(landscape: Landscape, sampler: ScenarioSampler, params: SpreadParams,
               shape: BlockShape, algorithm: str, alpha: float, seed: int, *,
               time_budget: float = 120.0, ga: GAConfig | None = None,
               grasp: GRASPConfig | None = None, greedy_replications: int = 1000,
               workers: int = 1) -> tuple[Solution, SearchTrace | None]:
    """Run one optimizer or baseline; returns (solution, trace or None)."""
    if algorithm == "ga":
        config = ga or GAConfig(time_budget=time_budget)
        return ga_optimize(landscape, sampler, params, alpha, config, seed,
                           shape=shape, workers=workers)
    if algorithm == "grasp":
        config = grasp or GRASPConfig(time_budget=time_budget)
        return grasp_optimize(landscape, sampler, params, alpha, config, seed,
                              shape=shape, workers=workers)
    if algorithm == "greedy":
        return greedy_baseline(landscape, sampler, params, alpha,
                               greedy_replications, seed, shape=shape,
                               workers=workers), None
    if algorithm == "random":
        return random_baseline(landscape, alpha, seed, shape=shape), None
    raise ConfigurationError(f"unknown algorithm {algorithm!r}")


def final_evaluation_seed(run_seed: int) -> int:
    """Master seed for a run's final large-R evaluation.

    Depends only on the run seed, so every algorithm at the same seed is
    scored against identical fresh scenario draws.
    """
    return stream_seed(run_seed, "final")


def run_comparison(config: ExperimentConfig) -> RunReport:
    """Execute the full comparison grid and write the report tree."""
    landscape = config.resolve_landscape()
    sampler = config.resolve_sampler(landscape)
    params = config.spread_params()
    shape = config.resolve_shape()

    algorithms = list(config.algorithms)
    if any(a in ("ga", "grasp") for a in algorithms):
        for baseline in ("random", "greedy"):
            if baseline not in algorithms:
                algorithms.append(baseline)

    out = Path(config.output_dir)
    report_dir = out / "report"
    traces_dir = out / "traces"
    solutions_dir = out / "solutions"
    for d in (report_dir, traces_dir, solutions_dir):
        d.mkdir(parents=True, exist_ok=True)

    rows: list[RunRow] = []
    flammable = landscape.flammable_count
    for algorithm in algorithms:
        for alpha in config.alphas:
            for seed in config.seeds:
                row = RunRow(algorithm=algorithm, alpha=alpha, seed=seed)
                rows.append(row)
                started = time.perf_counter()
                try:
                    solution, trace = run_single(
                        landscape, sampler, params, shape, algorithm, alpha, seed,
                        time_budget=config.time_budget, ga=config.ga_config(),
                        grasp=config.grasp_config(),
                        greedy_replications=config.greedy_replications,
                        workers=config.workers)
                    final_seed = final_evaluation_seed(seed)
                    loss_est = evaluate_with_cost(
                        landscape, solution, sampler, params,
                        config.final_replications, final_seed,
                        workers=config.workers)
                    est = loss_est.estimate
                    stem = f"{algorithm}_a{_alpha_token(alpha)}_s{seed}"
                    sol_file = solutions_dir / f"{stem}.csv"
                    raster_file = solutions_dir / f"{stem}.asc"
                    write_solution(sol_file, landscape, solution)
                    write_treated_raster(raster_file, landscape, solution)
                    if trace is not None and len(trace):
                        trace_file = traces_dir / f"{stem}.csv"
                        write_trace(trace_file, trace)
                        row.trace_file = str(trace_file)
                    row.percent_burned = est.percent_burned
                    row.mean_loss = est.mean_loss
                    row.std_err = est.std_err
                    row.treatment_cost = loss_est.treatment_cost
                    row.lost_total = loss_est.total
                    row.lost_percent = 100.0 * loss_est.total / flammable
                    row.solution_id = solution.solution_id()
                    row.solution_file = str(sol_file)
                    row.raster_file = str(raster_file)
                    row.final_seed = final_seed
                except FirebreakOptError as exc:
                    row.error = str(exc)
                except Exception as exc:  # isolate sibling runs
                    row.error = f"{type(exc).__name__}: {exc}"
                row.wall_time_s = time.perf_counter() - started

    tables = _write_tables(report_dir, rows, config)
    _write_timings(report_dir / "timings.csv", rows)
    summary_file = _write_summary(report_dir / "summary.json", rows, config)
    report = RunReport(output_dir=out, rows=rows, tables=tables,
                       summary_file=summary_file)
    if config.plots:
        from . import plots
        report.figure_files = plots.render_comparison_figures(out / "figures", report)
    return report


def _table_text(rows: list[RunRow], alphas: list[float], seeds: list[int],
                value) -> str:
    lines = ["test," + ",".join(_alpha_label(a) for a in alphas)]
    by_key = {(r.alpha, r.seed): r for r in rows}
    for seed in seeds:
        cells = []
        for alpha in alphas:
            row = by_key.get((alpha, seed))
            v = value(row) if row is not None else None
            cells.append("" if v is None else f"{v:.4f}")
        lines.append(f"{seed}," + ",".join(cells))
    means = []
    for alpha in alphas:
        vals = [value(by_key[(alpha, s)]) for s in seeds
                if (alpha, s) in by_key and value(by_key[(alpha, s)]) is not None]
        means.append(f"{np.mean(vals):.4f}" if vals else "")
    lines.append("Mean," + ",".join(means))
    return "\n".join(lines) + "\n"


def _write_tables(report_dir: Path, rows: list[RunRow],
                  config: ExperimentConfig) -> dict[str, dict[str, Path]]:
    tables: dict[str, dict[str, Path]] = {}
    algorithms = sorted({r.algorithm for r in rows})
    for algorithm in algorithms:
        algo_rows = [r for r in rows if r.algorithm == algorithm]
        burned = report_dir / f"burned_{algorithm}.csv"
        lost = report_dir / f"lost_{algorithm}.csv"
        burned.write_text(_table_text(algo_rows, config.alphas, config.seeds,
                                      lambda r: r.percent_burned))
        lost.write_text(_table_text(algo_rows, config.alphas, config.seeds,
                                    lambda r: r.lost_percent))
        tables[algorithm] = {"burned": burned, "lost": lost}
    return tables


def _write_timings(path: Path, rows: list[RunRow]) -> None:
    with open(path, "w") as fh:
        fh.write("algorithm,alpha,seed,wall_time_s\n")
        for r in rows:
            fh.write(f"{r.algorithm},{r.alpha:g},{r.seed},{r.wall_time_s:.3f}\n")


def _row_payload(row: RunRow, output_dir: Path) -> dict:
    payload = asdict(row)
    payload.pop("wall_time_s")  # wall clock lives in timings.csv only
    for key in ("solution_file", "raster_file", "trace_file"):
        if payload[key] is not None:
            payload[key] = str(Path(payload[key]).relative_to(output_dir))
    return payload


def _write_summary(path: Path, rows: list[RunRow],
                   config: ExperimentConfig) -> Path:
    payload = {
        "config": {
            "scenario": config.scenario,
            "alphas": config.alphas,
            "algorithms": config.algorithms,
            "seeds": config.seeds,
            "time_budget": config.time_budget,
            "final_replications": config.final_replications,
            "shape_file": config.shape_file,
        },
        "rows": [_row_payload(r, Path(config.output_dir)) for r in rows],
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# Pattern assessment (cluster blocks vs scattered cells)


@dataclass
class PatternReport:
    alphas: list[float]
    trials: int
    cluster: dict[float, list[float]]    # alpha -> per-trial percent burned
    scattered: dict[float, list[float]]
    cluster_table: Path | None = None
    scattered_table: Path | None = None
    summary_file: Path | None = None
    figure_files: list[Path] = field(default_factory=list)

    def mean_cluster(self, alpha: float) -> float:
        return float(np.mean(self.cluster[alpha]))

    def mean_scattered(self, alpha: float) -> float:
        return float(np.mean(self.scattered[alpha]))


def assess_patterns(landscape: Landscape, sampler: ScenarioSampler,
                    params: SpreadParams, alphas, trials: int, R: int, seed: int, *,
                    shape: BlockShape | None = None, workers: int = 1,
                    output_dir: str | Path | None = None,
                    plots: bool = True) -> PatternReport:
    """Compare cluster-block solutions against scattered-cell solutions.

    Each trial pairs one random cluster solution with one scattered solution
    of the same budget, evaluated under common scenario draws.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    shape = shape or default_block_shape()
    alphas = list(alphas)
    cluster: dict[float, list[float]] = {a: [] for a in alphas}
    scattered: dict[float, list[float]] = {a: [] for a in alphas}
    for alpha in alphas:
        token = _alpha_token(alpha)
        for trial in range(trials):
            eval_seed = stream_seed(seed, "assess-eval", token, trial)
            if alpha == 0.0:
                cluster_sol = Solution.empty()
                scattered_sol = Solution.empty()
            else:
                cluster_sol = random_solution(
                    landscape, shape, alpha, stream_seed(seed, "cluster", token, trial))
                scattered_sol = scattered_solution(
                    landscape, alpha, stream_seed(seed, "scatter", token, trial))
            for sol, bucket in ((cluster_sol, cluster), (scattered_sol, scattered)):
                est = evaluate(landscape, sol, sampler, params, R, eval_seed,
                               workers=workers)
                bucket[alpha].append(est.percent_burned)

    report = PatternReport(alphas=alphas, trials=trials, cluster=cluster,
                           scattered=scattered)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in (("cluster", cluster), ("scattered", scattered)):
            lines = ["test," + ",".join(_alpha_label(a) for a in alphas)]
            for trial in range(trials):
                lines.append(f"{trial + 1}," +
                             ",".join(f"{data[a][trial]:.4f}" for a in alphas))
            lines.append("Mean," +
                         ",".join(f"{np.mean(data[a]):.4f}" for a in alphas))
            table = out / f"{name}.csv"
            table.write_text("\n".join(lines) + "\n")
            if name == "cluster":
                report.cluster_table = table
            else:
                report.scattered_table = table
        summary = {
            "alphas": alphas, "trials": trials, "replications": R,
            "mean_percent_burned": {
                "cluster": {_alpha_label(a): float(np.mean(cluster[a])) for a in alphas},
                "scattered": {_alpha_label(a): float(np.mean(scattered[a])) for a in alphas},
            },
        }
        report.summary_file = out / "summary.json"
        report.summary_file.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        if plots:
            from . import plots as plots_mod
            report.figure_files = [plots_mod.render_pattern_figure(out, report)]
    return report
