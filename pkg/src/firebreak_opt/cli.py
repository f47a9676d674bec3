"""Command-line interface.

Subcommands: simulate, assess-patterns, optimize, evaluate, compare.
Exit codes: 0 success, 1 configuration/validation error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._rng import stream_seed
from .errors import (ConfigurationError, FirebreakOptError, FormatError,
                     PlacementError, ValidationError)
from .fire_engine import SpreadParams, run_replications
from .harness import (FIXTURE_BASE_SPREAD_PROB, assess_patterns,
                      final_evaluation_seed, load_config, run_comparison,
                      run_single)
from .landscape import Landscape, load_landscape, synthetic_landscape, write_ascii_grid
from .objective import evaluate_with_cost
from .optimizers import GAConfig, GRASPConfig, write_trace
from .placement import (default_block_shape, load_shape, load_solution,
                        write_solution, write_treated_raster)
from .scenarios import make_sampler

_USAGE_ERRORS = (FormatError, ValidationError, ConfigurationError, PlacementError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are configuration errors (exit 1)
        raise ConfigurationError(message)


def _add_landscape_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel-raster", help="ESRI ASCII fuel raster")
    p.add_argument("--lookup", help="fuel lookup table (code,name,flammable,base_spread_prob)")
    p.add_argument("--elevation", help="optional elevation raster (validated, neutral effect)")
    p.add_argument("--slope", help="optional slope raster (validated, neutral effect)")
    p.add_argument("--aspect", help="optional aspect raster (validated, neutral effect)")
    p.add_argument("--synthetic", nargs=3, type=float, metavar=("W", "H", "P"),
                   help="homogeneous W x H landscape with base spread probability P")
    p.add_argument("--shape-file", help="block shape offsets file (default: 20-cell U block)")


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default="m2", choices=["m1", "m2", "m3"])
    p.add_argument("--wind-speed", type=float, default=20.0,
                   help="fixed wind speed for m1/m2 (km/h)")
    p.add_argument("--weather-file", help="empirical weather table (required for m3)")
    p.add_argument("--duration-hours", type=float, default=30.0)
    p.add_argument("--step-minutes", type=float, default=30.0)


def _resolve_landscape(args) -> Landscape:
    if args.synthetic is not None:
        w, h, p = args.synthetic
        return synthetic_landscape(int(w), int(h), p)
    if args.fuel_raster and args.lookup:
        return load_landscape(args.fuel_raster, args.lookup,
                              elevation_path=args.elevation,
                              slope_path=args.slope, aspect_path=args.aspect)
    raise ConfigurationError(
        "specify a landscape: --fuel-raster + --lookup, or --synthetic W H P "
        f"(e.g. --synthetic 100 100 {FIXTURE_BASE_SPREAD_PROB})")


def _resolve_shape(args):
    return load_shape(args.shape_file) if args.shape_file else default_block_shape()


def _resolve_params(args) -> SpreadParams:
    return SpreadParams(duration_hours=args.duration_hours,
                        step_minutes=args.step_minutes)


def _resolve_sampler(args, landscape: Landscape):
    return make_sampler(args.scenario, landscape, wind_speed=args.wind_speed,
                        weather_file=args.weather_file)


def _cmd_simulate(args) -> int:
    landscape = _resolve_landscape(args)
    sampler = _resolve_sampler(args, landscape)
    params = _resolve_params(args)
    firebreaks = frozenset()
    if args.solution:
        firebreaks = load_solution(args.solution, landscape, _resolve_shape(args)).cells
    outcomes = run_replications(landscape, firebreaks, sampler, params,
                                args.replications, args.seed, workers=args.workers)
    losses = np.array([o.loss for o in outcomes])
    counts = np.zeros(landscape.n_cells, dtype=np.int64)
    for o in outcomes:
        counts[o.burned] += 1

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_ascii_grid(out / "burn_count.asc",
                     counts.reshape(landscape.height, landscape.width),
                     cellsize=landscape.cell_size)
    with open(out / "losses.csv", "w") as fh:
        fh.write("replication,loss_cells,percent_burned\n")
        for r, o in enumerate(outcomes):
            fh.write(f"{r},{o.loss},{100.0 * o.loss / landscape.flammable_count:.4f}\n")
    summary = {
        "replications": args.replications,
        "mean_loss": float(losses.mean()),
        "mean_percent_burned": float(100.0 * losses.mean() / landscape.flammable_count),
        "min_loss": int(losses.min()), "max_loss": int(losses.max()),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if not args.no_plots:
        from .plots import render_burn_map
        render_burn_map(out / "burn_map.png", landscape, counts, firebreaks,
                        replications=args.replications)
    print(f"{args.replications} fire(s): mean loss {summary['mean_loss']:.2f} cells "
          f"({summary['mean_percent_burned']:.2f}% of flammable); outputs in {out}")
    return 0


def _cmd_assess_patterns(args) -> int:
    landscape = _resolve_landscape(args)
    sampler = _resolve_sampler(args, landscape)
    params = _resolve_params(args)
    alphas = [float(a) for a in args.alphas.split(",")]
    report = assess_patterns(landscape, sampler, params, alphas, args.trials,
                             args.replications, args.seed, shape=_resolve_shape(args),
                             workers=args.workers, output_dir=args.out,
                             plots=not args.no_plots)
    for alpha in alphas:
        print(f"alpha {alpha:g}: cluster {report.mean_cluster(alpha):.2f}% vs "
              f"scattered {report.mean_scattered(alpha):.2f}% burned")
    print(f"tables in {args.out}")
    return 0


def _cmd_optimize(args) -> int:
    landscape = _resolve_landscape(args)
    sampler = _resolve_sampler(args, landscape)
    params = _resolve_params(args)
    shape = _resolve_shape(args)
    ga = GAConfig(time_budget=args.time_budget,
                  population_size=args.population_size,
                  eval_replications=args.eval_replications,
                  mutation_rate=args.mutation_rate,
                  max_generations=args.max_generations)
    grasp = GRASPConfig(time_budget=args.time_budget,
                        rcl_size=args.rcl_size,
                        construction_samples=args.construction_samples,
                        local_search_iterations=args.local_search_iterations,
                        max_restarts=args.max_restarts)
    solution, trace = run_single(landscape, sampler, params, shape, args.algo,
                                 args.alpha, args.seed,
                                 time_budget=args.time_budget, ga=ga, grasp=grasp,
                                 greedy_replications=args.greedy_replications,
                                 workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_solution(out / "solution.csv", landscape, solution)
    write_treated_raster(out / "solution.asc", landscape, solution)
    if trace is not None and len(trace):
        write_trace(out / "trace.csv", trace)
    final_seed = final_evaluation_seed(args.seed)
    loss_est = evaluate_with_cost(landscape, solution, sampler, params,
                                  args.final_replications, final_seed,
                                  workers=args.workers)
    est = loss_est.estimate
    summary = {
        "algorithm": args.algo, "alpha": args.alpha, "seed": args.seed,
        "treated_cells": len(solution.cells),
        "percent_burned": est.percent_burned, "mean_loss": est.mean_loss,
        "std_err": est.std_err, "lost_total": loss_est.total,
        "final_replications": args.final_replications, "final_seed": final_seed,
        "solution_id": solution.solution_id(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"{args.algo} alpha={args.alpha:g} seed={args.seed}: "
          f"{est.percent_burned:.2f}% burned over {args.final_replications} "
          f"replications; outputs in {out}")
    return 0


def _cmd_evaluate(args) -> int:
    landscape = _resolve_landscape(args)
    sampler = _resolve_sampler(args, landscape)
    params = _resolve_params(args)
    solution = load_solution(args.solution, landscape, _resolve_shape(args))
    seed = args.master_seed if args.master_seed is not None else stream_seed(args.seed, "final")
    loss_est = evaluate_with_cost(landscape, solution, sampler, params,
                                  args.replications, seed, workers=args.workers)
    est = loss_est.estimate
    payload = {
        "solution": args.solution, "treated_cells": len(solution.cells),
        "replications": est.replications, "mean_loss": est.mean_loss,
        "std_err": est.std_err, "percent_burned": est.percent_burned,
        "treatment_cost": loss_est.treatment_cost, "lost_total": loss_est.total,
        "master_seed": seed,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_compare(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        config.output_dir = args.output_dir
    if args.workers:
        config.workers = args.workers
    if args.no_plots:
        config.plots = False
    report = run_comparison(config)
    failures = [r for r in report.rows if r.error]
    print(f"comparison finished: {len(report.rows)} runs "
          f"({len(failures)} failed); report in {report.output_dir}")
    for row in failures:
        print(f"  FAILED {row.algorithm} alpha={row.alpha:g} seed={row.seed}: {row.error}",
              file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="firebreak-opt",
                     description="Firebreak placement by simulation-based optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="run one fire or R replications")
    _add_landscape_args(p)
    _add_scenario_args(p)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--solution", help="treat cells from this solution file")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="runs/simulate")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("assess-patterns", help="cluster blocks vs scattered cells")
    _add_landscape_args(p)
    _add_scenario_args(p)
    p.add_argument("--alphas", default="0.05,0.10,0.15",
                   help="comma-separated treated fractions")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--replications", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="runs/patterns")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_assess_patterns)

    p = sub.add_parser("optimize", help="run one optimizer or baseline")
    _add_landscape_args(p)
    _add_scenario_args(p)
    p.add_argument("--algo", required=True, choices=["ga", "grasp", "random", "greedy"])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--time-budget", type=float, default=120.0)
    p.add_argument("--final-replications", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--population-size", type=int, default=20)
    p.add_argument("--eval-replications", type=int, default=50)
    p.add_argument("--mutation-rate", type=float, default=0.2)
    p.add_argument("--max-generations", type=int, default=None)
    p.add_argument("--rcl-size", type=int, default=5)
    p.add_argument("--construction-samples", type=int, default=30)
    p.add_argument("--local-search-iterations", type=int, default=20)
    p.add_argument("--max-restarts", type=int, default=None)
    p.add_argument("--greedy-replications", type=int, default=1000)
    p.add_argument("--out", default="runs/optimize")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("evaluate", help="re-evaluate a stored solution")
    _add_landscape_args(p)
    _add_scenario_args(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--master-seed", type=int, default=None,
                   help="exact evaluation master seed (overrides --seed derivation)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", help="also write the result to this JSON file")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="full comparison grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FirebreakOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
