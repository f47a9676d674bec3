"""Search procedures over block-encoded solutions: GA, GRASP, and baselines.

All optimizers minimize the noisy sample-average burned-cell objective and
only ever emit budget-feasible solutions.  Determinism: every random choice
derives from the caller's seed, so a run is reproducible regardless of
worker count; wall-clock budgets affect only how many iterations fit.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import stream_seed
from .errors import ConfigurationError, FormatError, PlacementError
from .fire_engine import SpreadParams, burn_frequency, run_replications
from .landscape import Landscape
from .objective import Estimate, evaluate
from .placement import (BlockShape, FirebreakBlock, N_ORIENTATIONS, Solution,
                        budget_cells, default_block_shape, random_solution,
                        realize_block)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 20
    eval_replications: int = 50
    mutation_rate: float = 0.2
    mutation_moves: int = 1
    time_budget: float = 120.0
    max_generations: int | None = None
    freeze_eval_seeds: bool = False  # same scenario draws every generation

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ConfigurationError(
                f"population_size must be an even integer >= 4, got {self.population_size}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError(f"mutation_rate {self.mutation_rate} outside [0, 1]")
        if self.eval_replications < 2:
            raise ConfigurationError("eval_replications must be >= 2")
        if self.mutation_moves < 0:
            raise ConfigurationError("mutation_moves must be >= 0")
        if self.time_budget < 0:
            raise ConfigurationError("time_budget must be >= 0")
        if self.max_generations is not None and self.max_generations < 1:
            raise ConfigurationError("max_generations must be >= 1")


@dataclass(frozen=True)
class GRASPConfig:
    rcl_size: int = 5
    construction_samples: int = 30
    local_search_iterations: int = 20
    time_budget: float = 120.0
    max_restarts: int | None = None
    relocation_radius: int = 5  # Chebyshev radius for local-search moves

    def __post_init__(self):
        if self.rcl_size < 1:
            raise ConfigurationError("rcl_size must be >= 1")
        if self.construction_samples < 2:
            raise ConfigurationError("construction_samples must be >= 2")
        if self.local_search_iterations < 0:
            raise ConfigurationError("local_search_iterations must be >= 0")
        if self.time_budget < 0:
            raise ConfigurationError("time_budget must be >= 0")
        if self.max_restarts is not None and self.max_restarts < 1:
            raise ConfigurationError("max_restarts must be >= 1")
        if self.relocation_radius < 1:
            raise ConfigurationError("relocation_radius must be >= 1")


@dataclass(frozen=True)
class TracePoint:
    elapsed_s: float
    mean_loss: float
    std_err: float | None
    solution_id: str


class SearchTrace:
    """Evolution of the incumbent: (elapsed, estimate, solution id) records."""

    def __init__(self):
        self.points: list[TracePoint] = []

    def record(self, elapsed_s: float, estimate: Estimate, solution_id: str) -> None:
        if self.points and elapsed_s <= self.points[-1].elapsed_s:
            elapsed_s = self.points[-1].elapsed_s + 1e-9
        self.points.append(TracePoint(elapsed_s, estimate.mean_loss,
                                      estimate.std_err, solution_id))

    def __len__(self):
        return len(self.points)


def write_trace(path: str | Path, trace: SearchTrace) -> None:
    with open(path, "w") as fh:
        fh.write("elapsed_s,estimate_mean,estimate_stderr,solution_id\n")
        for p in trace.points:
            stderr = "" if p.std_err is None else f"{p.std_err:.6f}"
            fh.write(f"{p.elapsed_s:.3f},{p.mean_loss:.6f},{stderr},{p.solution_id}\n")


def read_trace(path: str | Path) -> SearchTrace:
    trace = SearchTrace()
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "elapsed_s,estimate_mean,estimate_stderr,solution_id":
            raise FormatError(f"{path}: bad trace header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            elapsed, mean, stderr, sol_id = line.strip().split(",")
            trace.points.append(TracePoint(float(elapsed), float(mean),
                                           float(stderr) if stderr else None, sol_id))
    return trace


def _make_pool(workers: int):
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else None


def _try_evaluate(landscape, solution, scenario, params, R, master_seed):
    """Estimate, or None when the solution leaves no eligible ignition cell."""
    try:
        return evaluate(landscape, solution, scenario, params, R, master_seed)
    except ConfigurationError:
        return None


def _evaluate_all(landscape, solutions, scenario, params, R, master_seed, pool):
    """Evaluate many solutions with a shared master seed (common draws).

    Solutions that make the scenario unsampleable get a None estimate and
    rank behind every scored solution.
    """
    if pool is None:
        return [_try_evaluate(landscape, sol, scenario, params, R, master_seed)
                for sol in solutions]
    futures = [pool.submit(_try_evaluate, landscape, sol, scenario, params, R,
                           master_seed)
               for sol in solutions]
    return [f.result() for f in futures]


def _mean_or_inf(estimate) -> float:
    return float("inf") if estimate is None else estimate.mean_loss


# ---------------------------------------------------------------------------
# Block scoring on a per-cell frequency grid


def _orientation_geometry(landscape: Landscape, shape: BlockShape):
    """Per orientation: (offsets, anchor-grid height, anchor-grid width)."""
    geo = []
    for orientation in range(N_ORIENTATIONS):
        pts = shape.oriented(orientation)
        bh = max(r for r, _ in pts) + 1
        bw = max(c for _, c in pts) + 1
        geo.append((pts, landscape.height - bh + 1, landscape.width - bw + 1))
    return geo


def _window_sums(grid: np.ndarray, pts, ha: int, wa: int) -> np.ndarray:
    acc = np.zeros((ha, wa), dtype=np.float64)
    for dr, dc in pts:
        acc += grid[dr:dr + ha, dc:dc + wa]
    return acc


def _candidate_table(landscape: Landscape, shape: BlockShape, freq: np.ndarray,
                     treated: np.ndarray | None = None):
    """Score every valid placement by the summed frequency of its cells.

    Returns (scores, anchors, orientations) arrays over all valid candidates.
    When ``treated`` (boolean mask) is given, placements covering no untreated
    cell are dropped and treated cells contribute nothing to the score.
    """
    h, w = landscape.height, landscape.width
    flam = landscape.flammable.reshape(h, w).astype(np.float64)
    fgrid = freq.reshape(h, w)
    if treated is not None:
        fgrid = np.where(treated.reshape(h, w), 0.0, fgrid)
    scores_out, anchors_out, orients_out = [], [], []
    for orientation, (pts, ha, wa) in enumerate(_orientation_geometry(landscape, shape)):
        if ha <= 0 or wa <= 0:
            continue
        valid = _window_sums(flam, pts, ha, wa) >= shape.size  # all cells flammable
        if treated is not None:
            tgrid = treated.reshape(h, w).astype(np.float64)
            fresh = shape.size - _window_sums(tgrid, pts, ha, wa)
            valid &= fresh >= 1.0
        if not valid.any():
            continue
        scores = _window_sums(fgrid, pts, ha, wa)
        rows, cols = np.nonzero(valid)
        scores_out.append(scores[rows, cols])
        anchors_out.append(rows * w + cols)
        orients_out.append(np.full(rows.size, orientation, dtype=np.int64))
    if not scores_out:
        return (np.empty(0), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    return (np.concatenate(scores_out), np.concatenate(anchors_out),
            np.concatenate(orients_out))


def _rank_candidates(scores, anchors, orients):
    """Indices sorted by score descending, ties by lowest anchor then orientation."""
    return np.lexsort((orients, anchors, -scores))


# ---------------------------------------------------------------------------
# Genetic Algorithm


def _crossover(landscape, shape, parent_a: Solution, parent_b: Solution,
               budget: int, rng) -> Solution:
    """Pool both parents' blocks and re-sample without replacement up to budget."""
    pool: list[FirebreakBlock] = sorted(set(parent_a.blocks) | set(parent_b.blocks),
                                        key=lambda b: (b.anchor, b.orientation))
    order = rng.permutation(len(pool))
    blocks: list[FirebreakBlock] = []
    cells: set[int] = set()
    for i in order:
        block = pool[i]
        new_cells = realize_block(landscape, shape, block)
        if len(cells | new_cells) <= budget:
            blocks.append(block)
            cells |= new_cells
    return Solution(blocks=tuple(sorted(blocks, key=lambda b: (b.anchor, b.orientation))),
                    cells=frozenset(cells))


def _relocate_random_block(landscape, shape, solution: Solution, budget: int,
                           rng, attempts: int = 100) -> Solution:
    """Move one randomly chosen block to a random valid position."""
    if not solution.blocks:
        return solution
    idx = int(rng.integers(len(solution.blocks)))
    keep = [b for i, b in enumerate(solution.blocks) if i != idx]
    kept_cells: set[int] = set()
    for block in keep:
        kept_cells |= realize_block(landscape, shape, block)
    for _ in range(attempts):
        candidate = FirebreakBlock(anchor=int(rng.integers(landscape.n_cells)),
                                   orientation=int(rng.integers(N_ORIENTATIONS)))
        try:
            new_cells = realize_block(landscape, shape, candidate)
        except PlacementError:
            continue
        if len(kept_cells | new_cells) <= budget:
            blocks = tuple(sorted(keep + [candidate],
                                  key=lambda b: (b.anchor, b.orientation)))
            return Solution(blocks=blocks, cells=frozenset(kept_cells | new_cells))
    return solution


def ga_optimize(landscape: Landscape, scenario, params: SpreadParams, alpha: float,
                config: GAConfig, seed: int, *, shape: BlockShape | None = None,
                workers: int = 1,
                initial_population: list[Solution] | None = None
                ) -> tuple[Solution, SearchTrace]:
    """Generational GA: evaluate, keep the better half, refill by crossover,
    mutate; returns the best-evaluated individual ever seen.

    Each generation evaluates all individuals against the same fresh scenario
    draws, so selection compares like with like.
    """
    shape = shape or default_block_shape()
    budget = budget_cells(landscape, alpha)
    start = time.perf_counter()
    rng = np.random.default_rng(stream_seed(seed, "ga"))
    if initial_population is not None:
        if len(initial_population) != config.population_size:
            raise ConfigurationError("initial_population size must equal population_size")
        population = list(initial_population)
    else:
        population = [random_solution(landscape, shape, alpha,
                                      stream_seed(seed, "init", i))
                      for i in range(config.population_size)]
    trace = SearchTrace()
    best_solution: Solution | None = None
    best_estimate: Estimate | None = None

    pool = _make_pool(workers)
    try:
        generation = 0
        while True:
            eval_seed = stream_seed(seed, "eval",
                                    0 if config.freeze_eval_seeds else generation)
            estimates = _evaluate_all(landscape, population, scenario, params,
                                      config.eval_replications, eval_seed, pool)
            order = sorted(range(len(population)),
                           key=lambda i: (_mean_or_inf(estimates[i]), i))
            leader = order[0]
            if estimates[leader] is not None and (
                    best_estimate is None
                    or estimates[leader].mean_loss < best_estimate.mean_loss):
                best_solution = population[leader]
                best_estimate = estimates[leader]
                trace.record(time.perf_counter() - start, best_estimate,
                             best_solution.solution_id())
            generation += 1
            if config.max_generations is not None and generation >= config.max_generations:
                break
            if time.perf_counter() - start >= config.time_budget:
                break
            survivors = [population[i] for i in order[:config.population_size // 2]]
            offspring: list[Solution] = []
            while len(offspring) < config.population_size - len(survivors):
                pa = survivors[int(rng.integers(len(survivors)))]
                pb = survivors[int(rng.integers(len(survivors)))]
                child = _crossover(landscape, shape, pa, pb, budget, rng)
                if rng.random() < config.mutation_rate:
                    for _ in range(config.mutation_moves):
                        child = _relocate_random_block(landscape, shape, child,
                                                       budget, rng)
                offspring.append(child)
            population = survivors + offspring
    finally:
        if pool is not None:
            pool.shutdown()
    if best_solution is None:
        raise ConfigurationError(
            "GA found no evaluable individual (every candidate blocks all ignitions)")
    return best_solution, trace


# ---------------------------------------------------------------------------
# GRASP


def _rcl_pick(scores, anchors, orients, rcl_size: int, rng):
    ranked = _rank_candidates(scores, anchors, orients)
    rcl = ranked[:min(rcl_size, ranked.size)]
    chosen = rcl[int(rng.integers(rcl.size))]
    return FirebreakBlock(anchor=int(anchors[chosen]),
                          orientation=int(orients[chosen]))


def _grasp_construct(landscape, scenario, params, budget, shape, config,
                     restart_seed: int, rng, pool) -> Solution:
    """Greedy randomized construction driven by burn frequency."""
    blocks: list[FirebreakBlock] = []
    cells: set[int] = set()
    round_no = 0
    while budget - len(cells) >= shape.size:
        try:
            outcomes = run_replications(
                landscape, cells, scenario, params, config.construction_samples,
                stream_seed(restart_seed, "construct", round_no),
                pool=pool)
        except ConfigurationError:
            break  # partial solution already blocks every ignition
        freq = burn_frequency(outcomes, landscape.n_cells)
        scores, anchors, orients = _candidate_table(landscape, shape, freq)
        if scores.size == 0:
            break
        block = _rcl_pick(scores, anchors, orients, config.rcl_size, rng)
        blocks.append(block)
        cells |= realize_block(landscape, shape, block)
        round_no += 1
    return Solution(blocks=tuple(sorted(blocks, key=lambda b: (b.anchor, b.orientation))),
                    cells=frozenset(cells))


def _grasp_local_search(landscape, scenario, params, budget, shape, config,
                        solution: Solution, restart_seed: int, rng, pool,
                        deadline: float) -> Solution:
    """Relocate single blocks toward high burn-frequency zones, keeping improvements."""
    width = landscape.width
    for iteration in range(config.local_search_iterations):
        if time.perf_counter() >= deadline or not solution.blocks:
            break
        idx = int(rng.integers(len(solution.blocks)))
        moved = solution.blocks[idx]
        keep = [b for i, b in enumerate(solution.blocks) if i != idx]
        kept_cells: set[int] = set()
        for block in keep:
            kept_cells |= realize_block(landscape, shape, block)
        try:
            outcomes = run_replications(
                landscape, kept_cells, scenario, params, config.construction_samples,
                stream_seed(restart_seed, "ls-freq", iteration), pool=pool)
        except ConfigurationError:
            continue
        freq = burn_frequency(outcomes, landscape.n_cells)
        scores, anchors, orients = _candidate_table(landscape, shape, freq)
        if scores.size == 0:
            continue
        # Restrict to anchors within the relocation radius of the moved block.
        row0, col0 = divmod(moved.anchor, width)
        rows, cols = anchors // width, anchors % width
        near = (np.abs(rows - row0) <= config.relocation_radius) & \
               (np.abs(cols - col0) <= config.relocation_radius)
        if not near.any():
            continue
        candidate = _rcl_pick(scores[near], anchors[near], orients[near],
                              config.rcl_size, rng)
        new_cells = realize_block(landscape, shape, candidate)
        if len(kept_cells | new_cells) > budget:
            continue
        proposal = Solution(
            blocks=tuple(sorted(keep + [candidate],
                                key=lambda b: (b.anchor, b.orientation))),
            cells=frozenset(kept_cells | new_cells))
        if proposal.cells == solution.cells:
            continue
        compare_seed = stream_seed(restart_seed, "ls-eval", iteration)
        current_est, proposal_est = _evaluate_all(
            landscape, [solution, proposal], scenario, params,
            config.construction_samples, compare_seed, pool)
        if _mean_or_inf(proposal_est) < _mean_or_inf(current_est):
            solution = proposal
    return solution


def grasp_optimize(landscape: Landscape, scenario, params: SpreadParams, alpha: float,
                   config: GRASPConfig, seed: int, *, shape: BlockShape | None = None,
                   workers: int = 1) -> tuple[Solution, SearchTrace]:
    """Multi-restart GRASP: burn-frequency construction + relocation local search.

    Restart local optima are compared under common scenario draws; the global
    best's recorded estimate is non-increasing along the trace.
    """
    shape = shape or default_block_shape()
    budget = budget_cells(landscape, alpha)
    if budget < shape.size:
        raise PlacementError(f"budget {budget} cells cannot fit a {shape.size}-cell block")
    start = time.perf_counter()
    deadline = start + config.time_budget
    trace = SearchTrace()
    best_solution: Solution | None = None
    best_estimate: Estimate | None = None
    update_seed = stream_seed(seed, "global-update")

    pool = _make_pool(workers)
    try:
        restart = 0
        while True:
            restart_seed = stream_seed(seed, "restart", restart)
            rng = np.random.default_rng(restart_seed)
            solution = _grasp_construct(landscape, scenario, params, budget, shape,
                                        config, restart_seed, rng, pool)
            solution = _grasp_local_search(landscape, scenario, params, budget, shape,
                                           config, solution, restart_seed, rng, pool,
                                           deadline)
            estimate, = _evaluate_all(landscape, [solution], scenario, params,
                                      config.construction_samples, update_seed, pool)
            if estimate is not None and (best_estimate is None
                                         or estimate.mean_loss < best_estimate.mean_loss):
                best_solution, best_estimate = solution, estimate
                trace.record(time.perf_counter() - start, estimate,
                             solution.solution_id())
            restart += 1
            if config.max_restarts is not None and restart >= config.max_restarts:
                break
            if time.perf_counter() >= deadline:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if best_solution is None:
        raise ConfigurationError(
            "GRASP found no evaluable solution (every candidate blocks all ignitions)")
    return best_solution, trace


# ---------------------------------------------------------------------------
# Baselines


def greedy_baseline(landscape: Landscape, scenario, params: SpreadParams,
                    alpha: float, R: int, seed: int, *,
                    shape: BlockShape | None = None, workers: int = 1) -> Solution:
    """Place blocks over the most-burned cells of untreated fires.

    Simulates R replications with no firebreaks once, then repeatedly takes
    the placement with the highest newly-covered burn frequency (ties to the
    lowest anchor index, then orientation).
    """
    shape = shape or default_block_shape()
    budget = budget_cells(landscape, alpha)
    if budget < shape.size:
        raise PlacementError(f"budget {budget} cells cannot fit a {shape.size}-cell block")
    pool = _make_pool(workers)
    try:
        outcomes = run_replications(landscape, frozenset(), scenario, params, R,
                                    stream_seed(seed, "greedy-freq"), pool=pool)
    finally:
        if pool is not None:
            pool.shutdown()
    freq = burn_frequency(outcomes, landscape.n_cells)
    treated = np.zeros(landscape.n_cells, dtype=bool)
    blocks: list[FirebreakBlock] = []
    cells: set[int] = set()
    while budget - len(cells) >= shape.size:
        scores, anchors, orients = _candidate_table(landscape, shape, freq,
                                                    treated=treated)
        if scores.size == 0:
            break
        top = _rank_candidates(scores, anchors, orients)[0]
        block = FirebreakBlock(anchor=int(anchors[top]),
                               orientation=int(orients[top]))
        new_cells = realize_block(landscape, shape, block)
        blocks.append(block)
        cells |= new_cells
        treated[list(new_cells)] = True
    return Solution(blocks=tuple(sorted(blocks, key=lambda b: (b.anchor, b.orientation))),
                    cells=frozenset(cells))


def random_baseline(landscape: Landscape, alpha: float, seed: int, *,
                    shape: BlockShape | None = None) -> Solution:
    """Uniform random block placement (delegates to the placement generator)."""
    return random_solution(landscape, shape or default_block_shape(), alpha, seed)
