"""Sample-average estimation of expected loss, with and without treatment cost."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ConfigurationError
from .fire_engine import SpreadParams, run_replications
from .landscape import Landscape
from .placement import Solution


@dataclass(frozen=True)
class Estimate:
    """Sample mean of the loss over R replications.

    ``std_err`` is the sample standard deviation over sqrt(R); absent (None)
    when R == 1.  ``percent_burned`` is relative to the flammable-cell count.
    """

    mean_loss: float
    std_err: float | None
    replications: int
    percent_burned: float


@dataclass(frozen=True)
class LossEstimate:
    """Burned-loss estimate plus the cost of the treatment itself."""

    estimate: Estimate
    treatment_cost: float
    total: float


def estimate_from_losses(losses, flammable_count: int) -> Estimate:
    """Summarize per-replication losses into an Estimate."""
    losses = np.asarray(losses, dtype=np.float64)
    if losses.size < 1:
        raise ConfigurationError("no losses to summarize")
    mean = float(losses.mean())
    std_err = (float(losses.std(ddof=1)) / sqrt(losses.size)
               if losses.size > 1 else None)
    return Estimate(mean_loss=mean, std_err=std_err, replications=int(losses.size),
                    percent_burned=100.0 * mean / flammable_count)


def evaluate(landscape: Landscape, solution: Solution, scenario,
             params: SpreadParams, R: int, master_seed: int, *,
             workers: int = 1) -> Estimate:
    """Estimate expected burned cells for a solution by R replications."""
    if R < 2:
        raise ConfigurationError(f"evaluate needs R >= 2, got {R}")
    outcomes = run_replications(landscape, solution.cells, scenario, params, R,
                                master_seed, workers=workers)
    losses = np.array([o.loss for o in outcomes], dtype=np.float64)
    return estimate_from_losses(losses, landscape.flammable_count)


def treatment_cost(solution: Solution, cell_values: np.ndarray | None = None) -> float:
    """Cost of a treatment: treated-cell count, or a value-raster sum."""
    if cell_values is None:
        return float(len(solution.cells))
    return float(cell_values[solution.cells_array()].sum()) if solution.cells else 0.0


def evaluate_with_cost(landscape: Landscape, solution: Solution, scenario,
                       params: SpreadParams, R: int, master_seed: int, *,
                       cell_values: np.ndarray | None = None,
                       workers: int = 1) -> LossEstimate:
    """Estimate mean loss plus treatment cost (the lost-cells objective)."""
    estimate = evaluate(landscape, solution, scenario, params, R, master_seed,
                        workers=workers)
    cost = treatment_cost(solution, cell_values)
    return LossEstimate(estimate=estimate, treatment_cost=cost,
                        total=estimate.mean_loss + cost)
