"""Stochastic cellular-automata fire spread.

One fire is a synchronous CA on the landscape's Moore adjacency: cells
ignited at step t attempt, during step t, one independent trial per unburned
flammable non-firebreak neighbor; successes ignite at step t+1.  Weather is
held constant for the whole fire.

Every trial's uniform is a pure function of (fire seed, source cell, target
cell), so with constant weather a trial's outcome does not depend on *when*
it fires.  Under common replication seeds this gives exact monotone blocking:
enlarging the firebreak set can only shrink the burned set, replication by
replication.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import ceil, cos, pi

import numpy as np

from . import _rng
from .errors import ConfigurationError, IgnitionRejectedError, ValidationError
from .landscape import DIAGONALS, DIRECTIONS, DIR_OFFSETS, FuelModel, Landscape


@dataclass(frozen=True)
class WeatherRecord:
    """Constant weather for one fire.

    ``wind_direction`` is the compass point the wind blows *toward* (the
    downwind heading).  Temperature and relative humidity are carried for
    the empirical-weather file format but currently contribute a neutral
    factor to spread.
    """

    wind_direction: str
    wind_speed: float
    temperature: float = 20.0
    relative_humidity: float = 40.0

    def __post_init__(self):
        if self.wind_direction not in DIRECTIONS:
            raise ValidationError(f"bad wind direction {self.wind_direction!r}")
        if self.wind_speed < 0:
            raise ValidationError(f"negative wind speed {self.wind_speed}")
        if not 0 <= self.relative_humidity <= 100:
            raise ValidationError(
                f"relative humidity {self.relative_humidity} outside [0, 100]")


@dataclass(frozen=True)
class ScenarioDraw:
    """One realization of randomness: where the fire starts and its weather."""

    ignition_cell: int
    weather: WeatherRecord


@dataclass(frozen=True)
class SpreadParams:
    """Parameters of the surrogate spread model.

    Defaults are tuned so the 100x100 homogeneous fixture burns a
    considerable portion of the grid without consuming all of it.
    """

    step_minutes: float = 30.0
    duration_hours: float = 30.0
    wind_aligned_factor: float = 2.5
    wind_opposed_factor: float = 0.2
    wind_cross_factor: float = 0.6
    diagonal_attenuation: float = 0.7
    wind_speed_scale: float = 30.0

    def __post_init__(self):
        if self.step_minutes <= 0 or self.duration_hours <= 0:
            raise ValidationError("step_minutes and duration_hours must be positive")
        if self.wind_aligned_factor < 1:
            raise ValidationError("wind_aligned_factor must be >= 1")
        for name in ("wind_opposed_factor", "wind_cross_factor"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValidationError(f"{name} must be in [0, 1]")
        if not 0 < self.diagonal_attenuation <= 1:
            raise ValidationError("diagonal_attenuation must be in (0, 1]")
        if self.wind_speed_scale <= 0:
            raise ValidationError("wind_speed_scale must be positive")

    @property
    def steps_per_fire(self) -> int:
        return max(1, ceil(self.duration_hours * 60.0 / self.step_minutes))


@dataclass(frozen=True, eq=False)
class FireOutcome:
    """Burned cells of one replication; loss is the burned-cell count."""

    burned: np.ndarray  # sorted flat cell indices
    loss: int
    ignition_cell: int

    def burned_set(self) -> frozenset[int]:
        return frozenset(int(j) for j in self.burned)


def _direction_factors(params: SpreadParams, weather: WeatherRecord) -> np.ndarray:
    """Multiplier for each of the 8 compass directions under this weather.

    Interpolates between the opposed, cross, and aligned factors by the
    cosine of the angle between the spread direction and the wind heading,
    then pulls the result toward 1.0 for wind speeds below the scale.
    Diagonal attenuation is folded in.
    """
    strength = min(weather.wind_speed / params.wind_speed_scale, 1.0)
    wind_idx = DIRECTIONS.index(weather.wind_direction)
    factors = np.empty(len(DIRECTIONS))
    for i, direction in enumerate(DIRECTIONS):
        alignment = cos((i - wind_idx) * pi / 4.0)
        if alignment >= 0:
            raw = params.wind_cross_factor + alignment * (
                params.wind_aligned_factor - params.wind_cross_factor)
        else:
            raw = params.wind_cross_factor + (-alignment) * (
                params.wind_opposed_factor - params.wind_cross_factor)
        factor = 1.0 + strength * (raw - 1.0)
        if direction in DIAGONALS:
            factor *= params.diagonal_attenuation
        factors[i] = factor
    return factors


def spread_probability(params: SpreadParams, fuel: FuelModel, direction: str,
                       weather: WeatherRecord) -> float:
    """Per-trial probability that fire passes to an adjacent cell of ``fuel``."""
    if direction not in DIRECTIONS:
        raise ValidationError(f"bad direction {direction!r}")
    factor = _direction_factors(params, weather)[DIRECTIONS.index(direction)]
    return float(np.clip(fuel.base_spread_prob * factor, 0.0, 1.0))


def firebreak_mask(landscape: Landscape, firebreaks) -> np.ndarray:
    """Boolean mask over cells from any iterable of firebreak cell indices."""
    mask = np.zeros(landscape.n_cells, dtype=bool)
    if firebreaks is not None and len(firebreaks) > 0:
        idx = np.fromiter((int(j) for j in firebreaks), dtype=np.int64)
        if idx.min() < 0 or idx.max() >= landscape.n_cells:
            raise ValidationError("firebreak cell index out of range")
        mask[idx] = True
    return mask


def run_fire(landscape: Landscape, firebreaks, draw: ScenarioDraw,
             params: SpreadParams, seed: int) -> FireOutcome:
    """Simulate one fire; deterministic for a fixed seed.

    ``firebreaks`` may be a set/array of cell indices or a precomputed
    boolean mask.
    """
    if isinstance(firebreaks, np.ndarray) and firebreaks.dtype == bool:
        breaks = firebreaks
    else:
        breaks = firebreak_mask(landscape, firebreaks)
    ign = draw.ignition_cell
    if not 0 <= ign < landscape.n_cells or not landscape.flammable[ign]:
        raise IgnitionRejectedError(f"ignition cell {ign} is not flammable")
    if breaks[ign]:
        raise IgnitionRejectedError(f"ignition cell {ign} is a firebreak")

    width, height = landscape.width, landscape.height
    # Success probability for fire entering each cell, by direction.
    eligible = landscape.flammable & ~breaks
    base = landscape.base_prob
    factors = _direction_factors(params, draw.weather)

    burned = np.zeros(landscape.n_cells, dtype=bool)
    burned[ign] = True
    frontier = np.array([ign], dtype=np.int64)

    deltas = [dr * width + dc for dr, dc in (DIR_OFFSETS[d] for d in DIRECTIONS)]
    offsets = [DIR_OFFSETS[d] for d in DIRECTIONS]

    for _ in range(params.steps_per_fire):
        if frontier.size == 0:
            break
        rows = frontier // width
        cols = frontier - rows * width
        ignited = []
        for i in range(len(DIRECTIONS)):
            dr, dc = offsets[i]
            inside = np.ones(frontier.size, dtype=bool)
            if dr:
                inside &= (rows + dr >= 0) & (rows + dr < height)
            if dc:
                inside &= (cols + dc >= 0) & (cols + dc < width)
            src = frontier[inside]
            if src.size == 0:
                continue
            tgt = src + deltas[i]
            open_mask = eligible[tgt] & ~burned[tgt]
            src, tgt = src[open_mask], tgt[open_mask]
            if src.size == 0:
                continue
            prob = np.clip(base[tgt] * factors[i], 0.0, 1.0)
            hit = _rng.trial_uniforms(seed, src, tgt) < prob
            if hit.any():
                ignited.append(tgt[hit])
        if not ignited:
            break
        frontier = np.unique(np.concatenate(ignited))
        burned[frontier] = True

    burned_idx = np.flatnonzero(burned)
    return FireOutcome(burned=burned_idx, loss=int(burned_idx.size), ignition_cell=ign)


def _replication_batch(landscape: Landscape, firebreaks_idx: np.ndarray,
                       scenario, params: SpreadParams, master_seed: int,
                       indices) -> list[FireOutcome]:
    breaks = firebreak_mask(landscape, firebreaks_idx)
    out = []
    for r in indices:
        seed_r = _rng.replication_seed(master_seed, r)
        rng = np.random.default_rng(seed_r)
        draw = scenario.sample(landscape, breaks, rng)
        out.append(run_fire(landscape, breaks, draw, params, seed_r))
    return out


def run_replications(landscape: Landscape, firebreaks, scenario,
                     params: SpreadParams, R: int, master_seed: int, *,
                     workers: int = 1,
                     pool: ProcessPoolExecutor | None = None) -> list[FireOutcome]:
    """R i.i.d. replications; replication r is keyed by mix(master_seed, r).

    Results are bit-identical for any worker count: each replication owns a
    derived seed and outcomes are assembled by replication index.  Pass
    ``pool`` to reuse an existing executor across many calls.
    """
    if R < 1:
        raise ConfigurationError(f"replication count {R} must be >= 1")
    if isinstance(firebreaks, np.ndarray):
        firebreaks_idx = (np.flatnonzero(firebreaks) if firebreaks.dtype == bool
                          else np.sort(firebreaks.astype(np.int64)))
    elif firebreaks:
        firebreaks_idx = np.array(sorted(int(j) for j in firebreaks), dtype=np.int64)
    else:
        firebreaks_idx = np.empty(0, dtype=np.int64)
    n_workers = pool._max_workers if pool is not None else workers
    if n_workers <= 1 or R < 4:
        return _replication_batch(landscape, firebreaks_idx, scenario, params,
                                  master_seed, range(R))
    chunks = [c for c in np.array_split(np.arange(R), n_workers) if c.size]
    own_pool = pool is None
    if own_pool:
        pool = ProcessPoolExecutor(max_workers=workers)
    try:
        futures = [pool.submit(_replication_batch, landscape, firebreaks_idx,
                               scenario, params, master_seed, chunk.tolist())
                   for chunk in chunks]
        results: list[FireOutcome] = []
        for future in futures:
            results.extend(future.result())
    finally:
        if own_pool:
            pool.shutdown()
    return results


def burn_frequency(outcomes, n_cells: int) -> np.ndarray:
    """Fraction of replications in which each cell burned."""
    counts = np.zeros(n_cells, dtype=np.float64)
    for outcome in outcomes:
        counts[outcome.burned] += 1.0
    if outcomes:
        counts /= len(outcomes)
    return counts
