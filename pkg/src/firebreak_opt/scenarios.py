"""Stochasticity scenarios: where fires ignite and what weather they get.

Three named scenarios mirror increasing levels of variability:

* ``m1`` — ignitions confined to a central zone (default: the centered
  rectangle of 1/3 width x 1/3 height), wind uniform over the 8 compass
  points at a fixed speed.
* ``m2`` — ignitions anywhere flammable, same wind model.
* ``m3`` — ignitions anywhere flammable, weather sampled from an empirical
  weather file (one record per row, sampled uniformly).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, FormatError
from .fire_engine import ScenarioDraw, WeatherRecord
from .landscape import DIRECTIONS, Landscape

MAX_IGNITION_ATTEMPTS = 1000

DEFAULT_WIND_SPEED = 20.0
CENTRAL_FRACTION = 1.0 / 3.0


@dataclass(frozen=True)
class WeatherTable:
    """Empirical weather records loaded from a delimited file."""

    records: tuple[WeatherRecord, ...]

    def sample(self, rng: np.random.Generator) -> WeatherRecord:
        return self.records[int(rng.integers(len(self.records)))]


def load_weather_table(path: str | Path) -> WeatherTable:
    """Load `wind_speed,wind_direction,temperature,relative_humidity` rows."""
    path = Path(path)
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError(f"{path}: empty weather file")
    header = [t.strip().lower() for t in lines[0].split(",")]
    expected = ["wind_speed", "wind_direction", "temperature", "relative_humidity"]
    if header != expected:
        raise FormatError(f"{path}: bad header {lines[0].rstrip()!r} "
                          f"(expected {','.join(expected)})")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = [t.strip() for t in line.split(",")]
        if len(parts) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 fields")
        try:
            records.append(WeatherRecord(wind_speed=float(parts[0]),
                                         wind_direction=parts[1].upper(),
                                         temperature=float(parts[2]),
                                         relative_humidity=float(parts[3])))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric weather value") from None
    if not records:
        raise FormatError(f"{path}: no weather records")
    return WeatherTable(records=tuple(records))


def central_region(landscape: Landscape,
                   fraction: float = CENTRAL_FRACTION) -> tuple[int, int, int, int]:
    """Centered rectangle (row0, row1, col0, col1), half-open, fraction per side."""
    rh = max(1, round(landscape.height * fraction))
    cw = max(1, round(landscape.width * fraction))
    r0 = (landscape.height - rh) // 2
    c0 = (landscape.width - cw) // 2
    return r0, r0 + rh, c0, c0 + cw


@dataclass(frozen=True)
class ScenarioSampler:
    """Draws (ignition, weather) realizations.

    ``region`` is a half-open (row0, row1, col0, col1) rectangle or None for
    the whole grid.  Ignition candidates are drawn uniformly from the region
    and rejected while non-flammable or on a firebreak; the candidate
    sequence depends only on the RNG state, which keeps draws comparable
    across alternative firebreak sets under common seeds.
    """

    name: str
    region: tuple[int, int, int, int] | None = None
    wind_speed: float = DEFAULT_WIND_SPEED
    weather_table: WeatherTable | None = None

    def region_cells(self, landscape: Landscape) -> np.ndarray:
        if self.region is None:
            return np.arange(landscape.n_cells, dtype=np.int64)
        r0, r1, c0, c1 = self.region
        if not (0 <= r0 < r1 <= landscape.height and 0 <= c0 < c1 <= landscape.width):
            raise ConfigurationError(
                f"ignition region {self.region} does not fit the "
                f"{landscape.height}x{landscape.width} grid")
        rows = np.arange(r0, r1, dtype=np.int64)
        cols = np.arange(c0, c1, dtype=np.int64)
        return (rows[:, None] * landscape.width + cols[None, :]).reshape(-1)

    def sample_weather(self, rng: np.random.Generator) -> WeatherRecord:
        if self.weather_table is not None:
            return self.weather_table.sample(rng)
        direction = DIRECTIONS[int(rng.integers(len(DIRECTIONS)))]
        return WeatherRecord(wind_direction=direction, wind_speed=self.wind_speed)

    def sample(self, landscape: Landscape, firebreaks: np.ndarray,
               rng: np.random.Generator) -> ScenarioDraw:
        """One ScenarioDraw; ``firebreaks`` is a boolean cell mask."""
        candidates = self.region_cells(landscape)
        flammable = landscape.flammable
        for _ in range(MAX_IGNITION_ATTEMPTS):
            j = int(candidates[int(rng.integers(candidates.size))])
            if flammable[j] and not firebreaks[j]:
                return ScenarioDraw(ignition_cell=j, weather=self.sample_weather(rng))
        raise ConfigurationError(
            f"scenario {self.name!r}: no eligible ignition cell found in "
            f"{MAX_IGNITION_ATTEMPTS} attempts")


def make_sampler(name: str, landscape: Landscape, *,
                 wind_speed: float = DEFAULT_WIND_SPEED,
                 weather_file: str | Path | None = None,
                 region: tuple[int, int, int, int] | None = None) -> ScenarioSampler:
    """Build one of the named samplers (m1/m2/m3) or a custom one."""
    key = name.lower()
    if key == "m1":
        return ScenarioSampler(name="M1", region=central_region(landscape),
                               wind_speed=wind_speed)
    if key == "m2":
        return ScenarioSampler(name="M2", region=None, wind_speed=wind_speed)
    if key == "m3":
        if weather_file is None:
            raise ConfigurationError("scenario m3 requires a weather file")
        return ScenarioSampler(name="M3", region=None,
                               weather_table=load_weather_table(weather_file))
    if key == "custom":
        table = load_weather_table(weather_file) if weather_file else None
        return ScenarioSampler(name="custom", region=region,
                               wind_speed=wind_speed, weather_table=table)
    raise ConfigurationError(f"unknown scenario {name!r} (expected m1, m2, m3, custom)")


def sample_scenario(sampler: ScenarioSampler, landscape: Landscape, firebreaks,
                    seed: int) -> ScenarioDraw:
    """Draw one scenario realization; deterministic per seed."""
    from .fire_engine import firebreak_mask

    mask = (firebreaks if isinstance(firebreaks, np.ndarray) and firebreaks.dtype == bool
            else firebreak_mask(landscape, firebreaks))
    return sampler.sample(landscape, mask, np.random.default_rng(seed))
