"""Gridded landscape: ESRI ASCII rasters, fuel lookup tables, and adjacency.

A landscape is a row-major grid of integer fuel codes (row 0 is the northern
edge, matching ASCII Grid row order) plus a lookup table mapping each code to
a fuel model.  Cell index ``j = row * width + col`` is the canonical identity
of a cell throughout the toolkit.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError

# Moore neighborhood, compass order.  Row 0 is north, so N decreases the row.
DIRECTIONS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
DIR_OFFSETS = {
    "N": (-1, 0),
    "NE": (-1, 1),
    "E": (0, 1),
    "SE": (1, 1),
    "S": (1, 0),
    "SW": (1, -1),
    "W": (0, -1),
    "NW": (-1, -1),
}
OPPOSITE = {"N": "S", "NE": "SW", "E": "W", "SE": "NW",
            "S": "N", "SW": "NE", "W": "E", "NW": "SE"}
DIAGONALS = frozenset({"NE", "SE", "SW", "NW"})

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


@dataclass(frozen=True)
class FuelModel:
    """One row of the fuel lookup table."""

    code: int
    name: str
    flammable: bool
    base_spread_prob: float

    def __post_init__(self):
        if not 0.0 <= self.base_spread_prob <= 1.0:
            raise ValidationError(
                f"fuel code {self.code}: base_spread_prob {self.base_spread_prob} "
                "outside [0, 1]")
        if not self.flammable and self.base_spread_prob != 0.0:
            raise ValidationError(
                f"fuel code {self.code}: non-flammable fuel must have "
                "base_spread_prob 0")


@dataclass(frozen=True, eq=False)
class Landscape:
    """Immutable gridded landscape; safe to share across workers."""

    width: int
    height: int
    cell_size: float
    fuel_codes: np.ndarray  # flat int array, length width * height, row-major
    fuel_table: dict[int, FuelModel]
    xllcorner: float = 0.0
    yllcorner: float = 0.0
    nodata_value: int = -9999

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"bad dimensions {self.width}x{self.height}")
        if self.fuel_codes.shape != (self.width * self.height,):
            raise ValidationError(
                f"fuel_codes length {self.fuel_codes.size} != "
                f"{self.width * self.height}")
        codes = np.unique(self.fuel_codes)
        for code in codes:
            if int(code) not in self.fuel_table:
                raise ValidationError(f"unknown fuel code {int(code)}")
        self.fuel_codes.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Landscape):
            return NotImplemented
        return (self.width == other.width
                and self.height == other.height
                and self.cell_size == other.cell_size
                and self.xllcorner == other.xllcorner
                and self.yllcorner == other.yllcorner
                and self.nodata_value == other.nodata_value
                and np.array_equal(self.fuel_codes, other.fuel_codes)
                and self.fuel_table == other.fuel_table)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @cached_property
    def flammable(self) -> np.ndarray:
        """Boolean mask over flat cell indices."""
        mask = np.zeros(self.n_cells, dtype=bool)
        for code, fuel in self.fuel_table.items():
            if fuel.flammable:
                mask |= self.fuel_codes == code
        mask.setflags(write=False)
        return mask

    @cached_property
    def base_prob(self) -> np.ndarray:
        """Per-cell base spread probability (probability fire passes *into* the cell)."""
        prob = np.zeros(self.n_cells, dtype=np.float64)
        for code, fuel in self.fuel_table.items():
            prob[self.fuel_codes == code] = fuel.base_spread_prob
        prob.setflags(write=False)
        return prob

    @property
    def flammable_count(self) -> int:
        return int(self.flammable.sum())

    def index(self, row: int, col: int) -> int:
        return row * self.width + col

    def rowcol(self, j: int) -> tuple[int, int]:
        return divmod(j, self.width)

    def fuel_at(self, j: int) -> FuelModel:
        return self.fuel_table[int(self.fuel_codes[j])]

    def grid(self) -> np.ndarray:
        """Fuel codes as a (height, width) view."""
        return self.fuel_codes.reshape(self.height, self.width)


def neighbors(landscape: Landscape, j: int) -> list[tuple[int, str]]:
    """Moore neighbors of cell ``j`` with their compass direction from ``j``.

    Border cells return fewer than 8 entries.
    """
    if not 0 <= j < landscape.n_cells:
        raise ValidationError(f"cell index {j} out of range")
    row, col = landscape.rowcol(j)
    out = []
    for direction in DIRECTIONS:
        dr, dc = DIR_OFFSETS[direction]
        r, c = row + dr, col + dc
        if 0 <= r < landscape.height and 0 <= c < landscape.width:
            out.append((landscape.index(r, c), direction))
    return out


def read_ascii_grid(path: str | Path) -> tuple[dict, np.ndarray]:
    """Read an ESRI ASCII Grid; returns (header dict, 2D float array).

    The 6-line header must appear in canonical order (ncols, nrows,
    xllcorner, yllcorner, cellsize, NODATA_value); keys are case-insensitive.
    """
    path = Path(path)
    with open(path) as fh:
        header = {}
        for i, key in enumerate(_HEADER_KEYS):
            line = fh.readline()
            parts = line.split()
            if len(parts) != 2 or parts[0].lower() != key:
                raise FormatError(
                    f"{path}: malformed header line {i + 1}: {line.rstrip()!r} "
                    f"(expected '{key} <value>')")
            try:
                header[key] = int(parts[1]) if key in ("ncols", "nrows") else float(parts[1])
            except ValueError:
                raise FormatError(
                    f"{path}: malformed header line {i + 1}: {line.rstrip()!r}") from None
        body = fh.read().split()
    ncols, nrows = header["ncols"], header["nrows"]
    if ncols <= 0 or nrows <= 0:
        raise FormatError(f"{path}: non-positive grid dimensions in header")
    if len(body) != ncols * nrows:
        raise FormatError(
            f"{path}: expected {ncols * nrows} values for {nrows} rows x "
            f"{ncols} cols, found {len(body)}")
    try:
        data = np.array(body, dtype=np.float64).reshape(nrows, ncols)
    except ValueError:
        raise FormatError(f"{path}: non-numeric cell value in grid body") from None
    return header, data


def write_ascii_grid(path: str | Path, grid: np.ndarray, *, xllcorner: float = 0.0,
                     yllcorner: float = 0.0, cellsize: float = 100.0,
                     nodata_value: int = -9999) -> None:
    """Write a 2D array in ESRI ASCII Grid format."""
    grid = np.asarray(grid)
    nrows, ncols = grid.shape
    is_int = np.issubdtype(grid.dtype, np.integer)
    with open(path, "w") as fh:
        fh.write(f"ncols {ncols}\n")
        fh.write(f"nrows {nrows}\n")
        fh.write(f"xllcorner {xllcorner:g}\n")
        fh.write(f"yllcorner {yllcorner:g}\n")
        fh.write(f"cellsize {cellsize:g}\n")
        fh.write(f"NODATA_value {nodata_value}\n")
        for row in grid:
            if is_int:
                fh.write(" ".join(str(int(v)) for v in row))
            else:
                fh.write(" ".join(f"{v:g}" for v in row))
            fh.write("\n")


def write_landscape(path: str | Path, landscape: Landscape) -> None:
    """Write a landscape's fuel raster back to ASCII Grid."""
    write_ascii_grid(path, landscape.grid(),
                     xllcorner=landscape.xllcorner, yllcorner=landscape.yllcorner,
                     cellsize=landscape.cell_size, nodata_value=landscape.nodata_value)


def _parse_bool(token: str, path: Path, lineno: int) -> bool:
    t = token.strip().lower()
    if t in ("1", "true", "yes", "y"):
        return True
    if t in ("0", "false", "no", "n"):
        return False
    raise FormatError(f"{path}:{lineno}: bad boolean {token!r}")


def load_fuel_table(path: str | Path) -> dict[int, FuelModel]:
    """Load the fuel lookup table.

    Delimited text with header ``code,name,flammable,base_spread_prob``;
    commas or whitespace both accepted as delimiters.
    """
    path = Path(path)
    table: dict[int, FuelModel] = {}
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise FormatError(f"{path}: empty fuel table")
    header = [t.strip().lower() for t in lines[0].replace(",", " ").split()]
    if header != ["code", "name", "flammable", "base_spread_prob"]:
        raise FormatError(
            f"{path}: bad header {lines[0].rstrip()!r} (expected "
            "'code,name,flammable,base_spread_prob')")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        try:
            code = int(parts[0])
            prob = float(parts[3])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric code or probability") from None
        if code in table:
            raise FormatError(f"{path}:{lineno}: duplicate fuel code {code}")
        table[code] = FuelModel(code=code, name=parts[1],
                                flammable=_parse_bool(parts[2], path, lineno),
                                base_spread_prob=prob)
    return table


def load_landscape(fuel_raster_path: str | Path, lookup_path: str | Path, *,
                   elevation_path: str | Path | None = None,
                   slope_path: str | Path | None = None,
                   aspect_path: str | Path | None = None) -> Landscape:
    """Load a landscape from a fuel raster plus a fuel lookup table.

    Elevation/slope/aspect rasters, when given, are parsed and checked for
    dimension agreement but contribute a neutral factor to spread.  NODATA
    cells map to a reserved non-flammable fuel entry.
    """
    header, data = read_ascii_grid(fuel_raster_path)
    codes = data.astype(np.int64)
    if not np.array_equal(codes.astype(np.float64), data):
        raise FormatError(f"{fuel_raster_path}: fuel raster contains non-integer codes")
    table = dict(load_fuel_table(lookup_path))
    nodata = int(header["nodata_value"])
    if nodata not in table:
        table[nodata] = FuelModel(code=nodata, name="NODATA", flammable=False,
                                  base_spread_prob=0.0)
    for aux in (elevation_path, slope_path, aspect_path):
        if aux is not None:
            aux_header, _ = read_ascii_grid(aux)
            if (aux_header["ncols"], aux_header["nrows"]) != (header["ncols"], header["nrows"]):
                raise ValidationError(
                    f"{aux}: dimensions {aux_header['ncols']}x{aux_header['nrows']} "
                    f"do not match fuel raster {header['ncols']}x{header['nrows']}")
    return Landscape(width=header["ncols"], height=header["nrows"],
                     cell_size=header["cellsize"],
                     fuel_codes=codes.reshape(-1),
                     fuel_table=table,
                     xllcorner=header["xllcorner"], yllcorner=header["yllcorner"],
                     nodata_value=nodata)


def synthetic_landscape(width: int, height: int, base_spread_prob: float,
                        cell_size: float = 100.0) -> Landscape:
    """Homogeneous all-flammable landscape, the desk-scale test fixture."""
    if width < 1 or height < 1:
        raise ValidationError(f"bad dimensions {width}x{height}")
    table = {
        1: FuelModel(code=1, name="fuel", flammable=True,
                     base_spread_prob=base_spread_prob),
        -9999: FuelModel(code=-9999, name="NODATA", flammable=False,
                         base_spread_prob=0.0),
    }
    return Landscape(width=width, height=height, cell_size=cell_size,
                     fuel_codes=np.ones(width * height, dtype=np.int64),
                     fuel_table=table)
