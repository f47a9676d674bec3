"""Firebreak solutions: pattern blocks, budget feasibility, and generators.

A solution treats a set of cells, built from rigid 20-cell blocks placed at
an anchor in one of four orientations.  The treated-cell budget is
``floor(alpha * flammable_count)``; overlapping blocks union-count.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import FormatError, PlacementError, ValidationError
from .landscape import Landscape, write_ascii_grid

N_ORIENTATIONS = 4


@dataclass(frozen=True)
class BlockShape:
    """Rigid block geometry as (row, col) offsets from the anchor.

    Offsets are normalized so the minimum row and column are both 0; the
    anchor is the north-west corner of the bounding box.
    """

    name: str
    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(set(self.offsets)) != len(self.offsets):
            raise ValidationError(f"shape {self.name!r}: duplicate offsets")
        if not self.offsets:
            raise ValidationError(f"shape {self.name!r}: empty")
        rows = [r for r, _ in self.offsets]
        cols = [c for _, c in self.offsets]
        if min(rows) != 0 or min(cols) != 0:
            raise ValidationError(f"shape {self.name!r}: offsets not normalized")

    @property
    def size(self) -> int:
        return len(self.offsets)

    def oriented(self, orientation: int) -> tuple[tuple[int, int], ...]:
        """Offsets rotated clockwise by orientation * 90 degrees, renormalized."""
        if orientation not in range(N_ORIENTATIONS):
            raise ValidationError(f"orientation {orientation} not in 0..3")
        pts = self.offsets
        for _ in range(orientation):
            height = max(r for r, _ in pts) + 1
            pts = tuple((c, height - 1 - r) for r, c in pts)
        return tuple(sorted(pts))


def default_block_shape() -> BlockShape:
    """The 20-cell U block: 8-cell bottom row plus two 6-cell arms.

    At orientation 0 the open side faces north, so the block encloses fire
    approaching from the south; the four rotations are distinct.
    """
    offsets = [(6, c) for c in range(8)]
    offsets += [(r, 0) for r in range(6)]
    offsets += [(r, 7) for r in range(6)]
    return BlockShape(name="u20", offsets=tuple(sorted(offsets)))


def load_shape(path: str | Path) -> BlockShape:
    """Load a block shape from a delimited offsets file (one 'row col' per line)."""
    path = Path(path)
    offsets = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.replace(",", " ").split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'row col'")
            try:
                offsets.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-integer offset") from None
    if not offsets:
        raise FormatError(f"{path}: no offsets found")
    rmin = min(r for r, _ in offsets)
    cmin = min(c for _, c in offsets)
    norm = tuple(sorted((r - rmin, c - cmin) for r, c in offsets))
    return BlockShape(name=path.stem, offsets=norm)


@dataclass(frozen=True)
class FirebreakBlock:
    anchor: int  # cell index of the shape's north-west bounding corner
    orientation: int  # 0..3, clockwise quarter turns


@lru_cache(maxsize=None)
def _oriented_flat(shape: BlockShape, orientation: int, width: int):
    """(flat offsets, bounding height, bounding width) for one orientation."""
    pts = shape.oriented(orientation)
    flat = np.array([r * width + c for r, c in pts], dtype=np.int64)
    bh = max(r for r, _ in pts) + 1
    bw = max(c for _, c in pts) + 1
    return flat, bh, bw


def realize_block(landscape: Landscape, shape: BlockShape,
                  block: FirebreakBlock) -> frozenset[int]:
    """Cells covered by ``block``; fails off-grid or on non-flammable fuel."""
    if not 0 <= block.anchor < landscape.n_cells:
        raise PlacementError(f"anchor {block.anchor} out of range")
    row, col = landscape.rowcol(block.anchor)
    flat, bh, bw = _oriented_flat(shape, block.orientation, landscape.width)
    if row + bh > landscape.height or col + bw > landscape.width:
        raise PlacementError(
            f"block at ({row},{col}) orientation {block.orientation} exits the grid")
    cells = block.anchor + flat
    if not landscape.flammable[cells].all():
        raise PlacementError(
            f"block at ({row},{col}) orientation {block.orientation} covers "
            "non-flammable cells")
    return frozenset(int(c) for c in cells)


@dataclass(frozen=True)
class Solution:
    """An immutable firebreak plan: blocks plus the derived treated-cell set."""

    blocks: tuple[FirebreakBlock, ...]
    cells: frozenset[int]

    @classmethod
    def empty(cls) -> "Solution":
        return cls(blocks=(), cells=frozenset())

    @classmethod
    def from_blocks(cls, landscape: Landscape, shape: BlockShape,
                    blocks) -> "Solution":
        blocks = tuple(sorted(blocks, key=lambda b: (b.anchor, b.orientation)))
        cells: set[int] = set()
        for block in blocks:
            cells |= realize_block(landscape, shape, block)
        return cls(blocks=blocks, cells=frozenset(cells))

    @classmethod
    def from_cells(cls, cells) -> "Solution":
        """Blockless solution over raw cells (the scattered pattern)."""
        return cls(blocks=(), cells=frozenset(int(c) for c in cells))

    def cells_array(self) -> np.ndarray:
        return np.fromiter(self.cells, dtype=np.int64, count=len(self.cells))

    def solution_id(self) -> str:
        """Stable short identifier derived from the treated-cell set."""
        payload = np.sort(self.cells_array()).tobytes()
        return hashlib.sha1(payload).hexdigest()[:10]


def budget_cells(landscape: Landscape, alpha: float) -> int:
    """Treated-cell budget: floor of alpha times the flammable-cell count."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha {alpha} outside [0, 1]")
    return int(np.floor(alpha * landscape.flammable_count + 1e-9))


def is_feasible(landscape: Landscape, solution: Solution, alpha: float,
                shape: BlockShape | None = None) -> tuple[bool, str]:
    """Check budget feasibility and block validity; returns (verdict, diagnostic)."""
    budget = budget_cells(landscape, alpha)
    if len(solution.cells) > budget:
        return False, (f"treats {len(solution.cells)} cells, budget is {budget} "
                       f"(alpha={alpha})")
    if solution.blocks:
        shape = shape or default_block_shape()
        derived: set[int] = set()
        for block in solution.blocks:
            try:
                derived |= realize_block(landscape, shape, block)
            except PlacementError as exc:
                return False, f"invalid block: {exc}"
        if derived != set(solution.cells):
            return False, "cells do not match the union of block cells"
    return True, "ok"


def random_solution(landscape: Landscape, shape: BlockShape, alpha: float,
                    seed: int, max_attempts: int = 10_000) -> Solution:
    """Uniformly sampled block placement filling the budget.

    Samples uniform anchors and orientations, keeping valid blocks while the
    remaining budget still admits a whole block (so the final treated count
    is within one block of the cap).  Overlaps union-count.
    """
    budget = budget_cells(landscape, alpha)
    if budget < shape.size:
        raise PlacementError(
            f"budget {budget} cells cannot fit a {shape.size}-cell block")
    rng = np.random.default_rng(seed)
    blocks: list[FirebreakBlock] = []
    cells: set[int] = set()
    attempts = 0
    while budget - len(cells) >= shape.size:
        if attempts >= max_attempts:
            raise PlacementError(
                f"no valid block placement found after {max_attempts} attempts")
        attempts += 1
        block = FirebreakBlock(anchor=int(rng.integers(landscape.n_cells)),
                               orientation=int(rng.integers(N_ORIENTATIONS)))
        try:
            new_cells = realize_block(landscape, shape, block)
        except PlacementError:
            continue
        if len(cells | new_cells) > budget:
            continue
        blocks.append(block)
        cells |= new_cells
    return Solution(blocks=tuple(sorted(blocks, key=lambda b: (b.anchor, b.orientation))),
                    cells=frozenset(cells))


def scattered_solution(landscape: Landscape, alpha: float, seed: int) -> Solution:
    """Individual flammable cells sampled without replacement up to the budget."""
    budget = budget_cells(landscape, alpha)
    rng = np.random.default_rng(seed)
    eligible = np.flatnonzero(landscape.flammable)
    chosen = rng.choice(eligible, size=min(budget, eligible.size), replace=False)
    return Solution.from_cells(chosen)


def write_solution(path: str | Path, landscape: Landscape, solution: Solution) -> None:
    """Serialize a solution as (anchor_row, anchor_col, orientation) lines.

    Blockless (scattered) solutions are written as raw 'cell <row> <col>' lines.
    """
    with open(path, "w") as fh:
        fh.write("anchor_row,anchor_col,orientation\n")
        if solution.blocks:
            for block in solution.blocks:
                row, col = landscape.rowcol(block.anchor)
                fh.write(f"{row},{col},{block.orientation}\n")
        else:
            for j in sorted(solution.cells):
                row, col = landscape.rowcol(j)
                fh.write(f"cell,{row},{col}\n")


def load_solution(path: str | Path, landscape: Landscape,
                  shape: BlockShape | None = None) -> Solution:
    """Load a solution written by :func:`write_solution`."""
    path = Path(path)
    shape = shape or default_block_shape()
    blocks: list[FirebreakBlock] = []
    cells: list[int] = []
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "anchor_row,anchor_col,orientation":
            raise FormatError(f"{path}: bad solution header {header.rstrip()!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if parts[0] == "cell":
                if len(parts) != 3:
                    raise FormatError(f"{path}:{lineno}: bad cell line")
                cells.append(landscape.index(int(parts[1]), int(parts[2])))
            elif len(parts) == 3:
                row, col, orientation = (int(p) for p in parts)
                blocks.append(FirebreakBlock(anchor=landscape.index(row, col),
                                             orientation=orientation))
            else:
                raise FormatError(f"{path}:{lineno}: expected 3 fields")
    if blocks and cells:
        raise FormatError(f"{path}: mixes block and cell lines")
    if blocks:
        return Solution.from_blocks(landscape, shape, blocks)
    return Solution.from_cells(cells)


def write_treated_raster(path: str | Path, landscape: Landscape,
                         solution: Solution) -> None:
    """0/1 raster of treated cells, ASCII Grid, for interop and plotting."""
    mask = np.zeros(landscape.n_cells, dtype=np.int64)
    if solution.cells:
        mask[solution.cells_array()] = 1
    write_ascii_grid(path, mask.reshape(landscape.height, landscape.width),
                     xllcorner=landscape.xllcorner, yllcorner=landscape.yllcorner,
                     cellsize=landscape.cell_size, nodata_value=-9999)
