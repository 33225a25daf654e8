"""Grid storage, Moore-neighborhood indexing and 3x3 patch extraction.

The lattice is toroidal: indices wrap around both axes, so every site has
exactly eight neighbors and all closed-form expressions that assume a fixed
neighborhood size apply uniformly, with no boundary special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

#: Moore-neighborhood offsets in fixed lexicographic order:
#: NW, N, NE, W, E, SW, S, SE.
NEIGHBOR_OFFSETS: tuple[tuple[int, int], ...] = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

#: Offsets of the full 3x3 patch, row-major; the center sits at index 4.
PATCH_OFFSETS: tuple[tuple[int, int], ...] = (
    NEIGHBOR_OFFSETS[0], NEIGHBOR_OFFSETS[1], NEIGHBOR_OFFSETS[2],
    NEIGHBOR_OFFSETS[3], (0, 0), NEIGHBOR_OFFSETS[4],
    NEIGHBOR_OFFSETS[5], NEIGHBOR_OFFSETS[6], NEIGHBOR_OFFSETS[7],
)

#: Index of the center cell within an extracted 9-vector patch.
PATCH_CENTER = 4

SNAPSHOT_MAGIC = "GMRF-SNAPSHOT"
SNAPSHOT_VERSION = "v1"


class SiteIndex(NamedTuple):
    """A lattice site addressed by (row, col), both 0-based."""

    row: int
    col: int


@dataclass(frozen=True)
class Configuration:
    """Immutable lattice state: a rows x cols grid of real cell values.

    ``cells`` is stored flat in row-major order as read-only float64.
    The grid must be at least 3x3 so that a full 3x3 patch fits, and all
    values must be finite.
    """

    rows: int
    cols: int
    cells: np.ndarray

    def __post_init__(self) -> None:
        if self.rows < 3 or self.cols < 3:
            raise ValueError(
                f"grid must be at least 3x3, got {self.rows}x{self.cols}"
            )
        cells = np.array(self.cells, dtype=np.float64).ravel()
        if cells.size != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} cells, got {cells.size}"
            )
        if not np.all(np.isfinite(cells)):
            raise ValueError("cell values must be finite")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    @property
    def grid(self) -> np.ndarray:
        """Read-only 2D view of the cells."""
        return self.cells.reshape(self.rows, self.cols)


def new_iid_configuration(
    rows: int, cols: int, mean: float, variance: float, seed
) -> Configuration:
    """Draw a configuration of i.i.d. Gaussian cells.

    Deterministic for a fixed seed; ``seed`` may be anything accepted by
    :func:`numpy.random.default_rng` (int, SeedSequence, Generator, ...).
    """
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    rng = np.random.default_rng(seed)
    cells = rng.normal(mean, math.sqrt(variance), size=rows * cols)
    return Configuration(rows, cols, cells)


@lru_cache(maxsize=32)
def neighbor_indices(rows: int, cols: int) -> np.ndarray:
    """Flat cell indices of the 8 Moore neighbors of every site.

    Returns a read-only (rows*cols, 8) int64 array whose row k lists the
    neighbors of site k in the NW, N, NE, W, E, SW, S, SE order, with
    toroidal wrapping. Cached per grid shape.
    """
    r = np.arange(rows)[:, None]
    c = np.arange(cols)[None, :]
    columns = []
    for dr, dc in NEIGHBOR_OFFSETS:
        rr = (r + dr) % rows
        cc = (c + dc) % cols
        columns.append((rr * cols + cc).ravel())
    idx = np.stack(columns, axis=1).astype(np.int64)
    idx.setflags(write=False)
    return idx


def neighbors(config: Configuration, site) -> np.ndarray:
    """The 8 Moore-neighbor values of ``site`` in NW,N,NE,W,E,SW,S,SE order."""
    row, col = site
    if not (0 <= row < config.rows and 0 <= col < config.cols):
        raise ValueError(f"site {site!r} out of bounds")
    idx = neighbor_indices(config.rows, config.cols)
    return config.cells[idx[row * config.cols + col]]


def extract_patches(config: Configuration) -> np.ndarray:
    """All n local 3x3 configuration patches as an (n, 9) array.

    Row k is the patch centered on site k (row-major site order); column 4
    holds the center value and the remaining columns hold the Moore
    neighbors in the :func:`neighbors` order.
    """
    grid = config.grid
    patches = np.empty((config.n_sites, 9), dtype=np.float64)
    for j, (dr, dc) in enumerate(PATCH_OFFSETS):
        patches[:, j] = np.roll(grid, (-dr, -dc), axis=(0, 1)).ravel()
    return patches


def neighbor_sums(config: Configuration) -> np.ndarray:
    """Per-site sum of the 8 neighbor values, as a flat (n,) array."""
    grid = config.grid
    total = np.zeros_like(grid)
    for dr, dc in NEIGHBOR_OFFSETS:
        total += np.roll(grid, (-dr, -dc), axis=(0, 1))
    return total.ravel()


def write_snapshot(config: Configuration, path, beta_set: float) -> None:
    """Write a configuration in the v1 snapshot format.

    Header line ``GMRF-SNAPSHOT v1 <rows> <cols> <beta_set>`` followed by
    the cell values row-major, one grid row per line, at full round-trip
    precision (17 significant digits).
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write(
            f"{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION} "
            f"{config.rows} {config.cols} {beta_set:.17g}\n"
        )
        np.savetxt(fh, config.grid, fmt="%.17g", delimiter=" ")


def read_snapshot(path) -> tuple[Configuration, float]:
    """Read a v1 snapshot, returning (configuration, beta_set).

    Raises ValueError for anything malformed: bad header, wrong version,
    non-numeric cells, or a cell count that does not match the header.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[0] != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a {SNAPSHOT_MAGIC} file")
        if header[1] != SNAPSHOT_VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {header[1]!r}")
        try:
            rows, cols = int(header[2]), int(header[3])
            beta_set = float(header[4])
            cells = np.array(fh.read().split(), dtype=np.float64)
        except ValueError as exc:
            raise ValueError(f"{path}: malformed snapshot: {exc}") from exc
    if cells.size != rows * cols:
        raise ValueError(
            f"{path}: expected {rows * cols} cells, found {cells.size}"
        )
    return Configuration(rows, cols, cells), beta_set
