"""Row-major <-> fragment-contiguous permutations of a padded grid.

In the fragment layout the padded buffer is a row-major sequence of ``f x f``
fragments and each fragment is itself stored row-major, so one fragment
occupies ``f * f`` consecutive cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from catsim.errors import GeometryError, LayoutError
from catsim.grid import Grid, Layout


@dataclass(frozen=True)
class LayoutMap:
    f: int
    n_total: int

    def __post_init__(self):
        if self.f < 1 or self.n_total % self.f:
            raise GeometryError(f"n_total={self.n_total} is not a multiple of f={self.f}")

    @property
    def fragments_per_row(self) -> int:
        return self.n_total // self.f

    @classmethod
    def for_grid(cls, grid: Grid) -> LayoutMap:
        return cls(grid.f, grid.padded)


def frag_index(lmap: LayoutMap, y: int, x: int) -> int:
    """Linear offset of padded cell ``(y, x)`` in the fragment-contiguous buffer."""
    if not (0 <= y < lmap.n_total and 0 <= x < lmap.n_total):
        raise IndexError(f"({y}, {x}) outside a {lmap.n_total}x{lmap.n_total} grid")
    f = lmap.f
    return ((y // f) * lmap.fragments_per_row + x // f) * f * f + (y % f) * f + (x % f)


def _blocked(a: np.ndarray, f: int) -> np.ndarray:
    k = a.shape[0] // f
    return a.reshape(k, f, k, f).swapaxes(1, 2)


def to_fragment_layout(grid: Grid) -> Grid:
    if grid.layout is not Layout.ROW_MAJOR:
        raise LayoutError(f"expected a RowMajor grid, got {grid.layout.value}")
    cells = np.ascontiguousarray(_blocked(grid.as_2d(), grid.f)).reshape(-1)
    return Grid(grid.n, grid.f, Layout.FRAGMENT, cells, grid.halo_filled)


def to_row_major(grid: Grid) -> Grid:
    if grid.layout is not Layout.FRAGMENT:
        raise LayoutError(f"expected a FragmentContiguous grid, got {grid.layout.value}")
    p = grid.padded
    cells = np.ascontiguousarray(grid.fragments().swapaxes(1, 2)).reshape(p, p).reshape(-1)
    return Grid(grid.n, grid.f, Layout.ROW_MAJOR, cells, grid.halo_filled)
