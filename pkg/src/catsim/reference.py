"""Comparison engines: brute-force BASE (the oracle) and packet-coded PACK."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from catsim.errors import GeometryError, LayoutError
from catsim.grid import Grid, Layout, LtlRule, NeighborhoodKind, fill_periodic_halo, transition_field

LANES = 8
_WORD = np.dtype("<u8")


@dataclass
class MemoryCounter:
    """Per-step cell-sized global memory traffic of the BASE engine."""

    reads: int = 0
    writes: int = 0
    cells: int = 0

    @property
    def accesses_per_cell(self) -> float:
        return (self.reads + self.writes) / self.cells


def neighborhood_sum(grid: Grid, r: int, kind: NeighborhoodKind,
                     counter: MemoryCounter | None = None) -> np.ndarray:
    """Interior reductions by summing one shifted copy of the grid per neighbor offset.

    Moore reductions count the center once; simplified Von Neumann ones sum the
    vertical and the horizontal window, so the center is counted twice.
    """
    if not grid.halo_filled:
        fill_periodic_halo(grid)
    a = grid.as_2d()
    n, h = grid.n, grid.halo
    if kind is NeighborhoodKind.MOORE:
        offsets = [(dy, dx) for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
    else:
        offsets = [(d, 0) for d in range(-r, r + 1)] + [(0, d) for d in range(-r, r + 1)]
    total = np.zeros((n, n), dtype=np.int32)
    for dy, dx in offsets:
        total += a[h + dy:h + dy + n, h + dx:h + dx + n]
    if counter is not None:
        counter.reads += len(offsets) * n * n
    return total


def base_step(grid: Grid, rule: LtlRule, counter: MemoryCounter | None = None) -> Grid:
    """One generation computed cell by cell from the raw neighborhood (row-major)."""
    if grid.layout is not Layout.ROW_MAJOR:
        raise LayoutError(f"BASE needs a RowMajor grid, got {grid.layout.value}")
    reduction = neighborhood_sum(grid, rule.r, rule.kind, counter)
    state = grid.interior()
    out = Grid.zeros(grid.n, grid.f)
    out.interior()[...] = transition_field(state, reduction, rule, rule.kind.center_multiplicity)
    if counter is not None:
        n2 = grid.n * grid.n
        counter.reads += n2  # state reload for the rule
        counter.writes += n2
        counter.cells += n2
    return out


def base_simulate(grid: Grid, rule: LtlRule, steps: int, counter: MemoryCounter | None = None) -> Grid:
    for _ in range(steps):
        grid = base_step(grid, rule, counter)
    return grid


@dataclass
class PackedGrid:
    """Padded grid with eight 8-bit cells per 64-bit word; lane 0 is the low byte."""

    n: int
    halo: int
    words: np.ndarray
    halo_filled: bool = False

    @property
    def padded(self) -> int:
        return self.n + 2 * self.halo

    def lanes(self) -> np.ndarray:
        """``(padded, padded)`` uint8 view aliasing ``words``."""
        return self.words.view(np.uint8).reshape(self.padded, self.padded)


def _check_packable(padded: int, halo: int):
    if padded % LANES:
        raise GeometryError(f"row width {padded} is not a multiple of {LANES}")
    if halo % LANES:
        raise GeometryError(f"halo width {halo} is not a whole number of words")


def pack(grid: Grid) -> PackedGrid:
    if grid.layout is not Layout.ROW_MAJOR:
        raise LayoutError(f"pack needs a RowMajor grid, got {grid.layout.value}")
    _check_packable(grid.padded, grid.halo)
    words = np.ascontiguousarray(grid.as_2d()).view(_WORD).copy()
    return PackedGrid(grid.n, grid.halo, words, grid.halo_filled)


def unpack(pg: PackedGrid) -> Grid:
    return Grid(pg.n, pg.halo, Layout.ROW_MAJOR, pg.lanes().copy(), pg.halo_filled)


def fill_packed_halo(pg: PackedGrid) -> PackedGrid:
    h, n = pg.halo, pg.n
    rows = pg.words
    wh, wn = h // LANES, n // LANES
    rows[:h] = rows[n:n + h]
    rows[h + n:] = rows[h:2 * h]
    rows[:, :wh] = rows[:, wn:wn + wh]
    rows[:, wh + wn:] = rows[:, wh:2 * wh]
    pg.halo_filled = True
    return pg


def _window_sum(x: np.ndarray, axis: int, lo: int, width: int, count: int) -> np.ndarray:
    """Sums of ``width`` consecutive entries starting at ``lo + k`` for ``k < count``."""
    c = np.cumsum(x, axis=axis, dtype=np.int32)
    c = np.concatenate([np.zeros_like(np.take(c, [0], axis=axis)), c], axis=axis)
    hi = np.take(c, range(lo + width, lo + width + count), axis=axis)
    return hi - np.take(c, range(lo, lo + count), axis=axis)


def pack_step(pg: PackedGrid, rule: LtlRule) -> PackedGrid:
    """One generation on packed words.

    Each interior word gathers ``ceil(r/8)`` words on either side from every
    row of the window, unpacks the resulting strip of lanes and accumulates
    per-cell counts in int32; the rule is applied lane-wise and repacked.
    """
    _check_packable(pg.padded, pg.halo)
    if not pg.halo_filled:
        fill_packed_halo(pg)
    r, n, h = rule.r, pg.n, pg.halo
    reach = -(-r // LANES)
    if reach * LANES > h:
        raise GeometryError(f"radius {r} reaches past a {h}-cell halo")
    w0, nw = h // LANES, n // LANES
    gathered = np.stack([pg.words[:, w0 + k:w0 + k + nw] for k in range(-reach, reach + 1)], axis=-1)
    strip = np.ascontiguousarray(gathered).view(np.uint8)  # (padded, nw, (2*reach+1)*8)
    centre = reach * LANES
    # horizontal window per lane, for every padded row
    horiz = np.stack(
        [strip[..., centre + lane - r:centre + lane + r + 1].sum(axis=-1, dtype=np.int32)
         for lane in range(LANES)],
        axis=-1,
    )
    if rule.kind is NeighborhoodKind.MOORE:
        counts = _window_sum(horiz, 0, h - r, 2 * r + 1, n)
    else:
        column = strip[..., centre:centre + LANES].astype(np.int32)
        counts = _window_sum(column, 0, h - r, 2 * r + 1, n) + horiz[h:h + n]
    state = strip[h:h + n, :, centre:centre + LANES]
    nxt = transition_field(state, counts, rule, rule.kind.center_multiplicity)
    out = np.zeros_like(pg.words)
    out[h:h + n, w0:w0 + nw] = np.ascontiguousarray(nxt).view(_WORD)[..., 0]
    return PackedGrid(n, h, out, halo_filled=False)


def pack_simulate(pg: PackedGrid, rule: LtlRule, steps: int) -> PackedGrid:
    for _ in range(steps):
        pg = pack_step(pg, rule)
    return pg
