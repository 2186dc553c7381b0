"""CAT pipeline: neighborhood reduction as band-matrix MMAs over fragments.

One step runs three phases separated by barriers:

1. horizontal: ``H[i,j] = L[i,j-1] @ pi1 + L[i,j] @ pi2 + L[i,j+1] @ pi3`` for
   every interior fragment column ``j`` and every fragment row ``i`` (halo rows
   included, the vertical phase needs them);
2. vertical: ``R[i,j] = pi3 @ H[i-1,j] + pi2 @ H[i,j] + pi1 @ H[i+1,j]`` for
   interior fragments (Moore), or the same with ``L`` in place of ``H`` and
   ``H[i,j]`` as accumulator (simplified Von Neumann);
3. rule application per cell, reading the state from ``L`` and the count from ``R``.

Phases 1 and 2 are partitioned into tiles of ``tile_w x tile_h`` fragments that
may run on a thread pool; tiles write disjoint slices so results never depend
on the partition or the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from catsim.errors import ConsistencyError, GeometryError, LayoutError, SequencingError
from catsim.grid import Grid, Layout, LtlRule, NeighborhoodKind, fill_periodic_halo, transition_field
from catsim.mma import ACC_DTYPE, BandFragments, MmaCounter, gen_band_fragments, mma


@dataclass
class ReductionStats:
    """Running maxima of the horizontal and full reductions seen by the engine."""

    max_h: int = 0
    max_r: int = 0

    def observe(self, h: HField, red: ReductionField):
        self.max_h = max(self.max_h, int(h.frags.max()))
        self.max_r = max(self.max_r, int(red.frags.max()))


@dataclass
class CatConfig:
    f: int = 16
    tile_w: int = 1
    tile_h: int = 14
    kind: NeighborhoodKind | None = None
    workers: int = 1
    counter: MmaCounter | None = field(default=None, compare=False)
    stats: ReductionStats | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.f not in (4, 8, 16):
            raise GeometryError(f"fragment size must be 4, 8 or 16, got {self.f}")
        if self.tile_w < 1 or self.tile_h < 1:
            raise GeometryError(f"tile shape must be positive, got {self.tile_w}x{self.tile_h}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass
class HField:
    """Horizontal reductions, stored as ``(rows, cols, f, f)`` fragments."""

    frags: np.ndarray
    complete: bool = False

    @property
    def f(self) -> int:
        return self.frags.shape[-1]


@dataclass
class ReductionField:
    """Full neighborhood reductions for the interior fragments (halo fragments stay zero)."""

    frags: np.ndarray
    center_multiplicity: int

    def to_2d(self) -> np.ndarray:
        """Interior reductions as an ``n x n`` row-major array."""
        inner = self.frags[1:-1, 1:-1]
        k, _, f, _ = inner.shape
        return inner.swapaxes(1, 2).reshape(k * f, k * f)


def _tiles(rows: range, cols: range, tile_w: int, tile_h: int):
    for i0 in range(rows.start, rows.stop, tile_h):
        for j0 in range(cols.start, cols.stop, tile_w):
            yield slice(i0, min(i0 + tile_h, rows.stop)), slice(j0, min(j0 + tile_w, cols.stop))


def _run_tiles(work, tiles, workers: int):
    tiles = list(tiles)
    if workers == 1 or len(tiles) == 1:
        for t in tiles:
            work(*t)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda t: work(*t), tiles))


def _shifted(s: slice, d: int) -> slice:
    return slice(s.start + d, s.stop + d)


def _count(cfg: CatConfig, phase: str, k: int, rows: slice, cols: slice):
    if cfg.counter is not None:
        cfg.counter.record(phase, k, rows, cols)


def _check_inputs(grid: Grid, bands: BandFragments, cfg: CatConfig):
    if grid.layout is not Layout.FRAGMENT:
        raise LayoutError(f"CAT engine needs a FragmentContiguous grid, got {grid.layout.value}")
    if grid.f != cfg.f or bands.f != cfg.f:
        raise GeometryError(f"fragment sizes disagree: grid {grid.f}, bands {bands.f}, config {cfg.f}")
    if not grid.halo_filled:
        raise SequencingError("grid halo is stale; call fill_periodic_halo first")


def horizontal_step(grid: Grid, bands: BandFragments, cfg: CatConfig) -> HField:
    _check_inputs(grid, bands, cfg)
    lam = grid.fragments()
    k = grid.frags_per_side
    out = np.zeros(lam.shape, dtype=ACC_DTYPE)

    def work(rows: slice, cols: slice):
        acc = mma(lam[rows, _shifted(cols, -1)], bands.pi1, 0)
        acc = mma(lam[rows, cols], bands.pi2, acc)
        out[rows, cols] = mma(lam[rows, _shifted(cols, 1)], bands.pi3, acc)
        _count(cfg, "horizontal", k, rows, cols)

    _run_tiles(work, _tiles(range(0, k), range(1, k - 1), cfg.tile_w, cfg.tile_h), cfg.workers)
    return HField(out, complete=True)


def _vertical(below_src: np.ndarray, bands: BandFragments, cfg: CatConfig, phase: str,
              acc_src: np.ndarray | None) -> np.ndarray:
    k = below_src.shape[0]
    out = np.zeros(below_src.shape, dtype=ACC_DTYPE)

    def work(rows: slice, cols: slice):
        acc = 0 if acc_src is None else acc_src[rows, cols]
        acc = mma(bands.pi3, below_src[_shifted(rows, -1), cols], acc)
        acc = mma(bands.pi2, below_src[rows, cols], acc)
        out[rows, cols] = mma(bands.pi1, below_src[_shifted(rows, 1), cols], acc)
        _count(cfg, phase, k, rows, cols)

    _run_tiles(work, _tiles(range(1, k - 1), range(1, k - 1), cfg.tile_w, cfg.tile_h), cfg.workers)
    return out


def vertical_step_moore(h: HField, bands: BandFragments, cfg: CatConfig) -> ReductionField:
    if not h.complete:
        raise SequencingError("horizontal step has not completed")
    return ReductionField(_vertical(h.frags, bands, cfg, "vertical", None), center_multiplicity=1)


def vertical_step_von_neumann(grid: Grid, h: HField, bands: BandFragments,
                              cfg: CatConfig) -> ReductionField:
    if not h.complete:
        raise SequencingError("horizontal step has not completed")
    _check_inputs(grid, bands, cfg)
    r = _vertical(grid.fragments(), bands, cfg, "vertical", h.frags)
    return ReductionField(r, center_multiplicity=2)


def reduce(grid: Grid, rule: LtlRule, cfg: CatConfig,
           bands: BandFragments | None = None) -> tuple[HField, ReductionField]:
    """Run both MMA phases for ``rule``'s neighborhood on a halo-filled grid."""
    bands = bands if bands is not None else gen_band_fragments(cfg.f, rule.r)
    kind = cfg.kind or rule.kind
    h = horizontal_step(grid, bands, cfg)
    if kind is NeighborhoodKind.MOORE:
        red = vertical_step_moore(h, bands, cfg)
    else:
        red = vertical_step_von_neumann(grid, h, bands, cfg)
    if cfg.stats is not None:
        cfg.stats.observe(h, red)
    return h, red


def simulate_step(grid: Grid, rule: LtlRule, cfg: CatConfig, out: Grid,
                  bands: BandFragments | None = None) -> Grid:
    """Advance ``grid`` one generation into ``out`` and return ``out``.

    Only the halo of ``grid`` is written. ``bands`` overrides the band
    fragments derived from ``rule.r`` (used for fault injection).
    """
    if grid.layout is not Layout.FRAGMENT or out.layout is not Layout.FRAGMENT:
        raise LayoutError("simulate_step needs FragmentContiguous input and output grids")
    if out is grid or np.shares_memory(out.cells, grid.cells):
        raise ValueError("output grid must not alias the input grid")
    if (out.n, out.f) != (grid.n, grid.f):
        raise GeometryError("input and output grids differ in geometry")
    fill_periodic_halo(grid)
    _, red = reduce(grid, rule, cfg, bands)
    lam = grid.fragments()
    nxt = out.fragments()
    nxt[...] = 0
    try:
        nxt[1:-1, 1:-1] = transition_field(lam[1:-1, 1:-1], red.frags[1:-1, 1:-1], rule,
                                           red.center_multiplicity)
    except ConsistencyError as exc:
        i, j, a, b = exc.index
        cell = (i * grid.f + a, j * grid.f + b)
        raise ConsistencyError(f"negative neighbor count at interior cell {cell}", cell) from None
    out.halo_filled = False
    return out


def simulate(grid: Grid, rule: LtlRule, cfg: CatConfig, steps: int,
             bands: BandFragments | None = None) -> Grid:
    """Run ``steps`` generations with two ping-pong buffers; ``steps == 0`` returns ``grid``."""
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if steps == 0:
        return grid
    src, dst = grid.copy(), grid.copy()
    for _ in range(steps):
        simulate_step(src, rule, cfg, dst, bands)
        src, dst = dst, src
    return src


def default_workers() -> int:
    """Worker count from ``CAT_WORKERS``, defaulting to 1."""
    return int(os.environ.get("CAT_WORKERS", "1"))
