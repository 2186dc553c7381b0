"""Throughput benchmarks and tile-shape sweeps."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass

from catsim.engine import CatConfig, simulate
from catsim.grid import Grid, LtlRule, init_random
from catsim.layout import to_fragment_layout
from catsim.reference import base_simulate, pack, pack_simulate

BENCH_HEADER = ("engine", "n", "r", "steps", "realizations", "ms_per_step", "stderr_pct", "cells_per_sec")
SWEEP_HEADER = ("w", "h", "ms_per_step")


@dataclass
class BenchResult:
    engine: str
    n: int
    r: int
    steps: int
    realizations: int
    ms_per_step: float
    stderr_pct: float

    @property
    def cells_per_sec(self) -> float:
        return self.n * self.n / (self.ms_per_step / 1e3) if self.ms_per_step > 0 else float("inf")

    def row(self) -> tuple:
        return (self.engine, self.n, self.r, self.steps, self.realizations,
                f"{self.ms_per_step:.4f}", f"{self.stderr_pct:.3f}", f"{self.cells_per_sec:.4g}")


def _runner(engine: str, grid: Grid, rule: LtlRule, steps: int, cfg: CatConfig):
    """Zero-argument callable running ``steps`` generations; layout conversion happens up front."""
    if engine == "base":
        return lambda: base_simulate(grid.copy(), rule, steps)
    if engine == "pack":
        packed = pack(grid)
        return lambda: pack_simulate(packed, rule, steps)
    if engine == "cat":
        frag = to_fragment_layout(grid)
        return lambda: simulate(frag, rule, cfg, steps)
    raise ValueError(f"unknown engine {engine!r}")


def time_per_step(engine: str, grid: Grid, rule: LtlRule, steps: int, cfg: CatConfig | None = None,
                  min_realizations: int = 2, max_realizations: int = 32, target_stderr: float = 0.01,
                  warmup: bool = True) -> BenchResult:
    """Mean milliseconds per step over repeated realizations.

    Realizations continue until the standard error drops to ``target_stderr``
    of the mean or ``max_realizations`` is reached.
    """
    steps = max(steps, 1)
    run = _runner(engine, grid, rule, steps, cfg or CatConfig(f=grid.f))
    if warmup:
        run()
    samples = []
    while len(samples) < max_realizations:
        t0 = time.perf_counter()
        run()
        samples.append((time.perf_counter() - t0) * 1e3 / steps)
        if len(samples) >= max(min_realizations, 2):
            mean = statistics.fmean(samples)
            if statistics.stdev(samples) / len(samples) ** 0.5 <= target_stderr * mean:
                break
    mean = statistics.fmean(samples)
    err = statistics.stdev(samples) / len(samples) ** 0.5 if len(samples) > 1 else 0.0
    return BenchResult(engine, grid.n, rule.r, steps, len(samples), mean, 100 * err / mean if mean else 0.0)


def interleaved_best(engine: str, cases, steps: int = 1, rounds: int = 5,
                     cfg: CatConfig | None = None) -> list[float]:
    """Best-of-``rounds`` ms/step for each ``(grid, rule)`` in ``cases``.

    Each round times every case once, so slow spells on a shared machine are
    spread across cases instead of landing on one of them.
    """
    steps = max(steps, 1)
    runs = [_runner(engine, grid, rule, steps, cfg or CatConfig(f=grid.f)) for grid, rule in cases]
    for run in runs:
        run()
    best = [float("inf")] * len(runs)
    for _ in range(rounds):
        for i, run in enumerate(runs):
            t0 = time.perf_counter()
            run()
            best[i] = min(best[i], (time.perf_counter() - t0) * 1e3 / steps)
    return best


def bench(engines, n: int, rules: list[LtlRule], steps: int, seed: int = 1, density: float = 0.25,
          cfg: CatConfig | None = None, **kwargs) -> list[BenchResult]:
    results = []
    for rule in rules:
        grid = init_random(n, rule, density, seed)
        for engine in engines:
            results.append(time_per_step(engine, grid, rule, steps, cfg, **kwargs))
    return results


def sweep_tiles(w_range, h_range, n: int, rule: LtlRule, steps: int = 1, seed: int = 1,
                density: float = 0.25, workers: int = 1, f: int = 16, **kwargs) -> list[tuple[int, int, float]]:
    """CAT ms/step for every tile shape in ``w_range x h_range``."""
    grid = init_random(n, rule, density, seed, f=f)
    rows = []
    for w in w_range:
        for h in h_range:
            cfg = CatConfig(f=f, tile_w=w, tile_h=h, workers=workers)
            res = time_per_step("cat", grid, rule, steps, cfg, **kwargs)
            rows.append((w, h, res.ms_per_step))
    return rows


def write_csv(stream, header, rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
