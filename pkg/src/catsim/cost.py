"""Extended-PRAM cost model for CAT and for a per-cell reference kernel.

All times are abstract cost units with a cache access costing 1. Per-tile
ceilings are exact; :func:`speedup_limit` drops only the outer ceilings over
the whole grid, which cancel as ``n`` grows.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from math import ceil

from catsim.errors import InfeasibleTargetError


@dataclass(frozen=True)
class CostParams:
    global_access: float = 6.0
    cache_access: float = 1.0
    frag_p: int = 16
    frag_q: int = 16
    mma_cycles: float = 16.0
    cores_per_sm: int = 128
    tensor_cores_per_sm: int = 4
    transition_cost: float = 20.0
    tile_w: int = 1
    tile_h: int = 14
    num_sms: int = 144
    tile_efficiency: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")
        for name in ("frag_p", "frag_q", "cores_per_sm", "tensor_cores_per_sm", "tile_w", "tile_h", "num_sms"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.tile_efficiency < 1:
            raise ValueError(f"tile_efficiency must be >= 1, got {self.tile_efficiency}")

    def replace(self, **changes) -> CostParams:
        return dataclasses.replace(self, **changes)


# short names accepted in override files and on the command line
ALIASES = {
    "C": "global_access",
    "c": "cache_access",
    "p": "frag_p",
    "q": "frag_q",
    "tau": "mma_cycles",
    "P_sm": "cores_per_sm",
    "Z_sm": "tensor_cores_per_sm",
    "delta": "transition_cost",
    "w": "tile_w",
    "h": "tile_h",
    "P": "num_sms",
    "E": "tile_efficiency",
}

_INT_FIELDS = {f.name for f in dataclasses.fields(CostParams) if f.type in ("int", int)}


def parse_overrides(text: str) -> dict:
    """Parse ``key=value`` pairs separated by commas, whitespace or newlines.

    ``#`` starts a comment. Keys are field names or their short aliases.
    """
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for item in line.replace(",", " ").split():
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {item!r}")
            name = ALIASES.get(key, key)
            if name not in {f.name for f in dataclasses.fields(CostParams)}:
                raise ValueError(f"unknown cost parameter {key!r}")
            out[name] = int(value) if name in _INT_FIELDS else float(value)
    return out


def time_fh(p: CostParams) -> float:
    """One horizontal fragment: three global loads, three MMAs, three band reads and a shared store."""
    return 3 * p.global_access + 3 * p.mma_cycles + 4 * p.cache_access


def time_tile_h(p: CostParams) -> float:
    return ceil(p.tile_w * (p.tile_h + 2) / p.tensor_cores_per_sm) * time_fh(p)


def time_fr(p: CostParams) -> float:
    return 6 * p.cache_access + 3 * p.mma_cycles + p.global_access


def time_tile_r(p: CostParams) -> float:
    return ceil(p.tile_w * p.tile_h / p.tensor_cores_per_sm) * time_fr(p)


def time_f_stage(p: CostParams) -> float:
    cells = p.tile_w * p.tile_h * p.frag_p * p.frag_q
    return (p.transition_cost + 3 * p.global_access) * ceil(cells / p.cores_per_sm)


def time_band(p: CostParams) -> float:
    return p.cache_access * ceil(p.frag_p * p.frag_q / p.cores_per_sm)


def _tile_work(p: CostParams) -> float:
    return time_tile_h(p) + time_tile_r(p) + time_f_stage(p)


def time_tile(p: CostParams) -> float:
    return 3 * time_band(p) + p.tile_efficiency * _tile_work(p)


def t_ref_cell(p: CostParams, r: int) -> float:
    box = (1 + 2 * r) ** 2
    return box * p.global_access + box - 1 + p.transition_cost + p.global_access


def t_cat(p: CostParams, n: int) -> float:
    tiles = n * n / (p.frag_p * p.frag_q * p.tile_w * p.tile_h)
    return ceil(tiles / p.num_sms) * time_tile(p)


def t_ref(p: CostParams, n: int, r: int) -> float:
    return ceil(n * n / (p.num_sms * p.cores_per_sm)) * t_ref_cell(p, r)


def _cells_per_tile_per_core(p: CostParams) -> float:
    return p.frag_p * p.frag_q * p.tile_w * p.tile_h / p.cores_per_sm


def speedup_limit(p: CostParams, r: int) -> float:
    """``t_ref / t_cat`` as ``n`` grows without bound."""
    return _cells_per_tile_per_core(p) * t_ref_cell(p, r) / time_tile(p)


def derive_e(p: CostParams, r: int, target_speedup: float) -> float:
    """Tile efficiency factor for which :func:`speedup_limit` equals ``target_speedup``.

    Raises:
        InfeasibleTargetError: the solution is below 1, which the model forbids.
    """
    if target_speedup <= 0:
        raise InfeasibleTargetError(f"target speedup must be positive, got {target_speedup}")
    needed_tile_time = _cells_per_tile_per_core(p) * t_ref_cell(p, r) / target_speedup
    e = (needed_tile_time - 3 * time_band(p)) / _tile_work(p)
    if e < 1:
        raise InfeasibleTargetError(
            f"target {target_speedup} at r={r} needs tile efficiency {e:.4g} < 1"
        )
    return e


@dataclass(frozen=True)
class Scenario:
    name: str
    change: str
    overrides: dict


TABLE_II_SCENARIOS = (
    Scenario("GH100 Chip", "n/a", {}),
    Scenario("More TC Units", "Z_sm: 4 -> 16", {"tensor_cores_per_sm": 16}),
    Scenario("Faster TC Units", "tau: 16 -> 1", {"mma_cycles": 1.0}),
    Scenario("More FP Units", "P_sm: 128 -> 512", {"cores_per_sm": 512}),
    Scenario("Regular Tiles", "w x h: 1x14 -> 16x16", {"tile_w": 16, "tile_h": 16}),
    Scenario("Expensive f()", "delta: 20 -> 1000", {"transition_cost": 1000.0}),
)
TABLE_II_RADII = (1, 4, 8, 16)

# published speedups, rows in TABLE_II_SCENARIOS order, columns in TABLE_II_RADII order
TABLE_II_PUBLISHED = (
    (1.20, 8.07, 27.9, 104.0),
    (1.59, 10.6, 37.1, 138.0),
    (1.55, 10.4, 36.1, 134.0),
    (0.60, 4.06, 14.1, 52.5),
    (0.17, 1.15, 3.99, 14.8),
    (0.79, 1.17, 2.25, 6.44),
)


def tile_efficiencies(base: CostParams | None = None) -> dict[tuple[int, int], float]:
    """Efficiency factors for the 1x14 and 16x16 tiles, each pinned by one published speedup."""
    base = base or CostParams()
    narrow = derive_e(base.replace(tile_w=1, tile_h=14), 1, 1.20)
    square = derive_e(base.replace(tile_w=16, tile_h=16), 16, 14.8)
    return {(1, 14): narrow, (16, 16): square}


def scenario_table(base: CostParams, scenarios=TABLE_II_SCENARIOS, radii=TABLE_II_RADII,
                   efficiencies: dict[tuple[int, int], float] | None = None) -> list[list[float]]:
    """Speedup grid, one row per scenario and one column per radius.

    When ``efficiencies`` maps a tile shape to a factor, any scenario landing
    on that shape uses it; other shapes keep ``base.tile_efficiency``.
    """
    efficiencies = efficiencies or {}
    rows = []
    for sc in scenarios:
        p = base.replace(**sc.overrides)
        e = efficiencies.get((p.tile_w, p.tile_h))
        if e is not None and "tile_efficiency" not in sc.overrides:
            p = p.replace(tile_efficiency=e)
        rows.append([speedup_limit(p, r) for r in radii])
    return rows


def parse_derive_request(items) -> dict:
    """``["r=1", "target=1.20"]`` -> ``{"r": 1, "target": 1.2}``."""
    opts = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or key not in ("r", "target"):
            raise ValueError(f"expected r=<radius> and target=<speedup>, got {item!r}")
        opts[key] = int(value) if key == "r" else float(value)
    if set(opts) != {"r", "target"}:
        raise ValueError("--derive-e needs both r=<radius> and target=<speedup>")
    return opts


def format_table(table, radii, scenarios=TABLE_II_SCENARIOS) -> str:
    name_w = max(len(s.name) for s in scenarios)
    change_w = max(len(s.change) for s in scenarios)
    head = f"{'Scenario':<{name_w}}  {'Parameter change':<{change_w}}" + "".join(f"{f'r={r}':>10}" for r in radii)
    lines = [head, "-" * len(head)]
    for sc, row in zip(scenarios, table):
        cells = "".join(f"{f'{v:.3g}x':>10}" for v in row)
        lines.append(f"{sc.name:<{name_w}}  {sc.change:<{change_w}}{cells}")
    return "\n".join(lines)
