"""Cellular automata with neighborhood reduction as banded fragment MMAs."""

from catsim.engine import CatConfig, simulate, simulate_step
from catsim.grid import (
    PRESETS,
    Grid,
    Layout,
    LtlRule,
    NeighborhoodKind,
    fill_periodic_halo,
    format_ltl_rule,
    init_random,
    parse_ltl_rule,
)
from catsim.layout import to_fragment_layout, to_row_major
from catsim.reference import base_step, pack, pack_step, unpack

__all__ = [
    "PRESETS",
    "CatConfig",
    "Grid",
    "Layout",
    "LtlRule",
    "NeighborhoodKind",
    "base_step",
    "fill_periodic_halo",
    "format_ltl_rule",
    "init_random",
    "pack",
    "pack_step",
    "parse_ltl_rule",
    "simulate",
    "simulate_step",
    "to_fragment_layout",
    "to_row_major",
    "unpack",
]
