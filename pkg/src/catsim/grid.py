"""Cell grids, Larger-than-Life rules, seeded initialization and halos."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from catsim.errors import (
    ConsistencyError,
    GeometryError,
    LayoutError,
    RuleParseError,
    UnsupportedRuleError,
)

DEFAULT_FRAGMENT = 16
MAX_RADIUS = 16

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class NeighborhoodKind(enum.Enum):
    MOORE = "M"
    VON_NEUMANN = "N"

    @property
    def center_multiplicity(self) -> int:
        """How many times the band-matrix reduction counts the center cell."""
        return 1 if self is NeighborhoodKind.MOORE else 2


class Layout(enum.Enum):
    ROW_MAJOR = "RowMajor"
    FRAGMENT = "FragmentContiguous"


@dataclass(frozen=True)
class LtlRule:
    """A two-state Larger-than-Life rule ``R<r>,C<c>,M<m>,S<s1>..<s2>,B<b1>..<b2>,N<kind>``."""

    r: int
    s1: int
    s2: int
    b1: int
    b2: int
    kind: NeighborhoodKind = NeighborhoodKind.MOORE
    m: int = 0
    c: int = 2

    def __post_init__(self):
        if self.c != 2:
            raise UnsupportedRuleError(f"only two-state rules are supported, got C{self.c}")
        if not 1 <= self.r <= MAX_RADIUS:
            raise UnsupportedRuleError(f"radius must be in 1..{MAX_RADIUS}, got R{self.r}")
        if self.m not in (0, 1):
            raise RuleParseError("M", f"center flag must be 0 or 1, got {self.m}")
        limit = self.max_count
        for name, lo, hi in (("S", self.s1, self.s2), ("B", self.b1, self.b2)):
            if not 0 <= lo <= hi:
                raise RuleParseError(name, f"range {lo}..{hi} is empty or negative")
            if hi > limit:
                raise RuleParseError(name, f"upper bound {hi} exceeds neighborhood size {limit}")

    @property
    def neighborhood_size(self) -> int:
        """Cell count of the neighborhood, center included."""
        side = 2 * self.r + 1
        if self.kind is NeighborhoodKind.MOORE:
            return side * side
        return 2 * side - 1

    @property
    def max_count(self) -> int:
        return self.neighborhood_size - (1 - self.m)

    def __str__(self) -> str:
        return format_ltl_rule(self)


_FIELD_PATTERNS = (
    ("R", re.compile(r"R(\d+)")),
    ("C", re.compile(r"C(\d+)")),
    ("M", re.compile(r"M([01])")),
    ("S", re.compile(r"S(\d+)\.\.(\d+)")),
    ("B", re.compile(r"B(\d+)\.\.(\d+)")),
    ("N", re.compile(r"N([MN])")),
)


def parse_ltl_rule(text: str) -> LtlRule:
    """Parse a rule string such as ``"R1,C2,M0,S2..3,B3..3,NM"``.

    Raises:
        RuleParseError: the string is malformed; ``err.field`` names the culprit.
        UnsupportedRuleError: radius outside 1..16 or more than two states.
    """
    parts = text.strip().split(",")
    if len(parts) != len(_FIELD_PATTERNS):
        raise RuleParseError("rule", f"expected {len(_FIELD_PATTERNS)} comma-separated fields, got {len(parts)}")
    values = {}
    for part, (name, pattern) in zip(parts, _FIELD_PATTERNS):
        match = pattern.fullmatch(part.strip())
        if match is None:
            if name == "N" and part.strip().startswith("N"):
                raise RuleParseError("N", f"invalid neighborhood code {part.strip()[1:]!r}")
            raise RuleParseError(name, f"cannot parse {part.strip()!r}")
        values[name] = match.groups()
    return LtlRule(
        r=int(values["R"][0]),
        c=int(values["C"][0]),
        m=int(values["M"][0]),
        s1=int(values["S"][0]),
        s2=int(values["S"][1]),
        b1=int(values["B"][0]),
        b2=int(values["B"][1]),
        kind=NeighborhoodKind(values["N"][0]),
    )


def format_ltl_rule(rule: LtlRule) -> str:
    return (
        f"R{rule.r},C{rule.c},M{rule.m},S{rule.s1}..{rule.s2},"
        f"B{rule.b1}..{rule.b2},N{rule.kind.value}"
    )


@dataclass(frozen=True)
class Preset:
    name: str
    rule: LtlRule
    density: float


def _preset(name, text, density):
    return Preset(name, parse_ltl_rule(text), density)


PRESETS = {
    p.name: p
    for p in (
        _preset("game-of-life", "R1,C2,M0,S2..3,B3..3,NM", 0.07),
        _preset("starry-night", "R2,C2,M0,S7..12,B8..11,NM", 0.15),
        _preset("boiling-gnocchi", "R3,C2,M0,S15..23,B14..17,NM", 0.25),
        _preset("majority", "R4,C2,M0,S40..80,B41..80,NM", 0.50),
        _preset("bosco", "R5,C2,M0,S35..59,B34..45,NM", 0.21),
        _preset("radiation", "R6,C2,M0,S49..81,B46..65,NM", 0.22),
        _preset("waffles", "R7,C2,M0,S101..201,B75..170,NM", 0.29),
        _preset("globe", "R8,C2,M0,S163..223,B74..252,NM", 0.23),
        _preset("gravity", "R9,C2,M0,S108..181,B100..140,NM", 0.24),
        _preset("bugsmovie", "R10,C2,M0,S122..211,B123..170,NM", 0.25),
        _preset("broken-ships", "R11,C2,M0,S156..265,B147..205,NM", 0.24),
        _preset("scaled-gol", "R12,C2,M0,S170..296,B170..240,NM", 0.25),
        _preset("the-cleansing", "R13,C2,M0,S213..364,B203..283,NM", 0.25),
        _preset("scaled-bugsmovie", "R14,C2,M0,S245..420,B234..326,NM", 0.25),
        _preset("pretzels", "R15,C2,M0,S170..296,B170..240,NM", 0.28),
        _preset("tangy-ramen", "R16,C2,M0,S170..296,B170..300,NM", 0.26),
    )
}


def preset_for_radius(r: int) -> Preset:
    for preset in PRESETS.values():
        if preset.rule.r == r:
            return preset
    raise KeyError(r)


@dataclass
class Grid:
    """An ``n x n`` torus of 0/1 cells stored with a ghost border ``f`` cells wide.

    ``cells`` is a flat uint8 buffer of length ``(n + 2f)**2``. Its ordering is
    given by ``layout``; use :meth:`as_2d` (row-major) or :meth:`fragments`
    (fragment-contiguous) for structured views that alias the buffer.
    """

    n: int
    f: int
    layout: Layout
    cells: np.ndarray
    halo_filled: bool = field(default=False)

    def __post_init__(self):
        if self.f < 1 or self.n < self.f or self.n % self.f:
            raise GeometryError(f"n={self.n} must be a positive multiple of the fragment size f={self.f}")
        self.cells = np.ascontiguousarray(self.cells, dtype=np.uint8).reshape(-1)
        if self.cells.size != self.padded * self.padded:
            raise GeometryError(f"buffer has {self.cells.size} cells, expected {self.padded ** 2}")

    @classmethod
    def zeros(cls, n: int, f: int = DEFAULT_FRAGMENT, layout: Layout = Layout.ROW_MAJOR) -> Grid:
        if f < 1 or n < f or n % f:
            raise GeometryError(f"n={n} must be a positive multiple of the fragment size f={f}")
        return cls(n, f, layout, np.zeros((n + 2 * f) ** 2, dtype=np.uint8))

    @classmethod
    def from_interior(cls, interior: np.ndarray, f: int = DEFAULT_FRAGMENT) -> Grid:
        """Row-major grid whose interior is ``interior`` (halo left unfilled)."""
        interior = np.asarray(interior)
        if interior.ndim != 2 or interior.shape[0] != interior.shape[1]:
            raise GeometryError(f"interior must be square, got shape {interior.shape}")
        grid = cls.zeros(interior.shape[0], f)
        grid.interior()[...] = interior
        return grid

    @property
    def halo(self) -> int:
        return self.f

    @property
    def padded(self) -> int:
        return self.n + 2 * self.f

    @property
    def frags_per_side(self) -> int:
        return self.padded // self.f

    def as_2d(self) -> np.ndarray:
        if self.layout is not Layout.ROW_MAJOR:
            raise LayoutError("as_2d() needs a row-major grid")
        return self.cells.reshape(self.padded, self.padded)

    def interior(self) -> np.ndarray:
        h = self.halo
        return self.as_2d()[h:h + self.n, h:h + self.n]

    def fragments(self) -> np.ndarray:
        """View of shape ``(rows, cols, f, f)`` over a fragment-contiguous buffer."""
        if self.layout is not Layout.FRAGMENT:
            raise LayoutError("fragments() needs a fragment-contiguous grid")
        k = self.frags_per_side
        return self.cells.reshape(k, k, self.f, self.f)

    def copy(self) -> Grid:
        return Grid(self.n, self.f, self.layout, self.cells.copy(), self.halo_filled)

    def alive(self) -> int:
        if self.layout is Layout.ROW_MAJOR:
            return int(self.interior().sum())
        return int(self.fragments()[1:-1, 1:-1].sum())


def splitmix64(seed: int):
    """Yield the splitmix64 stream for ``seed`` (scalar reference generator)."""
    state = seed & _MASK64
    while True:
        state = (state + _GOLDEN) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        yield z ^ (z >> 31)


def splitmix64_array(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of :func:`splitmix64` as a uint64 array."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + k * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def random_cells(count: int, density: float, seed: int) -> np.ndarray:
    """``count`` Bernoulli(density) cells; a cell is alive iff ``u / 2**64 < density``."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    threshold = math.ceil(Fraction(density) * (1 << 64))
    if threshold > _MASK64:
        return np.ones(count, dtype=np.uint8)
    return (splitmix64_array(seed, count) < np.uint64(threshold)).astype(np.uint8)


def init_random(n: int, rule: LtlRule | None, density: float, seed: int,
                f: int = DEFAULT_FRAGMENT) -> Grid:
    """Row-major grid with interior cells drawn in row-major order; halo zeroed.

    ``rule`` is accepted for interface symmetry; the draw does not depend on it.
    """
    grid = Grid.zeros(n, f)
    grid.interior()[...] = random_cells(n * n, density, seed).reshape(n, n)
    return grid


def fill_periodic_halo(grid: Grid) -> Grid:
    """Copy wrap-around images of the interior into the ghost border, in place."""
    if grid.layout is Layout.ROW_MAJOR:
        h = grid.halo
        a = grid.as_2d()
        a[...] = np.pad(a[h:h + grid.n, h:h + grid.n], h, mode="wrap")
    else:
        # halo is exactly one fragment wide, so wrap images are whole fragments
        fr = grid.fragments()
        fr[0, :] = fr[-2, :]
        fr[-1, :] = fr[1, :]
        fr[:, 0] = fr[:, -2]
        fr[:, -1] = fr[:, 1]
    grid.halo_filled = True
    return grid


def _count(state, reduction, rule: LtlRule, center_multiplicity: int):
    excluded = center_multiplicity - rule.m
    return reduction - excluded * state


def apply_transition(state: int, reduction: int, rule: LtlRule, center_multiplicity: int) -> int:
    """Next state of one cell given its band-matrix reduction value."""
    count = _count(state, reduction, rule, center_multiplicity)
    if count < 0:
        raise ConsistencyError(f"negative neighbor count {count} (reduction={reduction}, state={state})")
    if state:
        return int(rule.s1 <= count <= rule.s2)
    return int(rule.b1 <= count <= rule.b2)


def transition_field(state: np.ndarray, reduction: np.ndarray, rule: LtlRule,
                     center_multiplicity: int) -> np.ndarray:
    """Vectorized :func:`apply_transition` over matching arrays; returns uint8.

    Builds a next-state table over (state, reduction) for the reductions
    actually present and gathers from it, one pass over the field.
    """
    if reduction.size == 0:
        return np.zeros(reduction.shape, dtype=np.uint8)
    lo, hi = int(reduction.min()), int(reduction.max())
    width = hi - lo + 1
    red = np.arange(lo, hi + 1)
    table = np.empty((2, width), dtype=np.uint8)
    for s in (0, 1):
        count = _count(s, red, rule, center_multiplicity)
        first, last = (rule.s1, rule.s2) if s else (rule.b1, rule.b2)
        table[s] = np.where(count < 0, 2, (count >= first) & (count <= last))
    idx = np.subtract(reduction, lo, dtype=np.int32)
    idx += state.astype(np.int32) * width
    out = table.ravel().take(idx)
    if (table == 2).any() and out.max() > 1:
        index = tuple(int(i) for i in np.unravel_index(np.argmax(out), out.shape))
        count = _count(int(state[index]), int(reduction[index]), rule, center_multiplicity)
        raise ConsistencyError(f"negative neighbor count {count} at {index}", index)
    return out
