"""Exact software matrix-multiply-accumulate on square fragments and band fragments."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from catsim.errors import ShapeError, UnsupportedRadiusError
from catsim.grid import MAX_RADIUS, NeighborhoodKind

ACC_DTYPE = np.int32
FP16_EXACT_LIMIT = 2 ** 11


class MmaCounter:
    """Thread-safe tally of fragment MMAs per pipeline phase and output fragment.

    ``per_fragment[phase][i, j]`` counts the MMAs that produced output fragment
    ``(i, j)`` in that phase, accumulated over every step run with the counter.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.per_fragment: dict[str, np.ndarray] = {}

    def record(self, phase: str, frags_per_side: int, rows: slice, cols: slice, mmas: int = 3):
        with self._lock:
            tally = self.per_fragment.get(phase)
            if tally is None or tally.shape[0] != frags_per_side:
                tally = self.per_fragment[phase] = np.zeros((frags_per_side, frags_per_side), np.int64)
            tally[rows, cols] += mmas

    @property
    def counts(self) -> dict[str, int]:
        return {phase: int(t.sum()) for phase, t in self.per_fragment.items()}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def reset(self):
        with self._lock:
            self.per_fragment.clear()


def mma(a: np.ndarray, b: np.ndarray, acc: np.ndarray) -> np.ndarray:
    """Return ``a @ b + acc`` for ``f x f`` fragments, in exact integer arithmetic.

    Leading axes broadcast, so a stack of fragments counts as a batch of MMAs.
    A scalar ``acc`` of 0 stands for the zero fragment.
    """
    a, b, acc = (np.asarray(x) for x in (a, b, acc))
    operands = (a, b) if acc.ndim == 0 else (a, b, acc)
    if any(x.ndim < 2 for x in (a, b)):
        raise ShapeError(f"fragments must be 2-D, got {a.shape} and {b.shape}")
    sides = {d for x in operands for d in x.shape[-2:]}
    if len(sides) != 1:
        raise ShapeError(f"fragment sides disagree: {a.shape}, {b.shape}, {acc.shape}")
    return np.matmul(a.astype(ACC_DTYPE, copy=False), b.astype(ACC_DTYPE, copy=False)) + acc


@dataclass(frozen=True)
class BandFragments:
    """The three ``f x f`` blocks that tile the ``|x - y| <= r`` band matrix.

    ``pi2`` sits on the block diagonal, ``pi1`` on the block super-diagonal and
    ``pi3`` on the block sub-diagonal.
    """

    pi1: np.ndarray
    pi2: np.ndarray
    pi3: np.ndarray
    r: int

    @property
    def f(self) -> int:
        return self.pi2.shape[0]

    def with_flipped_bit(self, which: str, row: int, col: int) -> BandFragments:
        """Copy with one bit of ``pi1``/``pi2``/``pi3`` inverted (fault injection)."""
        frags = {"pi1": self.pi1.copy(), "pi2": self.pi2.copy(), "pi3": self.pi3.copy()}
        frags[which][row, col] ^= 1
        return BandFragments(r=self.r, **frags)


def gen_band_fragments(f: int, r: int) -> BandFragments:
    if not 1 <= r <= f:
        raise UnsupportedRadiusError(f"radius {r} does not fit in a fragment of side {f}")
    a = np.arange(f)[:, None]
    b = np.arange(f)[None, :]
    as_frag = lambda mask: mask.astype(ACC_DTYPE)  # noqa: E731
    return BandFragments(
        pi1=as_frag(a - b >= f - r),
        pi2=as_frag(np.abs(a - b) <= r),
        pi3=as_frag(b - a >= f - r),
        r=r,
    )


def assemble_band(bands: BandFragments, blocks: int) -> np.ndarray:
    """Block-tridiagonal ``(blocks*f)^2`` matrix built from the band fragments."""
    f = bands.f
    out = np.zeros((blocks * f, blocks * f), dtype=ACC_DTYPE)
    for j in range(blocks):
        out[j * f:(j + 1) * f, j * f:(j + 1) * f] = bands.pi2
        if j > 0:
            out[(j - 1) * f:j * f, j * f:(j + 1) * f] = bands.pi1
        if j + 1 < blocks:
            out[(j + 1) * f:(j + 2) * f, j * f:(j + 1) * f] = bands.pi3
    return out


def fp16_exactness_bound(r: int, kind: NeighborhoodKind) -> int:
    """Largest reduction value any 0/1 grid can produce at radius ``r``."""
    if not 1 <= r <= MAX_RADIUS:
        raise UnsupportedRadiusError(f"radius {r} outside 1..{MAX_RADIUS}")
    side = 2 * r + 1
    return side * side if kind is NeighborhoodKind.MOORE else 2 * side
