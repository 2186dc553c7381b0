import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsim.errors import GeometryError, LayoutError
from catsim.grid import Grid, Layout
from catsim.layout import LayoutMap, frag_index, to_fragment_layout, to_row_major


@pytest.mark.parametrize("y, x, expected", [(0, 0, 0), (0, 16, 256), (17, 1, 529)])
def test_frag_index_examples(y, x, expected):
    assert frag_index(LayoutMap(16, 32), y, x) == expected


def test_frag_index_bounds():
    with pytest.raises(IndexError):
        frag_index(LayoutMap(16, 32), 32, 0)
    with pytest.raises(GeometryError):
        LayoutMap(16, 40)


@pytest.mark.parametrize("f, n_total", [(4, 16), (4, 8), (8, 24)])
def test_frag_index_bijective(f, n_total):
    lmap = LayoutMap(f, n_total)
    offsets = sorted(frag_index(lmap, y, x) for y in range(n_total) for x in range(n_total))
    assert offsets == list(range(n_total * n_total))


def test_fragment_offsets_consecutive():
    lmap = LayoutMap(16, 48)
    offs = sorted(frag_index(lmap, 16 + a, 32 + b) for a in range(16) for b in range(16))
    assert offs == list(range(offs[0], offs[0] + 256))


def test_single_cell_lands_at_529():
    # a 32x32 padded buffer is smaller than any valid Grid at f=16, so permute it directly
    buf = np.zeros((32, 32), np.uint8)
    buf[17, 1] = 1
    blocked = buf.reshape(2, 16, 2, 16).swapaxes(1, 2).reshape(-1)
    assert np.flatnonzero(blocked).tolist() == [529]


def test_single_cell_follows_frag_index():
    g = Grid.zeros(16, 16)
    g.as_2d()[17, 1] = 1
    frag = to_fragment_layout(g)
    assert np.flatnonzero(frag.cells).tolist() == [frag_index(LayoutMap(16, 48), 17, 1)]


def test_offset_256_is_cell_0_16():
    g = Grid(32, 16, Layout.FRAGMENT, np.zeros(64 * 64, np.uint8))
    # padded 64, four fragments per row: offset 256 is the second fragment's origin
    g.cells[256] = 1
    assert np.argwhere(to_row_major(g).as_2d()).tolist() == [[0, 16]]


def test_constant_fields():
    dead = Grid.zeros(32, 16)
    assert to_fragment_layout(dead).cells.sum() == 0
    alive = Grid(32, 16, Layout.FRAGMENT, np.ones(64 * 64, np.uint8))
    assert to_row_major(alive).cells.min() == 1


def test_wrong_layout_rejected():
    g = Grid.zeros(16, 16)
    with pytest.raises(LayoutError):
        to_row_major(g)
    with pytest.raises(LayoutError):
        to_fragment_layout(to_fragment_layout(g))


@given(st.sampled_from([4, 8, 16]), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60)
def test_round_trip(f, k, seed):
    n = f * k
    cells = np.random.default_rng(seed).integers(0, 2, (n + 2 * f) ** 2, dtype=np.uint8)
    g = Grid(n, f, Layout.ROW_MAJOR, cells)
    frag = to_fragment_layout(g)
    lmap = LayoutMap.for_grid(g)
    a = g.as_2d()
    ys, xs = np.random.default_rng(seed).integers(0, g.padded, (2, 50))
    for y, x in zip(ys, xs):
        assert frag.cells[frag_index(lmap, y, x)] == a[y, x]
    assert to_row_major(frag).cells.tobytes() == g.cells.tobytes()
