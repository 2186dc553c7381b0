import numpy as np
import pytest

from catsim.errors import SnapshotFormatError
from catsim.grid import Grid, Layout
from catsim.layout import to_fragment_layout
from catsim.snapshot import decode, encode, snapshot_read, snapshot_write

from conftest import random_grid


def test_round_trip(tmp_path, rng):
    for n, f in ((16, 16), (48, 16), (12, 4)):
        g = random_grid(rng, n, f)
        path = tmp_path / f"g{n}.catsnap"
        snapshot_write(g, path)
        back = snapshot_read(path)
        assert back.layout is Layout.ROW_MAJOR and back.f == f
        assert np.array_equal(back.interior(), g.interior())


def test_golden_bytes(tmp_path):
    g = Grid.zeros(16)
    g.interior()[0, 1] = 1
    g.interior()[15, 15] = 1
    data = encode(g)
    header = b"CATSNAP 1 16 16 RowMajor\n"
    assert data[:len(header)] == header
    assert len(data) == len(header) + 256
    payload = data[len(header):]
    assert payload[1] == 1 and payload[255] == 1 and sum(payload) == 2


def test_fragment_layout_payload_is_row_major(rng):
    g = random_grid(rng, 32)
    frag = to_fragment_layout(g)
    data = encode(frag)
    assert data.startswith(b"CATSNAP 1 32 16 FragmentContiguous\n")
    assert data.split(b"\n", 1)[1] == encode(g).split(b"\n", 1)[1]
    back = decode(data)
    assert back.layout is Layout.FRAGMENT
    assert np.array_equal(
        back.fragments()[1:-1, 1:-1], frag.fragments()[1:-1, 1:-1]
    )


@pytest.mark.parametrize(
    "data",
    [
        b"CATSNAX 1 16 16 RowMajor\n" + bytes(256),
        b"CATSNAP 2 16 16 RowMajor\n" + bytes(256),
        b"CATSNAP 1 16 16 Diagonal\n" + bytes(256),
        b"CATSNAP 1 16 16 RowMajor\n" + bytes(255),
        b"CATSNAP 1 20 16 RowMajor\n" + bytes(400),
        b"CATSNAP 1 16 16 RowMajor\n" + bytes([2]) + bytes(255),
        b"no newline at all",
    ],
)
def test_bad_files(data):
    with pytest.raises(SnapshotFormatError):
        decode(data)
