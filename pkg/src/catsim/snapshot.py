"""Binary grid snapshots.

A snapshot is the ASCII header ``CATSNAP 1 <n> <f> <layout>`` and a newline,
followed by the ``n*n`` interior cells as 0x00/0x01 bytes in row-major order.
The layout token records how the grid was held in memory; the payload is
always row-major.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from catsim.errors import GeometryError, SnapshotFormatError
from catsim.grid import Grid, Layout
from catsim.layout import to_fragment_layout, to_row_major

MAGIC = "CATSNAP"
VERSION = 1


def encode(grid: Grid) -> bytes:
    rm = to_row_major(grid) if grid.layout is Layout.FRAGMENT else grid
    header = f"{MAGIC} {VERSION} {grid.n} {grid.f} {grid.layout.value}\n".encode("ascii")
    return header + np.ascontiguousarray(rm.interior()).tobytes()


def decode(data: bytes) -> Grid:
    head, sep, payload = data.partition(b"\n")
    if not sep:
        raise SnapshotFormatError("missing header line")
    fields = head.decode("ascii", errors="replace").split(" ")
    if len(fields) != 5 or fields[0] != MAGIC:
        raise SnapshotFormatError(f"bad magic in header {head[:40]!r}")
    if fields[1] != str(VERSION):
        raise SnapshotFormatError(f"unsupported snapshot version {fields[1]}")
    try:
        n, f = int(fields[2]), int(fields[3])
        layout = Layout(fields[4])
    except ValueError as exc:
        raise SnapshotFormatError(f"bad geometry in header: {exc}") from None
    if len(payload) != n * n:
        raise SnapshotFormatError(f"payload has {len(payload)} bytes, expected {n * n}")
    cells = np.frombuffer(payload, dtype=np.uint8).reshape(n, n)
    if cells.size and cells.max() > 1:
        raise SnapshotFormatError("cell values must be 0 or 1")
    try:
        grid = Grid.from_interior(cells, f)
    except GeometryError as exc:
        raise SnapshotFormatError(str(exc)) from None
    return to_fragment_layout(grid) if layout is Layout.FRAGMENT else grid


def snapshot_write(grid: Grid, path) -> None:
    Path(path).write_bytes(encode(grid))


def snapshot_read(path) -> Grid:
    return decode(Path(path).read_bytes())
