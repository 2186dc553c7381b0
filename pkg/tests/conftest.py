import numpy as np
import pytest

ACCEPTANCE_LINES = pytest.StashKey[list]()

from catsim.grid import Grid, NeighborhoodKind


def torus_sum(interior: np.ndarray, r: int, kind: NeighborhoodKind) -> np.ndarray:
    """Neighborhood reduction on the bare torus via np.roll (no halo involved)."""
    a = interior.astype(np.int64)
    if kind is NeighborhoodKind.MOORE:
        offsets = [(dy, dx) for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
    else:
        offsets = [(d, 0) for d in range(-r, r + 1)] + [(0, d) for d in range(-r, r + 1)]
    total = np.zeros_like(a)
    for dy, dx in offsets:
        total += np.roll(a, (-dy, -dx), axis=(0, 1))
    return total


def torus_step(interior: np.ndarray, rule) -> np.ndarray:
    """Next generation computed from :func:`torus_sum` with the rule written out longhand."""
    red = torus_sum(interior, rule.r, rule.kind)
    mult = 1 if rule.kind is NeighborhoodKind.MOORE else 2
    count = red - (mult - rule.m) * interior
    survive = (interior == 1) & (count >= rule.s1) & (count <= rule.s2)
    born = (interior == 0) & (count >= rule.b1) & (count <= rule.b2)
    return (survive | born).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_grid(rng, n, f=16, density=0.5) -> Grid:
    return Grid.from_interior((rng.random((n, n)) < density).astype(np.uint8), f)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
