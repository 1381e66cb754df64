import itertools
import random
from fractions import Fraction

import pytest

from dihom import GridSpec, Obstacle, ObstacleModel, build_grid


def half(*nums):
    return tuple(Fraction(n, 2) for n in nums)


def planar_model():
    """Four point obstacles in a 4x4 box; O2 and O3 are incomparable."""
    return ObstacleModel((4, 4), [
        Obstacle("O1", half(1, 1)),
        Obstacle("O2", half(3, 5)),
        Obstacle("O3", half(5, 3)),
        Obstacle("O4", half(7, 7)),
    ])


def spatial_model():
    return ObstacleModel((4, 4, 4), [
        Obstacle("O1", half(1, 1, 1)),
        Obstacle("O2", half(5, 3, 5)),
        Obstacle("O3", half(3, 5, 3)),
        Obstacle("O4", half(7, 7, 7)),
    ])


PLANAR_GRID = GridSpec((4, 4), frozenset({(0, 0), (1, 2), (2, 1), (3, 3)}))


def random_grid(rng: random.Random) -> GridSpec:
    """Small grid model: 2D with sides up to 4, or 3D with sides up to 3 and volume at most 12."""
    if rng.random() < 0.6:
        extents = tuple(rng.randint(1, 4) for _ in range(2))
    else:
        while True:
            extents = tuple(rng.randint(1, 3) for _ in range(3))
            if extents[0] * extents[1] * extents[2] <= 12:
                break
    cells = list(itertools.product(*(range(k) for k in extents)))
    k = rng.randint(0, min(5, len(cells) - 1))
    return GridSpec(extents, frozenset(rng.sample(cells, k)))


def random_grids(n: int, seed: int = 2024):
    rng = random.Random(seed)
    return [random_grid(rng) for _ in range(n)]


@pytest.fixture(scope="session")
def planar():
    return planar_model()


@pytest.fixture(scope="session")
def spatial():
    return spatial_model()


@pytest.fixture(scope="session")
def planar_grid():
    return build_grid(PLANAR_GRID)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when != "call" and outcome != "error":
                continue
            name = nodeid.split("::test_")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines, key=lambda x: int(x[0].split("_")[1])):
            terminalreporter.write_line(f"{status}  {name}")
