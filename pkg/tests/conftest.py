import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cyclebench import Graph  # noqa: E402

# vertices v1..v7 -> 0..6; edge ids follow the cycle-matrix columns
TOY_EDGES = [
    (0, 1),  # e12 = 0
    (1, 2),  # e23 = 1
    (2, 3),  # e34 = 2
    (3, 4),  # e45 = 3
    (4, 5),  # e56 = 4
    (5, 6),  # e67 = 5
    (1, 4),  # e25 = 6
    (0, 5),  # e16 = 7
]
TOY_C1 = (0, 4, 6, 7)  # e12, e56, e25, e16
TOY_C2 = (1, 2, 3, 6)  # e23, e34, e45, e25

# degree-two chains around a square, vertices v1..v8 -> 0..7
CHAIN_EDGES = [
    (0, 1),  # e12
    (1, 2),  # e23
    (2, 3),  # e34
    (3, 4),  # e45
    (4, 5),  # e56
    (5, 2),  # e63
    (2, 6),  # e37
    (6, 7),  # e78
    (7, 1),  # e82
]


@pytest.fixture
def toy():
    return Graph(7, TOY_EDGES)


@pytest.fixture
def chain():
    return Graph(8, CHAIN_EDGES)


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (1, 2), (2, 0)])


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "verdict":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
