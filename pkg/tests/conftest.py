import sys
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from mgz.graph import MarkSets, MarkedGraph, build

FIXTURES = Path(__file__).parent / "fixtures"

B, R = 0, 1
BLUE, ORANGE = 0, 1
MS21 = MarkSets.of_sizes(2, 1)
MS22 = MarkSets.of_sizes(2, 2)
MS11 = MarkSets.of_sizes(1, 1)


def eight_vertex_graph():
    """8 vertices, two vertex marks, two edge marks; columns i j mark_toward_j mark_toward_i."""
    tau = [B, B, B, R, R, B, B, B]
    edges = [
        (1, 2, ORANGE, BLUE), (1, 3, ORANGE, BLUE),
        (2, 4, BLUE, BLUE), (3, 4, BLUE, BLUE),
        (4, 5, ORANGE, ORANGE),
        (5, 6, BLUE, BLUE), (5, 7, BLUE, BLUE),
        (6, 8, BLUE, ORANGE), (7, 8, BLUE, ORANGE),
    ]
    return build(MS22, 8, tau, edges)


def marked_square_graph():
    tau = [B, R, R, B]
    edges = [(1, 2, BLUE, ORANGE), (1, 3, BLUE, BLUE), (2, 4, BLUE, BLUE), (3, 4, ORANGE, BLUE)]
    return build(MS22, 4, tau, edges)


def four_cycle_graph():
    """Four-cycle 1-2-4-3-1, marks B R R B, one edge mark."""
    return build(MS21, 4, [B, R, R, B], [(1, 2, 0, 0), (2, 4, 0, 0), (4, 3, 0, 0), (3, 1, 0, 0)])


def random_graph(rng: random.Random, n: int, ms: MarkSets, p: float | None = None, max_degree=None):
    p = rng.random() if p is None else p
    tau = [rng.randrange(ms.nv) for _ in range(n)]
    deg = [0] * (n + 1)
    edges = {}
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    rng.shuffle(pairs)
    for i, j in pairs:
        if rng.random() < p:
            if max_degree is not None and (deg[i] >= max_degree or deg[j] >= max_degree):
                continue
            edges[(i, j)] = (rng.randrange(ms.ne), rng.randrange(ms.ne))
            deg[i] += 1
            deg[j] += 1
    return MarkedGraph(ms, n, tau, edges)


def random_permutation(rng: random.Random, n: int):
    p = list(range(1, n + 1))
    rng.shuffle(p)
    return p


@st.composite
def graphs(draw, max_n=6, nv=2, ne=2, min_n=1):
    n = draw(st.integers(min_n, max_n))
    ms = MarkSets.of_sizes(nv, ne)
    tau = draw(st.lists(st.integers(0, nv - 1), min_size=n, max_size=n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    present = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = {}
    for (i, j), keep in zip(pairs, present):
        if keep:
            edges[(i, j)] = (draw(st.integers(0, ne - 1)), draw(st.integers(0, ne - 1)))
    return MarkedGraph(ms, n, tau, edges)


@pytest.fixture
def eight_vertex():
    return eight_vertex_graph()


@pytest.fixture
def four_cycle():
    return four_cycle_graph()


@pytest.fixture
def marked_square():
    return marked_square_graph()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
