import math
from fractions import Fraction

import numpy as np
import pytest

from mgz.empirical import empirical, event_probability
from mgz.errors import ParameterOutOfRange, UnsupportedDepth
from mgz.generators import (
    B_MARK,
    R_MARK,
    Family,
    convergence_trace,
    degree_frequencies,
    generate,
    ladder_limit,
    lattice_index,
    limit_event_probability,
    pgw_monte_carlo,
    pgw_probability,
    tree_pattern,
)
from mgz.graph import build, residual_set
from mgz.rooted import RootedMarkedGraph, truncate

from conftest import MS11


def test_bipartite3_small_size():
    g = generate(Family("bipartite3"), 6)
    assert g.n == 12 and g.num_edges == 18


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_bipartite3_structure(n):
    g = generate(Family("bipartite3"), n)
    assert g.num_edges == 3 * n
    assert all(g.degree(v) == 3 for v in range(1, 2 * n + 1))
    assert g.tau == (R_MARK,) * n + (B_MARK,) * n
    assert all(i <= n < j for i, j in g.edges)


def test_cycle_triangle():
    g = generate(Family("cycle"), 3)
    assert sorted(g.edges) == [(1, 2), (1, 3), (2, 3)]


def test_lattice_shape():
    g = generate(Family("lattice"), 2)
    assert g.n == 25 and g.num_edges == 2 * 5 * 4
    assert g.degree(lattice_index(2, 0, 0)) == 4
    assert g.degree(lattice_index(2, -2, -2)) == 2 and lattice_index(2, -2, -2) == 1


def test_er_reproducible():
    f = Family("erdos_renyi", 2.0, 7)
    a, b = generate(f, 50), generate(f, 50)
    assert a == b and 0 <= a.num_edges <= 50 * 49 // 2
    assert generate(Family("erdos_renyi", 2.0, 8), 50) != a


def test_er_marginals():
    # 10^4 seeds at n = 20: every pair frequency within 3 sigma plus a Bonferroni margin
    n, alpha, seeds = 20, 2.0, 10_000
    tally = np.zeros((n + 1, n + 1))
    for s in range(seeds):
        for (i, j) in generate(Family("erdos_renyi", alpha, s), n).edges:
            tally[i, j] += 1
    p = alpha / n
    sigma = math.sqrt(seeds * p * (1 - p))
    freq = np.array([tally[i, j] for i in range(1, n + 1) for j in range(i + 1, n + 1)])
    assert abs(freq.sum() - seeds * p * len(freq)) <= 3 * sigma * math.sqrt(len(freq))
    assert np.all(np.abs(freq - seeds * p) <= 4.5 * sigma)


@pytest.mark.parametrize("kind, n", [("cycle", 2), ("bipartite3", 2), ("lattice", 0)])
def test_size_errors(kind, n):
    with pytest.raises(ParameterOutOfRange):
        generate(Family(kind), n)


def test_family_validation():
    with pytest.raises(ParameterOutOfRange):
        Family("erdos_renyi", 0.0, 1)
    with pytest.raises(ParameterOutOfRange):
        Family("erdos_renyi", 1.0)
    with pytest.raises(ParameterOutOfRange):
        Family("torus")
    with pytest.raises(ParameterOutOfRange):
        generate(Family("erdos_renyi", 5.0, 1), 3)


def _path3():
    return RootedMarkedGraph(build(MS11, 3, [0] * 3, [(1, 2, 0, 0), (1, 3, 0, 0)]), 1, 1)


def test_cycle_limit():
    assert limit_event_probability(Family("cycle"), _path3(), 1) == 1
    assert limit_event_probability(Family("cycle"), tree_pattern(3), 1) == 0
    rows = convergence_trace(Family("cycle"), _path3(), 1, range(5, 41))
    assert all(r.empirical == 1 == r.limit for r in rows)


def test_bipartite3_limit_values():
    lone_r = RootedMarkedGraph(build(Family("bipartite3").mark_sets, 1, [R_MARK], []), 1, 0)
    assert limit_event_probability(Family("bipartite3"), lone_r, 0) == Fraction(1, 2)
    g = generate(Family("bipartite3"), 30)
    for h in range(4):
        for v in (1, 31):
            t = truncate(g, v, h)
            assert limit_event_probability(Family("bipartite3"), t, h) == Fraction(1, 2)
    with pytest.raises(UnsupportedDepth):
        limit_event_probability(Family("bipartite3"), truncate(g, 1, 4), 4)


def test_ladder_matches_large_member():
    g = generate(Family("bipartite3"), 40)
    for h in range(4):
        for mark, v in ((R_MARK, 10), (B_MARK, 50)):
            lim = ladder_limit(h, mark)
            assert truncate(lim.graph, 1, h).graph.n == truncate(g, v, h).graph.n


def test_lattice_interior_fraction():
    t = truncate(generate(Family("lattice"), 3), lattice_index(3, 0, 0), 1)
    rows = convergence_trace(Family("lattice"), t, 1, range(2, 11))
    for r in rows:
        assert r.empirical == Fraction((2 * r.n - 1) ** 2, (2 * r.n + 1) ** 2)
        assert r.limit == 1


def test_pgw_depth_one():
    f = Family("erdos_renyi", 1.0, 0)
    assert limit_event_probability(f, tree_pattern(0), 1) == pytest.approx(math.exp(-1))
    assert limit_event_probability(f, tree_pattern(2), 1) == pytest.approx(math.exp(-1) / 2)
    with pytest.raises(UnsupportedDepth):
        limit_event_probability(f, tree_pattern(1, [1]), 3)
    tri = RootedMarkedGraph(build(MS11, 3, [0] * 3, [(1, 2, 0, 0), (1, 3, 0, 0), (2, 3, 0, 0)]), 1, 1)
    assert pgw_probability(1.0, tri, 1) == 0


def test_pgw_depth_two_sums_to_one():
    alpha = 0.7
    total = 0.0
    # root degree up to 8, each child with up to 8 offspring, via multisets
    import itertools
    for d in range(9):
        for kids in itertools.combinations_with_replacement(range(9), d):
            total += pgw_probability(alpha, tree_pattern(d, kids), 2)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_pgw_monte_carlo_agreement():
    classes = [(1, [1]), (2, [0, 1]), (3, [0, 0, 2])]
    samples = 10**6
    freq = pgw_monte_carlo(1.0, classes, samples, seed=12)
    for (d, kids), f in zip(classes, freq):
        p = pgw_probability(1.0, tree_pattern(d, kids), 2)
        sigma = math.sqrt(p * (1 - p) / samples)
        assert abs(f - p) <= 4 * sigma


def test_residual_fraction():
    for kind, n, dmax in [("cycle", 12, 2), ("lattice", 3, 4), ("bipartite3", 8, 3)]:
        g = generate(Family(kind), n)
        assert residual_set(g, dmax) == []
    g = generate(Family("erdos_renyi", 2.0, 3), 300)
    sizes = [len(residual_set(g, d)) for d in range(1, 8)]
    assert sizes == sorted(sizes, reverse=True)


def test_er_degree_frequencies():
    g = generate(Family("erdos_renyi", 1.0, 2024), 2000)
    freq = degree_frequencies(g)
    for d in range(4):
        p = math.exp(-1) / math.factorial(d)
        sigma = math.sqrt(p * (1 - p) / 2000)
        assert abs(float(freq.get(d, 0)) - p) <= 4 * sigma
    t = tree_pattern(2)
    assert event_probability(empirical(g, 1), t, 1) <= freq[2]
