import itertools
import math
import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from mgz.codec import CodecConfig, compress
from mgz.empirical import dirac, empirical
from mgz.entropy import (
    NEG_INF,
    H,
    S,
    ball_count,
    bc_estimate,
    degree_vector,
    exact_count,
    graphs_with_counts,
    is_prefix_free,
    kraft_audit,
    rate_chain,
    rate_report,
    residue,
    s,
    simple_graph_bound_holds,
    stirling_rhs,
)
from mgz.errors import BudgetExceeded, NegativeInput
from mgz.graph import MarkedGraph, apply_permutation, build, counts
from mgz.rooted import class_code

from conftest import B, MS11, MS21, MS22, R, random_graph


def test_s_values():
    assert s(0) == 0
    assert s(1) == 0.5
    assert s(Fraction(1, 2)) == pytest.approx(0.25 - 0.25 * math.log(0.5))
    with pytest.raises(NegativeInput):
        s(-1)


@given(st.floats(0, 50))
def test_s_maximum_at_one(d):
    assert s(d) <= 0.5 + 1e-12


def test_entropy_values():
    assert H([Fraction(1, 2), Fraction(1, 2)]) == pytest.approx(math.log(2))
    assert H([1]) == 0
    assert S({(0, 0): 1, (0, 1): 0}) == 0.5
    with pytest.raises(NegativeInput):
        H([Fraction(3, 2), Fraction(-1, 2)])


def test_exact_count_examples():
    assert exact_count(3, 2, (3,)) == 3
    assert exact_count(4, 3, (2, 2)) == 6 * comb(6, 3) == 120
    assert exact_count(2, {(0, 1): 1}, (2,)) == 2
    assert exact_count(3, 4, (3,)) == 0
    assert exact_count(3, 1, (2,)) == 0
    with pytest.raises(NegativeInput):
        exact_count(3, -1, (3,))


def _tally(n, ms):
    # independent oracle: walk raw serializations, never building graphs
    table = {}
    ne = ms.ne
    for tau in itertools.product(range(ms.nv), repeat=n):
        u = tuple(tau.count(t) for t in range(ms.nv))
        for cells in itertools.product(range(1 + ne * ne), repeat=n * (n - 1) // 2):
            m = {}
            for c in cells:
                if c:
                    a, b = divmod(c - 1, ne)
                    key = (min(a, b), max(a, b))
                    m[key] = m.get(key, 0) + 1
            k = (u, tuple(sorted(m.items())))
            table[k] = table.get(k, 0) + 1
    return table


@pytest.mark.parametrize("n, ms", [(1, MS22), (2, MS22), (3, MS22), (3, MS21), (4, MS11), (4, MS21)])
def test_exact_count_matches_tally(n, ms):
    for (u, m), c in _tally(n, ms).items():
        assert exact_count(n, dict(m), u) == c


def test_graphs_with_counts_lists_every_graph():
    for n, m, u, ms in [(4, 3, (2, 2), MS21), (3, {(0, 1): 2}, (3,), MS22.__class__.of_sizes(1, 2))]:
        listed = list(graphs_with_counts(n, m, u, ms))
        assert len(listed) == len(set(listed)) == exact_count(n, m, u)
        for g in listed:
            mm, uu = counts(g)
            assert uu.values == tuple(u)


def test_residue_at_zero_edges():
    for n, u in [(4, (2, 2)), (6, (1, 2, 3)), (8, (8,))]:
        q = [Fraction(c, n) for c in u]
        expected = math.log(factorial(n) / math.prod(factorial(c) for c in u)) - n * H(q)
        assert residue(n, 0, u) == pytest.approx(expected)
        assert stirling_rhs(n, 0, u) == pytest.approx(n * H(q))


def test_degree_vector_convention():
    d = degree_vector(4, {(0, 0): 2, (0, 1): 1}, 2)
    assert d[(0, 0)] == 1 and d[(0, 1)] == d[(1, 0)] == Fraction(1, 4) and d[(1, 1)] == 0


@pytest.mark.parametrize("n", [2, 5, 9, 17, 30])
def test_simple_graph_bound_small(n):
    assert all(simple_graph_bound_holds(n, m) for m in range(comb(n, 2) + 1))


def _four_cycle_counts():
    return 4, 4, (2, 2)


def test_ball_full_and_monotone(four_cycle):
    n, m, u = _four_cycle_counts()
    mu = empirical(four_cycle)
    total = exact_count(n, m, u)
    assert ball_count(n, m, u, mu, 2).count == total
    sizes = [ball_count(n, m, u, mu, Fraction(e, 10)).count for e in range(1, 12)]
    assert sizes == sorted(sizes)
    assert sizes[-1] == total


def test_ball_contains_type_class(four_cycle):
    # all six alternating four-cycles sit within 1/2 of the neighbourhood law
    n, m, u = _four_cycle_counts()
    mu = empirical(four_cycle)
    inside = [g for g in graphs_with_counts(n, m, u, MS21) if _alternating_cycle(g)]
    assert len(inside) == 6
    assert ball_count(n, m, u, mu, Fraction(1, 2) + Fraction(1, 1000)).count >= 6


def _alternating_cycle(g):
    return all(g.degree(v) == 2 for v in range(1, g.n + 1)) and all(
        g.tau[i - 1] != g.tau[j - 1] for i, j in g.edges)


def test_small_ball_is_law_class():
    rng = random.Random(2)
    for _ in range(5):
        g = random_graph(rng, 4, MS21, p=0.5)
        mm, uu = counts(g)
        mu = empirical(g, 3)
        same = sum(1 for h in graphs_with_counts(4, mm, uu, MS21) if empirical(h, 3) == mu)
        assert ball_count(4, mm, uu, mu, Fraction(1, 10**6)).count == same
        assert same >= 1


def test_ball_budget(four_cycle):
    with pytest.raises(BudgetExceeded):
        ball_count(4, 4, (2, 2), empirical(four_cycle), Fraction(1, 2), budget=10)


def test_bc_estimate(four_cycle):
    n, m, u = _four_cycle_counts()
    full = bc_estimate(n, m, u, empirical(four_cycle), 2)
    assert full.value == pytest.approx((math.log(exact_count(n, m, u)) - m * math.log(n)) / n)
    assert full.cap == pytest.approx(S(degree_vector(n, m)) + math.log(2))
    lone_r = build(MS21, 1, [R], [])
    far = dirac(class_code(lone_r, 1, 3), 3, MS21)
    empty = bc_estimate(n, m, u, far, Fraction(1, 2))
    assert empty.value is NEG_INF
    assert "value=-inf" in empty.to_text()


def test_kraft_examples(four_cycle):
    blob = compress(four_cycle, CodecConfig(MS21, 1, 2))
    assert kraft_audit([blob]) == Fraction(1, 2 ** blob.bit_length)
    assert is_prefix_free([b"ab", b"ac", b"b"])
    assert not is_prefix_free([b"ab", b"abc"])


def test_rate_report_fields(eight_vertex):
    blob = compress(eight_vertex, CodecConfig(MS22, 1, 2))
    rep = rate_report(eight_vertex, blob)
    m, u = counts(eight_vertex)
    assert rep.m_norm == 9 and rep.nats_used == pytest.approx(blob.bit_length * math.log(2))
    assert rep.rate == pytest.approx((rep.nats_used - 9 * math.log(8)) / 8)
    d = degree_vector(8, m, 2)
    assert rep.upper_bound == pytest.approx(S(d) + H([Fraction(6, 8), Fraction(2, 8)]))


def test_rate_chain_exhaustive():
    cfg = CodecConfig(MS21)
    for n in range(1, 6):
        slots = n * (n - 1) // 2
        for tau in itertools.product(range(2), repeat=n):
            for cells in itertools.product(range(2), repeat=slots):
                pairs = [p for p, c in zip(itertools.combinations(range(1, n + 1), 2), cells) if c]
                g = MarkedGraph(MS21, n, tau, {p: (0, 0) for p in pairs})
                chain = rate_chain(g, compress(g, cfg), cfg)
                assert chain.holds, (n, tau, pairs)
