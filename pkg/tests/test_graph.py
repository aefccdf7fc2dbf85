import random

import pytest
from hypothesis import given, settings

from mgz.errors import DuplicateEdge, FormatError, NotAPermutation, SelfLoop, UnknownMark, VertexOutOfRange
from mgz.graph import (
    MarkSets,
    apply_permutation,
    are_isomorphic,
    build,
    counts,
    degree,
    directed_degree,
    forget_marks,
    format_graph_text,
    parse_graph_text,
    residual_set,
    trim,
)

from conftest import B, BLUE, MS11, MS21, MS22, ORANGE, R, marked_square_graph, graphs, random_permutation


def test_eight_vertex_builds(eight_vertex):
    assert eight_vertex.n == 8 and eight_vertex.num_edges == 9
    assert eight_vertex.edge_mark(1, 2) == ORANGE and eight_vertex.edge_mark(2, 1) == BLUE


def test_single_vertex():
    g = build(MS21, 1, [R], [])
    assert g.n == 1 and g.num_edges == 0


@pytest.mark.parametrize("edges, err", [
    ([(1, 1, 0, 0)], SelfLoop),
    ([(1, 2, 0, 0), (2, 1, 0, 0)], DuplicateEdge),
    ([(1, 5, 0, 0)], VertexOutOfRange),
    ([(1, 2, 0, 7)], UnknownMark),
])
def test_build_rejects(edges, err):
    with pytest.raises(err):
        build(MS21, 3, [0, 0, 0], edges)


def test_symbolic_marks():
    ms = MarkSets(("B", "R"), ("Blue", "Orange"))
    g = build(ms, 2, ["B", "R"], [(1, 2, "Orange", "Blue")])
    assert g.tau == (0, 1) and g.edge_mark(1, 2) == 1 and g.edge_mark(2, 1) == 0


def test_eight_vertex_counts(eight_vertex):
    m, u = counts(eight_vertex)
    # Blue-Blue edges: 2-4, 3-4, 5-6, 5-7; mixed: 1-2, 1-3, 6-8, 7-8; Orange-Orange: 4-5
    assert m[(BLUE, BLUE)] == 4
    assert m[(BLUE, ORANGE)] == m[(ORANGE, BLUE)] == 4
    assert m[(ORANGE, ORANGE)] == 1
    assert u[B] == 6 and u[R] == 2


def test_empty_graph_counts():
    g = build(MS11, 5, [0] * 5, [])
    m, u = counts(g)
    assert m.norm1 == 0 and u[0] == 5


def test_four_cycle_counts(four_cycle):
    m, u = counts(four_cycle)
    assert m.norm1 == 4 and u[B] == 2 and u[R] == 2


def test_degrees(eight_vertex):
    assert degree(eight_vertex, 4) == 3
    iso = build(MS22, 2, [0, 0], [])
    assert all(directed_degree(iso, 1, x, y) == 0 for x in range(2) for y in range(2))


def test_marked_square_permutations(marked_square):
    pi2 = {1: 4, 4: 1, 2: 3, 3: 2}
    assert apply_permutation(marked_square, pi2) == marked_square
    assert apply_permutation(marked_square, [1, 2, 3, 4]) == marked_square
    relabelled = apply_permutation(marked_square, {1: 1, 2: 2, 3: 4, 4: 3})
    assert relabelled != marked_square
    # vertex 4 of the original carries mark B, so it lands on 3
    assert relabelled.tau == (B, R, B, R)
    assert sorted(relabelled.edges) == [(1, 2), (1, 4), (2, 3), (3, 4)]
    assert relabelled.edge_mark(4, 3) == ORANGE and relabelled.edge_mark(3, 4) == BLUE


def test_not_a_permutation(four_cycle):
    with pytest.raises(NotAPermutation):
        apply_permutation(four_cycle, [1, 1, 2, 3])


def test_eight_vertex_trim(eight_vertex):
    t = trim(eight_vertex, 2)
    assert sorted(t.edges) == [(1, 2), (1, 3), (6, 8), (7, 8)]
    assert t.tau == eight_vertex.tau
    assert residual_set(eight_vertex, 2) == [2, 3, 4, 5, 6, 7]


def test_trim_extremes(eight_vertex):
    assert trim(eight_vertex, eight_vertex.max_degree()) == eight_vertex
    assert residual_set(eight_vertex, eight_vertex.max_degree()) == []
    assert trim(eight_vertex, 0).num_edges == 0


def test_star_residual():
    g = build(MS11, 6, [0] * 6, [(1, j, 0, 0) for j in range(2, 7)])
    assert residual_set(g, 2) == [1, 2, 3, 4, 5, 6]
    assert trim(g, 2).num_edges == 0


def test_forget_marks(eight_vertex):
    f = forget_marks(eight_vertex)
    assert f.n == 8 and set(f.edges) == set(eight_vertex.edges)
    assert forget_marks(f) == f


def test_isomorphism_examples(marked_square):
    swapped = apply_permutation(marked_square, {1: 4, 4: 1, 2: 3, 3: 2})
    assert are_isomorphic(marked_square, swapped)
    c4 = build(MS11, 4, [0] * 4, [(1, 2, 0, 0), (2, 3, 0, 0), (3, 4, 0, 0), (4, 1, 0, 0)])
    p4 = build(MS11, 4, [0] * 4, [(1, 2, 0, 0), (2, 3, 0, 0), (3, 4, 0, 0)])
    assert not are_isomorphic(c4, p4)


def test_text_round_trip(eight_vertex):
    assert parse_graph_text(format_graph_text(eight_vertex)) == eight_vertex


@pytest.mark.parametrize("text", ["", "3 1\n", "2 1 1\n0 0\n1 2 0\n", "2 1 1\n0 0\n1 2 0 3\n"])
def test_text_errors(text):
    with pytest.raises((FormatError, UnknownMark)):
        parse_graph_text(text)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6))
def test_permutation_invariants(g):
    rng = random.Random(g.n * 7919 + g.num_edges)
    pi = random_permutation(rng, g.n)
    h = apply_permutation(g, pi)
    assert counts(h) == counts(g)
    assert are_isomorphic(g, h)
    m, u = counts(g)
    assert u.total == g.n and m.norm1 == g.num_edges


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7, nv=1, ne=2))
def test_trim_properties(g):
    for delta in range(0, 4):
        t = trim(g, delta)
        assert trim(t, delta) == t
        r = set(residual_set(g, delta))
        for (i, j) in g.edges:
            assert (i, j) in t.edges or (i in r and j in r)
        assert t.max_degree() <= delta or t.num_edges == 0


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6))
def test_directed_degree_partition(g):
    ne = g.mark_sets.ne
    for v in range(1, g.n + 1):
        assert sum(directed_degree(g, v, x, y) for x in range(ne) for y in range(ne)) == degree(g, v)


def test_isomorphism_equivalence():
    rng = random.Random(5)
    sample = []
    base = build(MS21, 5, [0, 1, 0, 1, 0], [(1, 2, 0, 0), (2, 3, 0, 0), (3, 4, 0, 0)])
    for _ in range(6):
        sample.append(apply_permutation(base, random_permutation(rng, 5)))
    sample.append(build(MS21, 5, [0, 1, 0, 1, 0], [(1, 2, 0, 0), (2, 3, 0, 0)]))
    for a in sample:
        assert are_isomorphic(a, a)
        for b in sample:
            assert are_isomorphic(a, b) == are_isomorphic(b, a)
            for c in sample:
                if are_isomorphic(a, b) and are_isomorphic(b, c):
                    assert are_isomorphic(a, c)
