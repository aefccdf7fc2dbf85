"""Example graph families, their local limits and convergence traces.

Erdős–Rényi sampling is reproducible by construction: a Philox generator
keyed by the seed (counter starting at zero) produces one uniform double per
vertex pair, pairs visited in row-major order ``(1,2), (1,3), ..., (n-1,n)``,
and a pair becomes an edge when its draw is below ``alpha / n``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .empirical import empirical, event_probability
from .errors import ParameterOutOfRange, UnsupportedDepth
from .graph import MarkSets, MarkedGraph
from .rooted import RootedMarkedGraph, canonical_code, truncate

KINDS = ("cycle", "lattice", "erdos_renyi", "bipartite3")
PLAIN = MarkSets.of_sizes(1, 1)
TWO_SIDED = MarkSets.of_sizes(2, 1)
B_MARK, R_MARK = 0, 1
MAX_LIMIT_DEPTH = 3
MAX_PGW_DEPTH = 2


@dataclass(frozen=True)
class Family:
    kind: str
    alpha: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterOutOfRange(f"unknown family {self.kind!r}; expected one of {KINDS}")
        if self.kind == "erdos_renyi":
            if self.alpha is None or not self.alpha > 0:
                raise ParameterOutOfRange("erdos_renyi needs alpha > 0")
            if self.seed is None:
                raise ParameterOutOfRange("erdos_renyi needs an explicit seed")

    @property
    def mark_sets(self) -> MarkSets:
        return TWO_SIDED if self.kind == "bipartite3" else PLAIN


def generate(f: Family, n: int) -> MarkedGraph:
    """Member of family ``f`` with size parameter ``n``.

    ``lattice`` has side ``2n+1``; ``bipartite3`` has ``2n`` vertices.
    """
    if not isinstance(n, int) or n < 1:
        raise ParameterOutOfRange("size parameter must be a positive integer")
    return _BUILDERS[f.kind](f, n)


def _cycle(f, n):
    if n < 3:
        raise ParameterOutOfRange("a cycle needs at least 3 vertices")
    edges = {(i, i + 1): (0, 0) for i in range(1, n)}
    edges[(1, n)] = (0, 0)
    return MarkedGraph(PLAIN, n, [0] * n, edges)


def lattice_index(n: int, a: int, b: int) -> int:
    """Vertex number of lattice point ``(a, b)`` in the row-major order of {-n..n}^2."""
    return (a + n) * (2 * n + 1) + (b + n) + 1


def _lattice(f, n):
    side = 2 * n + 1
    edges = {}
    for a in range(-n, n + 1):
        for b in range(-n, n + 1):
            v = lattice_index(n, a, b)
            if b < n:
                edges[(v, v + 1)] = (0, 0)
            if a < n:
                edges[(v, v + side)] = (0, 0)
    return MarkedGraph(PLAIN, side * side, [0] * (side * side), edges)


def _erdos_renyi(f, n):
    if f.alpha > n:
        raise ParameterOutOfRange("alpha / n must not exceed 1")
    rng = np.random.Generator(np.random.Philox(key=int(f.seed)))
    pairs = n * (n - 1) // 2
    draws = rng.random(pairs)
    hits = np.flatnonzero(draws < f.alpha / n)
    # row-major pair index -> (i, j)
    rows = np.repeat(np.arange(1, n), np.arange(n - 1, 0, -1))
    starts = np.concatenate(([0], np.cumsum(np.arange(n - 1, 0, -1))[:-1]))
    edges = {}
    for h in hits.tolist():
        i = int(rows[h])
        j = i + 1 + h - int(starts[i - 1])
        edges[(i, j)] = (0, 0)
    return MarkedGraph(PLAIN, n, [0] * n, edges)


def _wrap(k: int, n: int) -> int:
    r = k % n
    return n if r == 0 else r


def _bipartite3(f, n):
    if n < 3:
        raise ParameterOutOfRange("bipartite3 needs n >= 3 for three distinct neighbours")
    edges = {}
    for i in range(1, n + 1):
        for step in range(3):
            edges[(i, n + _wrap(i + step, n))] = (0, 0)
    return MarkedGraph(TWO_SIDED, 2 * n, [R_MARK] * n + [B_MARK] * n, edges)


_BUILDERS = {
    "cycle": _cycle,
    "lattice": _lattice,
    "erdos_renyi": _erdos_renyi,
    "bipartite3": _bipartite3,
}


# -- limits ----------------------------------------------------------------

def _view_code(t: RootedMarkedGraph, h: int):
    return canonical_code(truncate(t.graph, t.root, h))


def _path(h: int) -> MarkedGraph:
    n = 2 * h + 1
    return MarkedGraph(PLAIN, n, [0] * n, {(i, i + 1): (0, 0) for i in range(1, n)})


def ladder_limit(h: int, root_mark: int) -> RootedMarkedGraph:
    """Depth-``h`` ball of the limit of ``bipartite3``, levels alternating in mark.

    Level 0 is the root, level 1 has three vertices and every deeper level
    four; the wiring between levels is fixed.
    """
    levels = [[1]]
    nxt = 2
    for m in range(1, h + 1):
        size = 3 if m == 1 else 4
        levels.append(list(range(nxt, nxt + size)))
        nxt += size
    edges = {}
    if h >= 1:
        for v in levels[1]:
            edges[(1, v)] = (0, 0)
    first = ((0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3))
    later = ((0, 0), (0, 1), (1, 1), (2, 2), (3, 2), (3, 3))
    for m in range(1, h):
        pattern = first if m == 1 else later
        for a, b in pattern:
            edges[(levels[m][a], levels[m + 1][b])] = (0, 0)
    other = B_MARK if root_mark == R_MARK else R_MARK
    tau = []
    for m, lev in enumerate(levels):
        tau.extend([root_mark if m % 2 == 0 else other] * len(lev))
    return RootedMarkedGraph(MarkedGraph(TWO_SIDED, nxt - 1, tau, edges), 1, h)


def _poisson(alpha: float, k: int) -> float:
    return math.exp(-alpha) * alpha ** k / math.factorial(k)


def _offspring_profile(t: RootedMarkedGraph, h: int):
    """(root degree, sorted child offspring counts) if the depth-h view is a tree, else None."""
    r = truncate(t.graph, t.root, h)
    g = r.graph
    if g.num_edges != g.n - 1 or any(x for x in g.tau) or any(a or b for a, b in g.edges.values()):
        return None
    children = sorted(g.adj[1])
    kids = sorted(g.degree(c) - 1 for c in children) if h >= 2 else None
    return len(children), kids


def pgw_probability(alpha: float, t: RootedMarkedGraph, h: int) -> float:
    """Probability that a Poisson(alpha) Galton-Watson tree has depth-h view ``t`` (h <= 2)."""
    if h > MAX_PGW_DEPTH:
        raise UnsupportedDepth(f"Galton-Watson probabilities are tabulated up to depth {MAX_PGW_DEPTH}")
    if t.graph.mark_sets.nv != 1 or t.graph.mark_sets.ne != 1:
        return 0.0
    prof = _offspring_profile(t, h)
    if prof is None:
        return 0.0
    d, kids = prof
    if h == 0:
        return 1.0
    p = _poisson(alpha, d)
    if h == 1:
        return p
    # ordered children collapse to a multiset
    arrangements = math.factorial(d)
    for c in Counter(kids).values():
        arrangements //= math.factorial(c)
    for c in kids:
        p *= _poisson(alpha, c)
    return p * arrangements


def limit_event_probability(f: Family, t: RootedMarkedGraph, h: int | None = None):
    """Mass that the local limit of family ``f`` puts on the depth-``h`` class of ``t``."""
    if h is None:
        h = t.depth if t.depth is not None else t.radius()
    if h < 0:
        raise ParameterOutOfRange("depth must be non-negative")
    if h > MAX_LIMIT_DEPTH:
        raise UnsupportedDepth(f"limits are tabulated up to depth {MAX_LIMIT_DEPTH}")
    if f.kind == "erdos_renyi":
        return pgw_probability(f.alpha, t, h)
    if t.graph.mark_sets != f.mark_sets:
        return Fraction(0)
    code = _view_code(t, h)
    if f.kind == "cycle":
        return Fraction(int(code == _view_code(RootedMarkedGraph(_path(h), h + 1, h), h)))
    if f.kind == "lattice":
        ball = generate(Family("lattice"), max(h, 1))
        centre = lattice_index(max(h, 1), 0, 0)
        return Fraction(int(code == canonical_code(truncate(ball, centre, h))))
    total = Fraction(0)
    for mark in (R_MARK, B_MARK):
        if code == _view_code(ladder_limit(h, mark), h):
            total += Fraction(1, 2)
    return total


@dataclass(frozen=True)
class TraceRow:
    n: int
    empirical: Fraction
    limit: object


def convergence_trace(f: Family, t: RootedMarkedGraph, h: int, n_list) -> list[TraceRow]:
    """Empirical event probability of ``t`` along the family, next to the limit value."""
    limit = limit_event_probability(f, t, h)
    rows = []
    for n in n_list:
        g = generate(f, n)
        rows.append(TraceRow(n, event_probability(empirical(g, h), t, h), limit))
    return rows


def degree_frequencies(g: MarkedGraph) -> dict:
    c = Counter(g.degree(v) for v in range(1, g.n + 1))
    return {d: Fraction(k, g.n) for d, k in sorted(c.items())}


def pgw_monte_carlo(alpha: float, classes, samples: int, seed: int) -> list[float]:
    """Monte Carlo frequencies of depth-2 Galton-Watson classes.

    Each class is ``(root_degree, child_offspring_counts)``; the counts are
    compared as multisets.
    """
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    deg = rng.poisson(alpha, samples)
    offspring = rng.poisson(alpha, int(deg.sum()))
    first = np.cumsum(deg) - deg
    out = []
    for d, kids in classes:
        idx = np.flatnonzero(deg == d)
        if d == 0:
            out.append(idx.size / samples)
            continue
        block = np.sort(offspring[first[idx][:, None] + np.arange(d)], axis=1)
        match = np.all(block == np.sort(np.asarray(kids)), axis=1)
        out.append(int(match.sum()) / samples)
    return out


def tree_pattern(root_degree: int, kids=()) -> RootedMarkedGraph:
    """Unmarked rooted tree: root with ``root_degree`` children, child ``i`` having ``kids[i]`` leaves."""
    kids = list(kids) + [0] * (root_degree - len(kids))
    edges = {}
    nxt = root_degree + 2
    for i in range(root_degree):
        edges[(1, i + 2)] = (0, 0)
        for _ in range(kids[i]):
            edges[(i + 2, nxt)] = (0, 0)
            nxt += 1
    depth = 2 if any(kids) else (1 if root_degree else 0)
    return RootedMarkedGraph(MarkedGraph(PLAIN, nxt - 1, [0] * (nxt - 1), edges), 1, depth)
