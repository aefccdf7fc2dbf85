"""Counting and entropy quantities for marked graphs with prescribed mark counts.

All logarithms are natural; stream lengths are converted with ``bits * ln 2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .bits import width
from .codec import CodecConfig, CompressedBlob, breakdown, mark_pairs
from .empirical import Distribution, empirical, lp_distance_oracle, truncate_distribution
from .errors import BudgetExceeded, NegativeInput
from .graph import EdgeMarkCounts, MarkSets, MarkedGraph, VertexMarkCounts, counts, residual_set, trim
from .rooted import enumerate_classes

LN2 = math.log(2)
DEFAULT_BALL_BUDGET = 200_000
DEFAULT_BALL_DEPTH = 3

# rational brackets around e, used to decide real inequalities with integers only
_E_LOW = Fraction(2718281828, 10**9)
_E_HIGH = Fraction(2718281829, 10**9)


class _NegInf:
    """Tagged stand-in for log(0); prints as ``-inf`` but is not a float."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NEG_INF"

    def __str__(self):
        return "-inf"

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self


NEG_INF = _NegInf()


def _nonneg(x, what="value"):
    if x < 0:
        raise NegativeInput(f"{what} must be non-negative, got {x}")


def s(d) -> float:
    """d/2 - (d/2) ln d, continuous at 0."""
    _nonneg(d, "average degree")
    if d == 0:
        return 0.0
    d = float(d)
    return d / 2 - (d / 2) * math.log(d)


def S(dvec: dict) -> float:
    """Sum of ``s`` over every ordered mark pair present in ``dvec``."""
    return sum(s(v) for v in dvec.values())


def H(q) -> float:
    """Shannon entropy in nats."""
    q = list(q.values()) if isinstance(q, dict) else list(q)
    for p in q:
        _nonneg(p, "probability")
    if abs(float(sum(q)) - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    return -sum(float(p) * math.log(p) for p in q if p > 0)


def _edge_counts(m, ne=None) -> dict:
    if isinstance(m, EdgeMarkCounts):
        m = m.values
    if isinstance(m, int):
        m = {(0, 0): m}
    out = {}
    for (x, y), c in m.items():
        _nonneg(c, "edge count")
        key = (min(x, y), max(x, y))
        out[key] = out.get(key, 0) + c
    return out


def _vertex_counts(u) -> tuple:
    if isinstance(u, VertexMarkCounts):
        u = u.values
    if isinstance(u, int):
        u = (u,)
    u = tuple(u)
    for c in u:
        _nonneg(c, "vertex count")
    return u


def exact_count(n: int, m, u) -> int:
    """Number of marked graphs on vertices 1..n with edge-mark counts ``m`` and vertex-mark counts ``u``.

    ``m`` maps unordered pairs ``(x, x')`` to counts (an int means one edge
    mark); ``u`` lists the vertex-mark counts. Infeasible inputs give 0.
    """
    _nonneg(n, "n")
    m = _edge_counts(m)
    u = _vertex_counts(u)
    total = sum(m.values())
    slots = comb(n, 2)
    if sum(u) != n or total > slots:
        return 0
    vert = factorial(n)
    for c in u:
        vert //= factorial(c)
    edges = comb(slots, total) * factorial(total)
    for c in m.values():
        edges //= factorial(c)
    orient = 1 << sum(c for (x, y), c in m.items() if x != y)
    return vert * edges * orient


def degree_vector(n: int, m, ne: int | None = None) -> dict:
    """Empirical average-degree vector over ordered pairs: 2m(x,x)/n on the diagonal, m(x,x')/n off it."""
    m = _edge_counts(m)
    if ne is None:
        ne = 1 + max((y for _, y in m), default=0)
    d = {}
    for x in range(ne):
        for y in range(ne):
            c = m.get((min(x, y), max(x, y)), 0)
            d[(x, y)] = Fraction(2 * c if x == y else c, n)
    return d


def _q(n: int, u) -> list:
    return [Fraction(c, n) for c in _vertex_counts(u)]


def stirling_rhs(n: int, m, u) -> float:
    """||m||_1 ln n + n H(Q) + n S(d) for the empirical Q and d of the given counts."""
    total = sum(_edge_counts(m).values())
    return total * math.log(n) + n * H(_q(n, u)) + n * S(degree_vector(n, m))


def residue(n: int, m, u) -> float:
    """ln exact_count - stirling_rhs (the sub-linear remainder)."""
    c = exact_count(n, m, u)
    if c == 0:
        raise ValueError("no graphs with these counts")
    return math.log(c) - stirling_rhs(n, m, u)


def simple_graph_bound_holds(n: int, m: int) -> bool:
    """Decide ln C(C(n,2), m) <= m ln n + n s(2m/n) exactly.

    The right side equals m + m ln(n^2 / 2m), so the claim is
    C(C(n,2), m) (2m)^m <= e^m n^(2m), settled with rational brackets on e.
    """
    _nonneg(m, "m")
    lhs = comb(comb(n, 2), m)
    if m == 0:
        return lhs <= 1
    left = lhs * (2 * m) ** m
    if left * _E_LOW.denominator ** m <= _E_LOW.numerator ** m * n ** (2 * m):
        return True
    if left * _E_HIGH.denominator ** m > _E_HIGH.numerator ** m * n ** (2 * m):
        return False
    # brackets too coarse; fall back to floating point
    return math.log(lhs) <= m * math.log(n) + n * s(Fraction(2 * m, n)) + 1e-9


# -- enumeration of graphs with fixed counts ----------------------------------

def _distinct_arrangements(u: tuple):
    """All sequences over range(len(u)) using value t exactly u[t] times, in lexicographic order."""
    n = sum(u)
    left = list(u)
    seq = [0] * n

    def rec(i):
        if i == n:
            yield tuple(seq)
            return
        for t in range(len(left)):
            if left[t]:
                left[t] -= 1
                seq[i] = t
                yield from rec(i + 1)
                left[t] += 1

    yield from rec(0)


def graphs_with_counts(n: int, m, u, mark_sets: MarkSets):
    """Yield every graph on 1..n whose mark counts are exactly ``m`` and ``u``."""
    m = _edge_counts(m)
    u = _vertex_counts(u)
    if len(u) != mark_sets.nv:
        raise ValueError("vertex count vector length differs from the vertex alphabet")
    if exact_count(n, m, u) == 0:
        return
    slots = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    # one directed mark pair per edge: (toward larger endpoint, toward smaller)
    labels = []
    for (x, y), c in sorted(m.items()):
        for _ in range(c):
            labels.append((x, y))
    total = len(labels)
    label_orders = list(_distinct_label_orders(labels))
    for tau in _distinct_arrangements(u):
        for chosen in itertools.combinations(slots, total):
            for order in label_orders:
                yield _assemble(mark_sets, n, tau, chosen, order)


def _distinct_label_orders(labels):
    kinds = sorted(set(labels))
    mult = tuple(labels.count(k) for k in kinds)
    for seq in _distinct_arrangements(mult):
        pairs = [kinds[i] for i in seq]
        mixed = [i for i, (x, y) in enumerate(pairs) if x != y]
        for flips in itertools.product((False, True), repeat=len(mixed)):
            out = list(pairs)
            for i, f in zip(mixed, flips):
                if f:
                    out[i] = (out[i][1], out[i][0])
            yield out


def _assemble(mark_sets, n, tau, chosen, order):
    return MarkedGraph(mark_sets, n, list(tau), {e: lab for e, lab in zip(chosen, order)})


@dataclass(frozen=True)
class BallCount:
    count: int
    total: int
    depth: int


def ball_count(n: int, m, u, mu: Distribution, eps, depth: int = DEFAULT_BALL_DEPTH,
               budget: int = DEFAULT_BALL_BUDGET) -> BallCount:
    """Graphs with counts (m, u) whose neighbourhood law is within ``eps`` of ``mu``.

    Distances are taken between depth-``depth`` truncations, which can only
    under-estimate the untruncated distance, so the reported count is an upper
    bound on the true ball size. The depth actually used is returned.
    """
    total = exact_count(n, m, u)
    eps = Fraction(eps)
    work = depth if mu.depth is None else min(depth, mu.depth)
    if eps > 1:
        return BallCount(total, total, work)
    if total > budget:
        raise BudgetExceeded(f"{total} graphs exceed the ball budget {budget}")
    target = truncate_distribution(mu, work)
    seen = {}
    hits = 0
    for g in graphs_with_counts(n, m, u, mu.mark_sets):
        law = empirical(g, work)
        key = tuple(sorted(law.atoms.items()))
        if key not in seen:
            seen[key] = lp_distance_oracle(law, target) < eps
        hits += seen[key]
    return BallCount(hits, total, work)


@dataclass(frozen=True)
class BCEstimate:
    value: object
    cap: float
    depth: int

    def to_text(self) -> str:
        return f"value={self.value} cap={self.cap:.6f} depth={self.depth}"


def bc_estimate(n: int, m, u, mu: Distribution, eps, depth: int = DEFAULT_BALL_DEPTH,
                budget: int = DEFAULT_BALL_BUDGET) -> BCEstimate:
    """(ln |ball| - ||m||_1 ln n) / n, or NEG_INF for an empty ball, with the s(d)+H(Q) cap."""
    ball = ball_count(n, m, u, mu, eps, depth, budget)
    norm = sum(_edge_counts(m).values())
    cap = S(degree_vector(n, m, mu.mark_sets.ne)) + H(_q(n, u))
    if ball.count == 0:
        return BCEstimate(NEG_INF, cap, ball.depth)
    return BCEstimate((math.log(ball.count) - norm * math.log(n)) / n, cap, ball.depth)


# -- codeword audits -------------------------------------------------------

def _as_bytes(b) -> bytes:
    return b.data if isinstance(b, CompressedBlob) else bytes(b)


def kraft_audit(blobs) -> Fraction:
    """Sum of 2^-length over the codewords, lengths in bits."""
    return sum((Fraction(1, 1 << (8 * len(_as_bytes(b)))) for b in blobs), Fraction(0))


def is_prefix_free(blobs) -> bool:
    words = sorted(_as_bytes(b) for b in blobs)
    return all(not words[i + 1].startswith(words[i]) for i in range(len(words) - 1))


@dataclass(frozen=True)
class RateReport:
    n: int
    nats_used: float
    m_norm: int
    rate: float
    upper_bound: float

    def to_text(self) -> str:
        return (f"n={self.n}\nnats_used={self.nats_used:.6f}\nm_norm={self.m_norm}\n"
                f"rate={self.rate:.6f}\nupper_bound={self.upper_bound:.6f}\n")


def rate_report(g: MarkedGraph, blob: CompressedBlob) -> RateReport:
    """Normalised description length of ``blob`` next to s(d)+H(Q) of ``g`` itself."""
    m, u = counts(g)
    nats = blob.bit_length * LN2
    rate = (nats - m.norm1 * math.log(g.n)) / g.n
    bound = S(degree_vector(g.n, m, g.mark_sets.ne)) + H(_q(g.n, u))
    return RateReport(g.n, nats, m.norm1, rate, bound)


@dataclass(frozen=True)
class RateChain:
    nats_used: float
    log_type_class: float
    overhead_bits: int

    @property
    def bound(self) -> float:
        return self.log_type_class + self.overhead_bits * LN2

    @property
    def holds(self) -> bool:
        return self.nats_used <= self.bound + 1e-9


def rate_chain(g: MarkedGraph, blob: CompressedBlob, cfg: CodecConfig) -> RateChain:
    """Compare the blob length with ln|type class of the trimmed graph| plus fixed-width overhead.

    The overhead is recomputed from ``g`` and the field widths: header bytes,
    type counts, one bit of rank rounding, residual fields, orientation bits
    and byte padding.
    """
    n = g.n
    k, delta = cfg.resolve(n)
    bd = breakdown(blob, cfg.mark_sets)
    classes = enumerate_classes(cfg.mark_sets, k, delta, cfg.class_budget)
    tg = trim(g, delta)
    r = len(residual_set(g, delta))
    full, _ = counts(g)
    kept, _ = counts(tg)
    residual = width(n) + width(comb(n, r))
    orient = 0
    for x, y in mark_pairs(cfg.mark_sets.ne):
        delta_xy = full[(x, y)] - kept[(x, y)]
        residual += width(n * n) + width(comb(comb(r, 2), delta_xy))
        if x != y:
            orient += delta_xy
    overhead = bd.header_bits + len(classes) * width(n) + 1 + residual + orient + 7
    return RateChain(blob.bit_length * LN2, math.log(bd.w_size), overhead)
