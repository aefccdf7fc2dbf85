"""Type-class coding: describe a degree-bounded graph by its neighbourhood
count vector plus its index among all graphs sharing that vector.

Members of a type class are ordered by their serialization (vertex marks, then
the upper-triangular adjacency symbols) and generated by a pruned depth-first
search, so encoder and decoder agree on ranks without storing the class.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .bits import BitReader, BitWriter, width
from .empirical import TypeVector, type_vector
from .errors import BudgetExceeded, DegreeBoundViolated, EmptyTypeClass, MalformedStream, RankOutOfRange
from .graph import MarkSets, MarkedGraph, from_serialization
from .rooted import DEFAULT_BUDGET, RootedMarkedGraph, _search_min, canonical_code, decode_code, enumerate_classes

DEFAULT_NODE_BUDGET = 50_000_000


@dataclass(frozen=True)
class FirstStepParams:
    k: int
    delta: int
    mark_sets: MarkSets
    n: int
    class_budget: int = DEFAULT_BUDGET
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.k < 0 or self.delta < 0 or self.n < 0:
            raise ValueError("k, delta and n must be non-negative")

    def classes(self) -> tuple:
        return enumerate_classes(self.mark_sets, self.k, self.delta, self.class_budget)


@dataclass(frozen=True)
class RankedType:
    psi: TypeVector
    rank: int
    w_size: int


@dataclass(frozen=True)
class _ClassInfo:
    root_mark: int
    degree: int
    star: tuple


@lru_cache(maxsize=64)
def _class_info(mark_sets, k, delta, budget):
    out = []
    for code in enumerate_classes(mark_sets, k, delta, budget):
        g = decode_code(code, mark_sets).graph
        star = tuple(sorted((g.adj[w][1], a, g.tau[w - 1]) for w, a in g.adj[1].items()))
        out.append(_ClassInfo(g.tau[0], len(g.adj[1]), star))
    return tuple(out)


class _Search:
    """Depth-first generator of a type class in serialization order."""

    def __init__(self, counts: tuple, params: FirstStepParams):
        self.p = params
        self.n = params.n
        self.k = params.k
        self.ne = params.mark_sets.ne
        self.classes = params.classes()
        if len(counts) != len(self.classes):
            raise MalformedStream("count vector length does not match the class list")
        self.counts = counts
        info = _class_info(params.mark_sets, params.k, params.delta, params.class_budget)
        self.index = {c: i for i, c in enumerate(self.classes)}
        nv = params.mark_sets.nv
        self.u = [0] * nv
        self.maxdeg = [-1] * nv
        self.mindeg = [params.delta + 1] * nv
        self.triples = [set() for _ in range(nv)]
        stars = Counter()
        for c, inf in zip(counts, info):
            if not c:
                continue
            t = inf.root_mark
            self.u[t] += c
            self.maxdeg[t] = max(self.maxdeg[t], inf.degree)
            self.mindeg[t] = min(self.mindeg[t], inf.degree)
            self.triples[t].update(inf.star)
            stars[(t, inf.star)] += c
        self.use_stars = params.k >= 1
        if not self.use_stars:
            self.maxdeg = [params.delta] * nv
            self.mindeg = [0] * nv
        self.stars = stars
        self.star_opts = [[] for _ in range(nv)]
        for key in stars:
            self.star_opts[key[0]].append((key, Counter(key[1]), len(key[1])))
        self.memo = {}
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.p.node_budget:
            raise BudgetExceeded(f"type-class search exceeded {self.p.node_budget} nodes")

    def __iter__(self):
        n = self.n
        if sum(self.counts) != n:
            return
        self.tau = [0] * (n + 1)
        yield from self._marks(1, list(self.u))

    def _marks(self, v, left):
        n = self.n
        if v > n:
            yield from self._edges_start()
            return
        for t in range(len(left)):
            if left[t]:
                self._tick()
                left[t] -= 1
                self.tau[v] = t
                yield from self._marks(v + 1, left)
                left[t] += 1

    def _setup_edges(self) -> bool:
        n = self.n
        self.adj = [dict() for _ in range(n + 1)]
        self.cap = [0] + [min(self.p.delta, self.maxdeg[self.tau[v]]) for v in range(1, n + 1)]
        if any(c < 0 for c in self.cap[1:]):
            return False
        self.cells = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        self.sym = [0] * len(self.cells)
        self.remaining = dict(self.stars)
        self.class_left = list(self.counts)
        self.closed = [False] * (n + 1)
        self.pstar = [Counter() for _ in range(n + 1)]
        return True

    def _edges_start(self):
        if not self._setup_edges():
            return
        if self.n == 1:
            if self._complete(1) is not None:
                yield self._serialization()
            return
        yield from self._cell(0)

    def _serialization(self):
        return tuple(self.tau[1:]) + tuple(self.sym)

    def _feasible(self, v, slots_left):
        """Can the partial star of ``v`` still grow into an unused star?"""
        if not self.use_stars:
            return True
        part = self.pstar[v]
        plen = len(self.adj[v])
        for key, cnt, size in self.star_opts[self.tau[v]]:
            if self.remaining[key] > 0 and plen <= size <= plen + slots_left and \
                    all(cnt[t] >= m for t, m in part.items()):
                return True
        return False

    def _options(self, pos):
        """Apply each admissible symbol for cell ``pos`` in increasing order, yielding it."""
        i, j = self.cells[pos]
        n, ne = self.n, self.ne
        adj, tau = self.adj, self.tau
        left_i = n - j
        left_j = (j - i - 1) + (n - j)
        self._tick()
        if self._feasible(i, left_i) and self._feasible(j, left_j):
            yield 0
        if len(adj[i]) >= self.cap[i] or len(adj[j]) >= self.cap[j]:
            return
        pi, pj = self.pstar[i], self.pstar[j]
        for a in range(ne):
            for b in range(ne):
                self._tick()
                ti, tj = (b, a, tau[j]), (a, b, tau[i])
                if self.use_stars and (ti not in self.triples[tau[i]] or tj not in self.triples[tau[j]]):
                    continue
                adj[i][j] = a
                adj[j][i] = b
                pi[ti] += 1
                pj[tj] += 1
                try:
                    if self._feasible(i, left_i) and self._feasible(j, left_j):
                        sym = 1 + a * ne + b
                        self.sym[pos] = sym
                        yield sym
                        self.sym[pos] = 0
                finally:
                    pi[ti] -= 1
                    pj[tj] -= 1
                    del adj[i][j]
                    del adj[j][i]

    def _complete_row(self, i):
        """Finalize vertex ``i`` (and ``n`` after the last row); undo tokens or None."""
        done = [i] if i < self.n - 1 else [i, self.n]
        tokens = []
        for v in done:
            res = self._complete(v)
            if res is None:
                self._undo_row(tokens)
                return None
            tokens.append(res)
        return tokens

    def _undo_row(self, tokens):
        for res in reversed(tokens):
            self._uncomplete(res)

    def _cell(self, pos):
        if pos == len(self.cells):
            yield self._serialization()
            return
        i, j = self.cells[pos]
        for _ in self._options(pos):
            if j < self.n:
                yield from self._cell(pos + 1)
                continue
            tokens = self._complete_row(i)
            if tokens is not None:
                try:
                    yield from self._cell(pos + 1)
                finally:
                    self._undo_row(tokens)

    # -- counting, ranking and unranking without listing the class --------

    def _count_next(self, pos, i, last_in_row):
        if not last_in_row:
            return self._count_from(pos + 1)
        tokens = self._complete_row(i)
        if tokens is None:
            return 0
        try:
            if pos + 1 == len(self.cells):
                return 1
            key = self._state_key(i)
            c = self.count_memo.get(key)
            if c is None:
                c = self._count_from(pos + 1)
                self.count_memo[key] = c
            return c
        finally:
            self._undo_row(tokens)

    def _count_from(self, pos):
        if pos == len(self.cells):
            return 1
        i, j = self.cells[pos]
        last = j == self.n
        return sum(self._count_next(pos, i, last) for _ in self._options(pos))

    def _rank_from(self, pos, target):
        if pos == len(self.cells):
            return 0
        i, j = self.cells[pos]
        last = j == self.n
        want = target[self.n + pos]
        acc = 0
        for s in self._options(pos):
            if s < want:
                acc += self._count_next(pos, i, last)
                continue
            if s > want:
                return None
            if not last:
                sub = self._rank_from(pos + 1, target)
            else:
                tokens = self._complete_row(i)
                if tokens is None:
                    return None
                try:
                    sub = self._rank_from(pos + 1, target)
                finally:
                    self._undo_row(tokens)
            return None if sub is None else acc + sub
        return None

    def _unrank_from(self, pos, r):
        if pos == len(self.cells):
            return self._serialization() if r == 0 else None
        i, j = self.cells[pos]
        last = j == self.n
        for _ in self._options(pos):
            c = self._count_next(pos, i, last)
            if r >= c:
                r -= c
                continue
            if not last:
                return self._unrank_from(pos + 1, r)
            tokens = self._complete_row(i)
            try:
                return self._unrank_from(pos + 1, r)
            finally:
                self._undo_row(tokens)
        return None

    def _mark_sequences(self):
        def rec(v, left):
            if v > self.n:
                yield
                return
            for t in range(len(left)):
                if left[t]:
                    left[t] -= 1
                    self.tau[v] = t
                    yield from rec(v + 1, left)
                    left[t] += 1
        self.tau = [0] * (self.n + 1)
        if sum(self.counts) != self.n:
            return iter(())
        return rec(1, list(self.u))

    def _edges_count(self):
        if not self._setup_edges():
            return 0
        if self.n == 1:
            return 1 if self._complete(1) is not None else 0
        return self._count_from(0)

    def count(self) -> int:
        self.count_memo = {}
        return sum(self._edges_count() for _ in self._mark_sequences())

    def rank(self, target: tuple):
        self.count_memo = getattr(self, "count_memo", {})
        n = self.n
        acc = 0
        for _ in self._mark_sequences():
            marks = tuple(self.tau[1:])
            if marks < target[:n]:
                acc += self._edges_count()
                continue
            if marks > target[:n] or not self._setup_edges():
                return None
            if n == 1:
                return acc if self._complete(1) is not None else None
            sub = self._rank_from(0, target)
            return None if sub is None else acc + sub
        return None

    def unrank(self, r: int):
        self.count_memo = getattr(self, "count_memo", {})
        for _ in self._mark_sequences():
            c = self._edges_count()
            if r >= c:
                r -= c
                continue
            self._setup_edges()
            if self.n == 1:
                self._complete(1)
                return self._serialization()
            return self._unrank_from(0, r)
        return None

    def _state_key(self, b):
        """Isomorphism-invariant summary of everything the unfinished rows depend on."""
        n, k = self.n, self.k
        adj, tau = self.adj, self.tau
        seeds = list(range(b + 1, n + 1)) + [w for w in range(1, b + 1) if not self.closed[w]]
        dist = {v: 0 for v in seeds}
        frontier = list(seeds)
        for d in range(k):
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = d + 1
                        nxt.append(w)
            frontier = nxt
        verts = list(range(b + 1, n + 1)) + sorted(w for w in dist if w <= b)
        idx = {v: i for i, v in enumerate(verts)}
        nbrs = [[(idx[w], a, adj[w][v]) for w, a in adj[v].items() if w in idx] for v in verts]
        marks = [2 * tau[v] + (0 if v > b or self.closed[v] else 1) for v in verts]
        # the unfinished rows cover every pair of future vertices, so their labels do not matter
        init = [(0 if v > b else 1, marks[i]) for i, v in enumerate(verts)]
        palette = {c: x for x, c in enumerate(sorted(set(init)))}
        ser = _search_min([palette[c] for c in init], marks, nbrs, self.ne)
        rem = tuple(sorted((key, c) for key, c in self.remaining.items() if c))
        return b, tuple(self.class_left), rem, ser

    def _complete(self, v):
        """Account for vertex ``v`` whose adjacency is now final; returns an undo token or None."""
        tau, adj = self.tau, self.adj
        key = None
        if self.use_stars:
            if len(adj[v]) < self.mindeg[tau[v]]:
                return None
            key = (tau[v], tuple(sorted((adj[w][v], a, tau[w]) for w, a in adj[v].items())))
            if self.remaining.get(key, 0) <= 0:
                return None
            self.remaining[key] -= 1
        closed_now = []
        for w in range(1, v + 1):
            if self.closed[w]:
                continue
            idx = self._ball_class(w, v)
            if idx is False:
                continue
            if idx is None or self.class_left[idx] <= 0:
                self._uncomplete((key, closed_now))
                return None
            self.class_left[idx] -= 1
            self.closed[w] = True
            closed_now.append((w, idx))
        return (key, closed_now)

    def _uncomplete(self, token):
        key, closed_now = token
        for w, idx in closed_now:
            self.closed[w] = False
            self.class_left[idx] += 1
        if key is not None:
            self.remaining[key] += 1

    def _ball_class(self, o, limit):
        """Class index of the depth-k ball of ``o``; False while the ball reaches past ``limit``."""
        k = self.k
        adj, tau = self.adj, self.tau
        dist = {o: 0}
        order = [o]
        for v in order:
            if v > limit:
                return False
            if dist[v] >= k:
                continue
            for w in sorted(adj[v]):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    order.append(w)
        local = {v: i for i, v in enumerate(order, start=1)}
        edges = []
        for v in order:
            lv = local[v]
            for w, a in adj[v].items():
                lw = local.get(w)
                if lw is not None and lv < lw:
                    edges.append((lv, lw, a, adj[w][v]))
        marks = tuple(tau[v] for v in order)
        edges.sort()
        key = (marks, tuple(edges))
        idx = self.memo.get(key, -1)
        if idx == -1:
            ball = MarkedGraph(self.p.mark_sets, len(order), marks,
                               {(p, q): (a, b) for p, q, a, b in edges})
            idx = self.index.get(canonical_code(RootedMarkedGraph(ball, 1)))
            self.memo[key] = idx
        return idx


def _counts_of(psi) -> tuple:
    return tuple(psi.counts) if isinstance(psi, TypeVector) else tuple(psi)


def enumerate_W(psi, params: FirstStepParams):
    """Graphs on ``1..n`` with degree at most delta whose type vector is ``psi``, in order."""
    for ser in _Search(_counts_of(psi), params):
        yield from_serialization(params.mark_sets, params.n, ser)


@lru_cache(maxsize=1 << 16)
def count_W(psi, params: FirstStepParams) -> int:
    """Size of the type class, counted without listing its members."""
    return _Search(_counts_of(psi), params).count()


def rank_in_W(g: MarkedGraph, params: FirstStepParams) -> RankedType:
    if params.n != g.n or params.mark_sets != g.mark_sets:
        raise ValueError("parameters do not describe this graph")
    if g.max_degree() > params.delta:
        raise DegreeBoundViolated(f"max degree {g.max_degree()} exceeds {params.delta}")
    psi = type_vector(g, params.k, params.delta, params.class_budget)
    rank = _Search(psi.counts, params).rank(g.serialization())
    if rank is None:
        raise EmptyTypeClass("graph not found in its own type class")
    return RankedType(psi, rank, count_W(psi.counts, params))


def unrank_in_W(psi, rank: int, params: FirstStepParams) -> MarkedGraph:
    counts = _counts_of(psi)
    size = count_W(counts, params)
    if size == 0:
        raise EmptyTypeClass("type class is empty")
    if not 0 <= rank < size:
        raise RankOutOfRange(f"rank {rank} outside [0, {size})")
    ser = _Search(counts, params).unrank(rank)
    return from_serialization(params.mark_sets, params.n, ser)


def write_first_step(w: BitWriter, g: MarkedGraph, params: FirstStepParams) -> RankedType:
    rt = rank_in_W(g, params)
    cw = width(params.n)
    for c in rt.psi.counts:
        w.write(c, cw)
    w.write(rt.rank, width(rt.w_size))
    return rt


def read_first_step(r: BitReader, params: FirstStepParams) -> MarkedGraph:
    classes = params.classes()
    cw = width(params.n)
    counts = tuple(r.read(cw) for _ in classes)
    if sum(counts) != params.n:
        raise MalformedStream(f"type counts sum to {sum(counts)}, expected {params.n}")
    size = count_W(counts, params)
    if size == 0:
        raise MalformedStream("type class described by the stream is empty")
    rank = r.read(width(size))
    if rank >= size:
        raise MalformedStream(f"rank {rank} outside type class of size {size}")
    return unrank_in_W(counts, rank, params)


def encode_first_step(g: MarkedGraph, params: FirstStepParams) -> str:
    """Bit string: one fixed-width count per class, then the rank in the class."""
    w = BitWriter()
    write_first_step(w, g, params)
    return w.bitstring()


def decode_first_step(bits: str, params: FirstStepParams) -> MarkedGraph:
    if bits and set(bits) - {"0", "1"}:
        raise MalformedStream("bit string contains characters other than 0 and 1")
    padded = bits + "0" * ((-len(bits)) % 8)
    data = int(padded, 2).to_bytes(len(padded) // 8, "big") if padded else b""
    r = BitReader(data, len(bits))
    g = read_first_step(r, params)
    if r.remaining:
        raise MalformedStream(f"{r.remaining} trailing bits after the first-step payload")
    return g


def first_step_length(psi, w_size: int, params: FirstStepParams) -> int:
    return len(params.classes()) * width(params.n) + width(w_size)
