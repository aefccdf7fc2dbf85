"""Rooted neighbourhoods: truncation, canonical class codes, the local metric
and enumeration of all bounded-depth, bounded-degree classes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .bits import decode_varint, encode_varint
from .errors import BudgetExceeded, DepthProfileMismatch, FormatError, VertexOutOfRange
from .graph import MarkSets, MarkedGraph, bfs_distances, find_isomorphism, from_serialization

CODE_VERSION = 1
PAIR_CODE_VERSION = 2
DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class RootedMarkedGraph:
    """A marked graph with a root; ``depth`` is ``None`` when untruncated.

    ``origin`` maps local vertex ``i`` to ``origin[i - 1]`` in the source graph.
    """

    graph: MarkedGraph
    root: int
    depth: int | None = None
    origin: tuple = field(default=(), compare=False)

    def radius(self) -> int:
        return max(bfs_distances(self.graph, self.root).values())


@dataclass(frozen=True, order=True)
class RootedClassCode:
    """Canonical byte string of a rooted isomorphism class; ordered bytewise."""

    code: bytes

    @property
    def depth(self) -> int:
        return decode_varint(self.code, 1)[0]

    @property
    def size(self) -> int:
        _, pos = decode_varint(self.code, 1)
        return decode_varint(self.code, pos)[0]

    def hex(self) -> str:
        return self.code.hex()

    @classmethod
    def from_hex(cls, text: str) -> "RootedClassCode":
        try:
            return cls(bytes.fromhex(text))
        except ValueError:
            raise FormatError(f"bad class code {text!r}") from None

    def __repr__(self):
        return f"RootedClassCode({self.code.hex()})"


def truncate(g: MarkedGraph, o: int, h: int | None) -> RootedMarkedGraph:
    """Induced subgraph on the ball of radius ``h`` around ``o``, relabelled in BFS order."""
    if not (isinstance(o, int) and 1 <= o <= g.n):
        raise VertexOutOfRange(f"root {o} outside 1..{g.n}")
    if h is not None and h < 0:
        raise ValueError("depth must be non-negative")
    order = [o]
    dist = {o: 0}
    queue = deque([o])
    while queue:
        v = queue.popleft()
        if h is not None and dist[v] >= h:
            continue
        for w in sorted(g.adj[v]):
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                queue.append(w)
    local = {v: i for i, v in enumerate(order, start=1)}
    edges = {}
    for v in order:
        lv = local[v]
        for w, a in g.adj[v].items():
            lw = local.get(w)
            if lw is not None and lv < lw:
                edges[(lv, lw)] = (a, g.adj[w][v])
    sub = MarkedGraph(g.mark_sets, len(order), [g.tau[v - 1] for v in order], edges)
    return RootedMarkedGraph(sub, 1, h, tuple(order))


def retruncate(r: RootedMarkedGraph, h: int) -> RootedMarkedGraph:
    return truncate(r.graph, r.root, h)


# -- canonical labelling --------------------------------------------------

def _local_view(g: MarkedGraph, verts):
    idx = {v: i for i, v in enumerate(verts)}
    nbrs = []
    for v in verts:
        row = []
        for w, a in g.adj[v].items():
            j = idx.get(w)
            if j is not None:
                row.append((j, a, g.adj[w][v]))
        nbrs.append(row)
    return idx, nbrs


def _refine(colors, nbrs):
    count = len(set(colors))
    while True:
        sigs = [(colors[i], tuple(sorted((colors[j], b, a) for j, a, b in nbrs[i])))
                for i in range(len(colors))]
        palette = {s: c for c, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(palette) == count:
            return new
        colors, count = new, len(palette)


def _serialize(order, marks, nbrs, ne):
    pos = {v: p for p, v in enumerate(order)}
    n = len(order)
    out = [marks[v] for v in order]
    tri = [0] * (n * (n - 1) // 2)
    for v in order:
        p = pos[v]
        for j, a, b in nbrs[v]:
            q = pos[j]
            if p < q:
                # offset of (p, q) in the row-major upper triangle
                tri[p * n - p * (p + 1) // 2 + (q - p - 1)] = 1 + a * ne + b
    return tuple(out) + tuple(tri)


def _twins(u, v, nbrs, adjmap):
    au, av = adjmap[u], adjmap[v]
    if v in au:
        if au[v][0] != au[v][1]:
            return False
    su = {(j, m) for j, m in au.items() if j != v}
    sv = {(j, m) for j, m in av.items() if j != u}
    return su == sv


def _search_min(colors, marks, nbrs, ne):
    adjmap = [{j: (a, b) for j, a, b in row} for row in nbrs]
    best = [None]

    def rec(cols):
        cols = _refine(cols, nbrs)
        cells = {}
        for i, c in enumerate(cols):
            cells.setdefault(c, []).append(i)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = c
                break
        if target is None:
            order = sorted(range(len(cols)), key=cols.__getitem__)
            ser = _serialize(order, marks, nbrs, ne)
            if best[0] is None or ser < best[0]:
                best[0] = ser
            return
        reps = []
        for v in cells[target]:
            if not any(_twins(r, v, nbrs, adjmap) for r in reps):
                reps.append(v)
        for v in reps:
            new = [2 * c + (1 if c == target and i != v else 0) for i, c in enumerate(cols)]
            rec(new)

    rec(colors)
    return best[0]


def _tree_order(root, marks, nbrs):
    """Canonical vertex order for a rooted tree via sorted subtree keys."""
    parent = {root: None}
    bfs = [root]
    for v in bfs:
        for j, _, _ in nbrs[v]:
            if j not in parent:
                parent[j] = v
                bfs.append(j)
    key = {}
    kids = {v: [] for v in bfs}
    for v in reversed(bfs):
        ch = sorted((a, b, key[j]) + (j,) for j, a, b in nbrs[v] if j != parent[v])
        kids[v] = ch
        key[v] = (marks[v], tuple(c[:3] for c in ch))
    order = [root]
    for v in order:
        order.extend(c[3] for c in kids[v])
    return order


def _encode(version, depth, n, ser) -> bytes:
    return bytes([version]) + encode_varint(depth) + encode_varint(n) + bytes(ser)


def canonical_code(r: RootedMarkedGraph) -> RootedClassCode:
    """Class code of the root's component; equal codes iff rooted-isomorphic."""
    g = r.graph
    dist = bfs_distances(g, r.root)
    verts = sorted(dist, key=lambda v: (dist[v], v))
    idx, nbrs = _local_view(g, verts)
    marks = [g.tau[v - 1] for v in verts]
    ne = g.mark_sets.ne
    radius = max(dist.values())
    n_edges = sum(len(row) for row in nbrs) // 2
    if n_edges == len(verts) - 1:
        order = _tree_order(0, marks, nbrs)
        ser = _serialize(order, marks, nbrs, ne)
    else:
        init = [(dist[v], marks[i]) for i, v in enumerate(verts)]
        palette = {c: k for k, c in enumerate(sorted(set(init)))}
        ser = _search_min([palette[c] for c in init], marks, nbrs, ne)
    return RootedClassCode(_encode(CODE_VERSION, radius, len(verts), ser))


def class_code(g: MarkedGraph, o: int, h: int | None) -> RootedClassCode:
    return canonical_code(truncate(g, o, h))


def pair_code(g: MarkedGraph, o: int, v: int, h: int | None) -> RootedClassCode:
    """Code of the doubly rooted neighbourhood: balls of radius ``h`` around both roots."""
    do = bfs_distances(g, o, h)
    dv = bfs_distances(g, v, h)
    inf = g.n + 1
    vs = set(do) | set(dv)
    verts = sorted(vs, key=lambda w: (do.get(w, inf), dv.get(w, inf), w))
    idx, nbrs = _local_view(g, verts)
    marks = [g.tau[w - 1] for w in verts]
    init = [(0 if w == o else 1 if w == v else 2, do.get(w, inf), dv.get(w, inf), marks[i])
            for i, w in enumerate(verts)]
    palette = {c: k for k, c in enumerate(sorted(set(init)))}
    ser = _search_min([palette[c] for c in init], marks, nbrs, g.mark_sets.ne)
    return RootedClassCode(_encode(PAIR_CODE_VERSION, 0 if h is None else h, len(verts), ser))


def pair_root_marks(code: RootedClassCode) -> tuple[int, int]:
    """Vertex marks of the first and second root of a pair code."""
    data = code.code
    if not data or data[0] != PAIR_CODE_VERSION:
        raise FormatError("not a pair class code")
    _, pos = decode_varint(data, 1)
    _, pos = decode_varint(data, pos)
    return data[pos], data[pos + 1]


def decode_code(code: RootedClassCode, mark_sets: MarkSets) -> RootedMarkedGraph:
    """Rebuild a representative (root is vertex 1) from a class code."""
    data = code.code
    if not data or data[0] != CODE_VERSION:
        raise FormatError("not a rooted class code")
    depth, pos = decode_varint(data, 1)
    n, pos = decode_varint(data, pos)
    ser = tuple(data[pos:])
    if len(ser) != n + n * (n - 1) // 2:
        raise FormatError("class code length mismatch")
    g = from_serialization(mark_sets, n, ser)
    return RootedMarkedGraph(g, 1, depth, tuple(range(1, n + 1)))


def rooted_isomorphic(r1: RootedMarkedGraph, r2: RootedMarkedGraph) -> bool:
    """Backtracking oracle: root-preserving isomorphism of the roots' components."""
    c1 = list(bfs_distances(r1.graph, r1.root))
    c2 = list(bfs_distances(r2.graph, r2.root))
    if len(c1) != len(c2):
        return False
    return find_isomorphism(r1.graph, r2.graph, c1, c2, pinned=[(r1.root, r2.root)]) is not None


# -- metric ---------------------------------------------------------------

@dataclass(frozen=True)
class DepthProfile:
    """Class codes of one rooted graph at depths ``0..H``.

    ``saturated`` means the last code already describes the whole component,
    so the profile extends to any larger depth by repetition.
    """

    codes: tuple
    saturated: bool

    @property
    def max_depth(self) -> int:
        return len(self.codes) - 1

    def at(self, h: int) -> RootedClassCode:
        if h < len(self.codes):
            return self.codes[h]
        if self.saturated:
            return self.codes[-1]
        raise DepthProfileMismatch(f"profile has no code at depth {h}")


def depth_profile(g: MarkedGraph, o: int, max_depth: int | None = None,
                  complete: bool = True) -> DepthProfile:
    """Codes at every depth up to ``max_depth`` (default: the root's eccentricity).

    ``complete=False`` marks ``g`` as itself a truncation at ``max_depth``: the
    profile then only counts as saturated when the ball stops short of that depth.
    """
    radius = max(bfs_distances(g, o).values())
    top = radius if max_depth is None else max_depth
    codes = tuple(class_code(g, o, h) for h in range(min(top, radius) + 1))
    if top > radius:
        return DepthProfile(codes, True)
    return DepthProfile(codes, complete and top >= radius)


def metric(p1: DepthProfile, p2: DepthProfile) -> Fraction:
    """Local distance ``1 / (1 + h)`` with ``h`` the largest depth of agreement.

    Profiles that agree at every comparable depth are at distance 0.
    """
    if p1.saturated and p2.saturated:
        top = max(p1.max_depth, p2.max_depth)
    elif p1.saturated and p1.max_depth <= p2.max_depth:
        top = p2.max_depth
    elif p2.saturated and p2.max_depth <= p1.max_depth:
        top = p1.max_depth
    elif p1.max_depth == p2.max_depth:
        top = p1.max_depth
    else:
        raise DepthProfileMismatch(
            f"profiles cover depths 0..{p1.max_depth} and 0..{p2.max_depth}")
    h_hat = -1
    for h in range(top + 1):
        if p1.at(h) != p2.at(h):
            break
        h_hat = h
    else:
        return Fraction(0)
    return Fraction(1, 1 + max(h_hat, 0))


def distance(g1: MarkedGraph, o1: int, g2: MarkedGraph, o2: int, max_depth: int | None = None) -> Fraction:
    return metric(depth_profile(g1, o1, max_depth), depth_profile(g2, o2, max_depth))


# -- enumeration of bounded classes ---------------------------------------

def class_count_bound(mark_sets: MarkSets, k: int, delta: int) -> int:
    """Crude upper bound on the number of depth-k, degree-delta classes."""
    return (1 + mark_sets.ne ** 2) ** (delta ** (2 * (k + 1))) * mark_sets.nv ** (delta ** (k + 1))


def _extensions(g: MarkedGraph, k: int, delta: int):
    dist = bfs_distances(g, 1)
    n = g.n
    open_ = [v for v in range(1, n + 1) if g.degree(v) < delta]
    ne, nv = g.mark_sets.ne, g.mark_sets.nv
    for size in range(1, delta + 1):
        for subset in _subsets(open_, size):
            if min(dist[v] for v in subset) > k - 1:
                continue
            for marks in _products(ne * ne, size):
                for theta in range(nv):
                    edges = dict(g.edges)
                    for v, m in zip(subset, marks):
                        a, b = divmod(m, ne)
                        edges[(v, n + 1)] = (a, b)
                    yield MarkedGraph(g.mark_sets, n + 1, g.tau + (theta,), edges)


def _subsets(items, size):
    from itertools import combinations
    return combinations(items, size)


def _products(base, size):
    from itertools import product
    return product(range(base), repeat=size)


@lru_cache(maxsize=64)
def enumerate_classes(mark_sets: MarkSets, k: int, delta: int, budget: int = DEFAULT_BUDGET) -> tuple:
    """All classes of rooted graphs with root eccentricity <= k and max degree <= delta, sorted."""
    if k < 0 or delta < 0:
        raise ValueError("k and delta must be non-negative")
    found = {}
    frontier = []
    for theta in range(mark_sets.nv):
        g = MarkedGraph(mark_sets, 1, (theta,), {})
        c = canonical_code(RootedMarkedGraph(g, 1))
        found[c] = g
        frontier.append(g)
    if k == 0 or delta == 0:
        return tuple(sorted(found))
    while frontier:
        nxt = []
        for g in frontier:
            for h in _extensions(g, k, delta):
                c = canonical_code(RootedMarkedGraph(h, 1))
                if c not in found:
                    found[c] = h
                    nxt.append(h)
                    if len(found) > budget:
                        raise BudgetExceeded(
                            f"more than {budget} classes for k={k}, delta={delta}")
        frontier = nxt
    return tuple(sorted(found))
