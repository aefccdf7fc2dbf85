"""Finite marked graphs: construction, validation, mark statistics, relabelling,
degree trimming and the unmarked projection.

Vertices are the integers ``1..n``.  Marks are stored as indices into the
ordered alphabets of a :class:`MarkSets`.  An edge ``{i, j}`` with ``i < j`` is
stored under the key ``(i, j)`` as the pair ``(mark toward j, mark toward i)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DuplicateEdge,
    FormatError,
    NotAPermutation,
    SelfLoop,
    UnknownMark,
    VertexOutOfRange,
)

MAX_EDGE_MARKS = 15
MAX_VERTEX_MARKS = 255


@dataclass(frozen=True)
class MarkSets:
    """Ordered vertex-mark and edge-mark alphabets."""

    vertex_marks: tuple
    edge_marks: tuple

    def __post_init__(self):
        vm, em = tuple(self.vertex_marks), tuple(self.edge_marks)
        object.__setattr__(self, "vertex_marks", vm)
        object.__setattr__(self, "edge_marks", em)
        for name, alpha, cap in (("vertex", vm, MAX_VERTEX_MARKS), ("edge", em, MAX_EDGE_MARKS)):
            if not alpha:
                raise ValueError(f"{name} mark alphabet must be non-empty")
            if len(set(alpha)) != len(alpha):
                raise ValueError(f"{name} mark alphabet has duplicates")
            if len(alpha) > cap:
                raise ValueError(f"at most {cap} {name} marks are supported")

    @classmethod
    def of_sizes(cls, n_vertex_marks: int, n_edge_marks: int) -> "MarkSets":
        return cls(tuple(str(i) for i in range(n_vertex_marks)),
                   tuple(str(i) for i in range(n_edge_marks)))

    @property
    def nv(self) -> int:
        return len(self.vertex_marks)

    @property
    def ne(self) -> int:
        return len(self.edge_marks)

    def vertex_index(self, mark) -> int:
        return _lookup(self.vertex_marks, mark, "vertex")

    def edge_index(self, mark) -> int:
        return _lookup(self.edge_marks, mark, "edge")

    def unmarked(self) -> "MarkSets":
        return MarkSets((self.vertex_marks[0],), (self.edge_marks[0],))


def _lookup(alphabet, mark, kind):
    # symbols first, then plain indices
    try:
        return alphabet.index(mark)
    except ValueError:
        pass
    if isinstance(mark, int) and not isinstance(mark, bool) and 0 <= mark < len(alphabet):
        return mark
    raise UnknownMark(f"{mark!r} is not a {kind} mark")


UNMARKED = MarkSets(("*",), ("*",))


class MarkedGraph:
    """Immutable simple marked graph on vertices ``1..n``."""

    __slots__ = ("mark_sets", "n", "tau", "edges", "adj", "_hash")

    def __init__(self, mark_sets: MarkSets, n: int, tau: Sequence[int], edges: dict):
        # trusted constructor; use build() for validated input
        self.mark_sets = mark_sets
        self.n = n
        self.tau = tuple(tau)
        self.edges = dict(sorted(edges.items()))
        adj = [dict() for _ in range(n + 1)]
        for (i, j), (a, b) in self.edges.items():
            adj[i][j] = a
            adj[j][i] = b
        self.adj = adj
        self._hash = None

    # -- basic accessors -------------------------------------------------
    def mark(self, v: int) -> int:
        """Vertex-mark index of ``v``."""
        return self.tau[v - 1]

    def edge_mark(self, i: int, j: int) -> int:
        """Mark of edge ``(i, j)`` toward ``j``."""
        return self.adj[i][j]

    def neighbors(self, v: int):
        return self.adj[v].keys()

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj[i]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(self.adj[v]) for v in range(1, self.n + 1)), default=0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_list(self):
        """Edges as ``(i, j, mark_toward_j, mark_toward_i)`` with ``i < j``."""
        return [(i, j, a, b) for (i, j), (a, b) in self.edges.items()]

    def serialization(self) -> tuple:
        """Vertex marks then upper-triangular adjacency symbols.

        Symbol 0 means no edge; otherwise ``1 + a * |Xi| + b`` where ``a`` is the
        mark toward the larger endpoint and ``b`` the mark toward the smaller.
        """
        ne = self.mark_sets.ne
        out = list(self.tau)
        for i in range(1, self.n + 1):
            row = self.adj[i]
            for j in range(i + 1, self.n + 1):
                a = row.get(j)
                out.append(0 if a is None else 1 + a * ne + self.adj[j][i])
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, MarkedGraph):
            return NotImplemented
        return (self.n == other.n and self.tau == other.tau
                and self.edges == other.edges and self.mark_sets == other.mark_sets)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.tau, tuple(self.edges.items())))
        return self._hash

    def __repr__(self):
        return f"MarkedGraph(n={self.n}, edges={self.num_edges})"


def from_serialization(mark_sets: MarkSets, n: int, ser: Sequence[int]) -> MarkedGraph:
    """Inverse of :meth:`MarkedGraph.serialization`."""
    ne = mark_sets.ne
    tau = ser[:n]
    edges = {}
    pos = n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            s = ser[pos]
            pos += 1
            if s:
                a, b = divmod(s - 1, ne)
                edges[(i, j)] = (a, b)
    return MarkedGraph(mark_sets, n, tau, edges)


def build(mark_sets: MarkSets, n: int, tau: Sequence, edges: Iterable) -> MarkedGraph:
    """Validated constructor.

    ``edges`` holds tuples ``(i, j, mark_toward_j, mark_toward_i)``; marks may be
    alphabet symbols or indices.
    """
    if n < 0:
        raise VertexOutOfRange("vertex count must be non-negative")
    tau = list(tau)
    if len(tau) != n:
        raise VertexOutOfRange(f"expected {n} vertex marks, got {len(tau)}")
    tau_idx = [mark_sets.vertex_index(t) for t in tau]
    store = {}
    for e in edges:
        i, j, x_to_j, x_to_i = e
        if not (1 <= i <= n and 1 <= j <= n):
            raise VertexOutOfRange(f"edge ({i}, {j}) outside 1..{n}")
        if i == j:
            raise SelfLoop(f"self-loop at vertex {i}")
        a, b = mark_sets.edge_index(x_to_j), mark_sets.edge_index(x_to_i)
        if i > j:
            i, j, a, b = j, i, b, a
        if (i, j) in store:
            raise DuplicateEdge(f"edge ({i}, {j}) given twice")
        store[(i, j)] = (a, b)
    return MarkedGraph(mark_sets, n, tau_idx, store)


# -- statistics -----------------------------------------------------------

@dataclass(frozen=True)
class EdgeMarkCounts:
    """m(x, x') for x <= x'; indexing is symmetric."""

    values: dict

    def __getitem__(self, key):
        x, y = key
        if x > y:
            x, y = y, x
        return self.values.get((x, y), 0)

    @property
    def norm1(self) -> int:
        return sum(self.values.values())

    def pairs(self, ne: int):
        return [(x, y) for x in range(ne) for y in range(x, ne)]


@dataclass(frozen=True)
class VertexMarkCounts:
    values: tuple

    def __getitem__(self, theta: int) -> int:
        return self.values[theta]

    @property
    def total(self) -> int:
        return sum(self.values)


def counts(g: MarkedGraph):
    """Edge and vertex mark count vectors of ``g``."""
    ne = g.mark_sets.ne
    m = {(x, y): 0 for x in range(ne) for y in range(x, ne)}
    for a, b in g.edges.values():
        m[(min(a, b), max(a, b))] += 1
    u = [0] * g.mark_sets.nv
    for t in g.tau:
        u[t] += 1
    return EdgeMarkCounts(m), VertexMarkCounts(tuple(u))


def _check_vertex(g: MarkedGraph, v: int):
    if not (isinstance(v, int) and 1 <= v <= g.n):
        raise VertexOutOfRange(f"vertex {v} outside 1..{g.n}")


def degree(g: MarkedGraph, v: int) -> int:
    _check_vertex(g, v)
    return g.degree(v)


def directed_degree(g: MarkedGraph, v: int, x: int, x2: int) -> int:
    """Neighbours ``w`` of ``v`` with mark ``x`` toward ``v`` and ``x2`` toward ``w``."""
    _check_vertex(g, v)
    return sum(1 for w, a in g.adj[v].items() if a == x2 and g.adj[w][v] == x)


def apply_permutation(g: MarkedGraph, pi) -> MarkedGraph:
    """Relabel ``g`` by ``pi``; ``pi`` maps ``i`` to ``pi[i]`` (dict or 1-based sequence)."""
    n = g.n
    if isinstance(pi, dict):
        p = [None] + [pi.get(i) for i in range(1, n + 1)]
    else:
        p = [None] + list(pi)
    if len(p) != n + 1 or sorted(p[1:]) != list(range(1, n + 1)):
        raise NotAPermutation("pi is not a bijection on 1..n")
    tau = [0] * n
    for i in range(1, n + 1):
        tau[p[i] - 1] = g.tau[i - 1]
    edges = {}
    for (i, j), (a, b) in g.edges.items():
        pi_, pj = p[i], p[j]
        if pi_ < pj:
            edges[(pi_, pj)] = (a, b)
        else:
            edges[(pj, pi_)] = (b, a)
    return MarkedGraph(g.mark_sets, n, tau, edges)


def trim(g: MarkedGraph, delta: int) -> MarkedGraph:
    """Drop every edge with an endpoint of degree above ``delta``."""
    deg = [0] + [g.degree(v) for v in range(1, g.n + 1)]
    kept = {e: m for e, m in g.edges.items() if deg[e[0]] <= delta and deg[e[1]] <= delta}
    return MarkedGraph(g.mark_sets, g.n, g.tau, kept)


def residual_set(g: MarkedGraph, delta: int) -> list:
    """Vertices of degree above ``delta`` together with their neighbours."""
    out = set()
    for v in range(1, g.n + 1):
        if g.degree(v) > delta:
            out.add(v)
            out.update(g.adj[v])
    return sorted(out)


def forget_marks(g: MarkedGraph) -> MarkedGraph:
    ms = g.mark_sets.unmarked()
    return MarkedGraph(ms, g.n, [0] * g.n, {e: (0, 0) for e in g.edges})


def bfs_distances(g: MarkedGraph, source: int, limit: int | None = None) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        d = dist[v]
        if limit is not None and d >= limit:
            continue
        for w in g.adj[v]:
            if w not in dist:
                dist[w] = d + 1
                queue.append(w)
    return dist


# -- isomorphism oracle ---------------------------------------------------

def _refine(adjs, colors):
    """Colour refinement on a list of (vertex, adjacency) views sharing a palette."""
    while True:
        sigs = {}
        for key, (v, adj, rev) in adjs.items():
            sigs[key] = (colors[key],
                         tuple(sorted((colors[(key[0], w)], a, rev(w, v)) for w, a in adj[v].items())))
        palette = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {k: palette[s] for k, s in sigs.items()}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def find_isomorphism(g1: MarkedGraph, g2: MarkedGraph, verts1=None, verts2=None, pinned=()):
    """Backtracking search for a mark-preserving bijection ``verts1 -> verts2``.

    ``pinned`` lists forced pairs ``(v1, v2)``.  Returns the mapping or ``None``.
    """
    verts1 = list(range(1, g1.n + 1)) if verts1 is None else list(verts1)
    verts2 = list(range(1, g2.n + 1)) if verts2 is None else list(verts2)
    if len(verts1) != len(verts2):
        return None
    set1, set2 = set(verts1), set(verts2)
    if sum(len(set1.intersection(g1.adj[v])) for v in verts1) != \
            sum(len(set2.intersection(g2.adj[v])) for v in verts2):
        return None
    pin_rank = {}
    for r, (a, b) in enumerate(pinned):
        pin_rank[(0, a)] = r
        pin_rank[(1, b)] = r

    adj1 = [{w: a for w, a in g1.adj[v].items() if w in set1} if v in set1 else {} for v in range(g1.n + 1)]
    adj2 = [{w: a for w, a in g2.adj[v].items() if w in set2} if v in set2 else {} for v in range(g2.n + 1)]
    views = {}
    for v in verts1:
        views[(0, v)] = (v, adj1, lambda w, v_: adj1[w][v_])
    for v in verts2:
        views[(1, v)] = (v, adj2, lambda w, v_: adj2[w][v_])
    colors = {}
    for (side, v) in views:
        g = g1 if side == 0 else g2
        colors[(side, v)] = (pin_rank.get((side, v), -1), g.tau[v - 1])
    palette = {c: i for i, c in enumerate(sorted(set(colors.values())))}
    colors = _refine(views, {k: palette[c] for k, c in colors.items()})

    cls1, cls2 = {}, {}
    for v in verts1:
        cls1.setdefault(colors[(0, v)], []).append(v)
    for v in verts2:
        cls2.setdefault(colors[(1, v)], []).append(v)
    if {c: len(vs) for c, vs in cls1.items()} != {c: len(vs) for c, vs in cls2.items()}:
        return None

    order = sorted(verts1, key=lambda v: (len(cls1[colors[(0, v)]]), colors[(0, v)], v))
    mapping, used = {}, set()

    def consistent(v1, v2):
        for w1, a in adj1[v1].items():
            if w1 in mapping:
                w2 = mapping[w1]
                if adj2[v2].get(w2) != a or adj2[w2].get(v2) != adj1[w1][v1]:
                    return False
        # mapped non-neighbours must stay non-neighbours
        mapped_nbrs = sum(1 for w1 in adj1[v1] if w1 in mapping)
        mapped_nbrs2 = sum(1 for w2 in adj2[v2] if w2 in used)
        return mapped_nbrs == mapped_nbrs2

    def extend(idx):
        if idx == len(order):
            return True
        v1 = order[idx]
        for v2 in cls2[colors[(0, v1)]]:
            if v2 in used or not consistent(v1, v2):
                continue
            mapping[v1] = v2
            used.add(v2)
            if extend(idx + 1):
                return True
            del mapping[v1]
            used.discard(v2)
        return False

    return dict(mapping) if extend(0) else None


def are_isomorphic(g1: MarkedGraph, g2: MarkedGraph) -> bool:
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False
    return find_isomorphism(g1, g2) is not None


# -- text format ----------------------------------------------------------

def parse_graph_text(text: str, mark_sets: MarkSets | None = None) -> MarkedGraph:
    """Parse ``n |Theta| |Xi|`` / vertex marks / ``i j xi_to_j xi_to_i`` lines."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise FormatError("empty graph file")
    try:
        n, nv, ne = (int(x) for x in rows[0])
        if n > 0:
            tau = [int(x) for x in rows[1]]
            edge_rows = rows[2:]
        else:
            tau, edge_rows = [], rows[1:]
        edges = []
        for r in edge_rows:
            i, j, a, b = (int(x) for x in r)
            edges.append((i, j, a, b))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed graph text: {exc}") from None
    if mark_sets is None:
        mark_sets = MarkSets.of_sizes(nv, ne)
    elif (mark_sets.nv, mark_sets.ne) != (nv, ne):
        raise FormatError("alphabet sizes in file do not match the given mark sets")
    for t in tau:
        if not 0 <= t < nv:
            raise UnknownMark(f"vertex mark index {t} out of range")
    for _, _, a, b in edges:
        if not (0 <= a < ne and 0 <= b < ne):
            raise UnknownMark(f"edge mark index out of range in {a} {b}")
    return build(mark_sets, n, tau, edges)


def format_graph_text(g: MarkedGraph) -> str:
    lines = [f"{g.n} {g.mark_sets.nv} {g.mark_sets.ne}"]
    if g.n:
        lines.append(" ".join(str(t) for t in g.tau))
    for i, j, a, b in g.edge_list():
        lines.append(f"{i} {j} {a} {b}")
    return "\n".join(lines) + "\n"
