"""Universal marked-graph codec and its MGZ1 container.

Payload layout (big-endian bits):

1. type-class code of the degree-trimmed graph (counts, then rank);
2. ``|R|`` and the subset rank of the residual vertex set ``R``;
3. per unordered edge-mark pair, the number of removed edges;
4. per unordered edge-mark pair, the rank of the removed-edge slot set among
   the pairs of ``R``;
5. one orientation bit per removed edge whose two marks differ (0 when the
   smaller mark index points toward the smaller vertex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

from .bits import BitReader, BitWriter, decode_varint, encode_varint, rank_subset, unrank_subset, width
from .errors import (
    BadMagic,
    MalformedStream,
    ParameterOutOfRange,
    PatternOutOfBounds,
    RankOutOfRange,
    SlotCollision,
    UnsupportedVersion,
)
from .graph import MarkSets, MarkedGraph, counts, residual_set, trim
from .rooted import DEFAULT_BUDGET, RootedMarkedGraph, canonical_code, decode_code, truncate
from .typeclass import DEFAULT_NODE_BUDGET, FirstStepParams, count_W, read_first_step, write_first_step

MAGIC = b"MGZ1"
VERSION = 1


def default_depth(n: int) -> int:
    ll = math.log(math.log(n)) if n >= 3 else 0.0
    return max(1, math.floor(math.sqrt(ll))) if ll > 0 else 1


def default_max_degree(n: int) -> int:
    ll = math.log(math.log(n)) if n >= 3 else 0.0
    return max(1, math.floor(ll))


@dataclass(frozen=True)
class CodecConfig:
    """Depth ``k`` and degree cap ``delta``; ``None`` picks the size-based defaults."""

    mark_sets: MarkSets
    k: int | None = None
    delta: int | None = None
    class_budget: int = DEFAULT_BUDGET
    node_budget: int = DEFAULT_NODE_BUDGET

    def resolve(self, n: int) -> tuple[int, int]:
        k = default_depth(n) if self.k is None else self.k
        delta = default_max_degree(n) if self.delta is None else self.delta
        if k < 1 or delta < 1:
            raise ParameterOutOfRange("depth and max degree must be at least 1")
        return k, delta


@dataclass(frozen=True)
class Header:
    n: int
    n_vertex_marks: int
    n_edge_marks: int
    k: int
    delta: int
    payload_bits: int
    offset: int


@dataclass(frozen=True)
class CompressedBlob:
    data: bytes

    @property
    def bit_length(self) -> int:
        return 8 * len(self.data)

    def header(self) -> Header:
        return parse_header(self.data)


def parse_header(data: bytes) -> Header:
    if len(data) < 5:
        raise MalformedStream("blob shorter than the fixed header")
    if data[:4] != MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}")
    if data[4] != VERSION:
        raise UnsupportedVersion(f"unsupported container version {data[4]}")
    pos = 5
    vals = []
    for _ in range(6):
        v, pos = decode_varint(data, pos)
        vals.append(v)
    n, nv, ne, k, delta, nbits = vals
    expected = pos + (nbits + 7) // 8
    if len(data) != expected:
        raise MalformedStream(f"blob has {len(data)} bytes, header implies {expected}")
    if nbits % 8:
        tail = data[-1] & ((1 << (8 - nbits % 8)) - 1)
        if tail:
            raise MalformedStream("non-zero padding bits")
    return Header(n, nv, ne, k, delta, nbits, pos)


def mark_pairs(ne: int):
    return [(x, y) for x in range(ne) for y in range(x, ne)]


def _slot(p: int, q: int, r: int) -> int:
    return p * r - p * (p + 1) // 2 + (q - p - 1)


def _unslot(s: int, r: int) -> tuple[int, int]:
    p = 0
    while s >= r - p - 1:
        s -= r - p - 1
        p += 1
    return p, p + 1 + s


def compress(g: MarkedGraph, cfg: CodecConfig) -> CompressedBlob:
    if g.mark_sets != cfg.mark_sets:
        raise ValueError("graph and config use different mark sets")
    n = g.n
    k, delta = cfg.resolve(max(n, 1))
    ms = g.mark_sets
    w = BitWriter()
    trimmed = trim(g, delta)
    params = FirstStepParams(k, delta, ms, n, cfg.class_budget, cfg.node_budget)
    write_first_step(w, trimmed, params)

    R = residual_set(g, delta)
    r = len(R)
    w.write(r, width(n))
    w.write(rank_subset([v - 1 for v in R]), width(comb(n, r)))
    pos_in_R = {v: i for i, v in enumerate(R)}

    removed = {}
    for (i, j), (a, b) in g.edges.items():
        if (i, j) not in trimmed.edges:
            removed.setdefault((min(a, b), max(a, b)), []).append((i, j, a, b))
    pairs = mark_pairs(ms.ne)
    for xy in pairs:
        w.write(len(removed.get(xy, ())), width(n * n))
    slots = comb(r, 2)
    orient = []
    for xy in pairs:
        es = sorted(removed.get(xy, ()), key=lambda e: _slot(pos_in_R[e[0]], pos_in_R[e[1]], r))
        chosen = [_slot(pos_in_R[i], pos_in_R[j], r) for i, j, _, _ in es]
        w.write(rank_subset(chosen), width(comb(slots, len(es))))
        if xy[0] != xy[1]:
            orient.extend(0 if b == xy[0] else 1 for _, _, _, b in es)
    for bit in orient:
        w.write(bit, 1)

    head = MAGIC + bytes([VERSION]) + b"".join(
        encode_varint(x) for x in (n, ms.nv, ms.ne, k, delta, len(w)))
    return CompressedBlob(head + w.to_bytes())


def _reader(blob: CompressedBlob, mark_sets: MarkSets | None):
    h = parse_header(blob.data)
    if mark_sets is None:
        mark_sets = MarkSets.of_sizes(h.n_vertex_marks, h.n_edge_marks)
    elif (mark_sets.nv, mark_sets.ne) != (h.n_vertex_marks, h.n_edge_marks):
        raise MalformedStream("mark alphabets do not match the blob header")
    if h.k < 1 or h.delta < 1:
        raise MalformedStream("header depth and degree cap must be positive")
    r = BitReader(blob.data[h.offset:], h.payload_bits)
    return h, mark_sets, r


def _params(h: Header, ms: MarkSets) -> FirstStepParams:
    return FirstStepParams(h.k, h.delta, ms, h.n)


def _read_residual_set(r: BitReader, n: int):
    size = r.read(width(n))
    if size > n:
        raise MalformedStream(f"residual set size {size} exceeds n={n}")
    rank = r.read(width(comb(n, size)))
    try:
        R = [v + 1 for v in unrank_subset(rank, size, n)]
    except RankOutOfRange:
        raise MalformedStream("residual set rank out of range") from None
    return R


def decompress(blob: CompressedBlob, mark_sets: MarkSets | None = None) -> MarkedGraph:
    h, ms, r = _reader(blob, mark_sets)
    n = h.n
    base = read_first_step(r, _params(h, ms))
    R = _read_residual_set(r, n)
    rr = len(R)
    pairs = mark_pairs(ms.ne)
    deltas = [r.read(width(n * n)) for _ in pairs]
    slots = comb(rr, 2)
    chosen = []
    for xy, d in zip(pairs, deltas):
        if d > slots:
            raise MalformedStream(f"{d} removed edges do not fit among {slots} slots")
        rank = r.read(width(comb(slots, d)))
        try:
            chosen.append(unrank_subset(rank, d, slots))
        except RankOutOfRange:
            raise MalformedStream("removed-edge rank out of range") from None
    edges = dict(base.edges)
    for xy, sl in zip(pairs, chosen):
        for s in sl:
            p, q = _unslot(s, rr)
            i, j = R[p], R[q]
            if (i, j) in edges:
                raise SlotCollision(f"removed edge ({i}, {j}) already present")
            x, y = xy
            if x == y:
                edges[(i, j)] = (x, x)
            else:
                bit = r.read(1)
                edges[(i, j)] = (y, x) if bit == 0 else (x, y)
    if r.remaining:
        raise MalformedStream(f"{r.remaining} unread payload bits")
    return MarkedGraph(ms, n, base.tau, edges)


# -- compressed-domain queries --------------------------------------------

def _read_prefix(blob: CompressedBlob, mark_sets):
    """Type counts, residual set size and removed-edge total without unranking."""
    h, ms, r = _reader(blob, mark_sets)
    params = _params(h, ms)
    classes = params.classes()
    cw = width(h.n)
    counts_ = tuple(r.read(cw) for _ in classes)
    if sum(counts_) != h.n:
        raise MalformedStream("type counts do not sum to n")
    size = count_W(counts_, params)
    if size == 0:
        raise MalformedStream("type class described by the stream is empty")
    r.skip(width(size))
    rsize = r.read(width(h.n))
    r.skip(width(comb(h.n, rsize)))
    removed = sum(r.read(width(h.n * h.n)) for _ in mark_pairs(ms.ne))
    return h, ms, classes, counts_, rsize, removed


def query_pattern_count(blob: CompressedBlob, t: RootedMarkedGraph, mark_sets: MarkSets | None = None):
    """Vertices whose depth-k view matches ``t`` per the stored type counts, with an error bound.

    The bound counts vertices within distance ``k - 1`` of the residual set in
    the trimmed graph, estimated as ``|R| * (1 + delta + ... + delta^(k-1))``.
    """
    h, ms, classes, counts_, rsize, _ = _read_prefix(blob, mark_sets)
    if t.graph.mark_sets.nv != ms.nv or t.graph.mark_sets.ne != ms.ne:
        raise PatternOutOfBounds("pattern uses different mark alphabets")
    view = truncate(t.graph, t.root, t.depth)
    if view.radius() > h.k or view.graph.max_degree() > h.delta:
        raise PatternOutOfBounds(f"pattern exceeds depth {h.k} or degree {h.delta}")
    code = canonical_code(view)
    try:
        count = counts_[classes.index(code)]
    except ValueError:
        count = 0
    slack = min(h.n, rsize * sum(h.delta ** i for i in range(h.k)))
    return count, slack


def _root_triangles(code, ms) -> int:
    g = decode_code(code, ms).graph
    nb = list(g.adj[1])
    return sum(1 for x in range(len(nb)) for y in range(x + 1, len(nb)) if nb[y] in g.adj[nb[x]])


def triangle_count(blob: CompressedBlob, mark_sets: MarkSets | None = None):
    """Triangle count of the trimmed graph and a bound on triangles lost to trimming.

    Every lost triangle has all three corners in ``R`` and contains a removed
    edge, so ``min(C(|R|, 3), removed * (|R| - 2))`` bounds the difference.
    """
    h, ms, classes, counts_, rsize, removed = _read_prefix(blob, mark_sets)
    total = sum(c * _root_triangles(code, ms) for code, c in zip(classes, counts_) if c)
    if total % 3:
        raise MalformedStream("type counts imply a fractional triangle count")
    slack = min(comb(rsize, 3), removed * max(rsize - 2, 0))
    return total // 3, slack


def brute_triangles(g: MarkedGraph) -> int:
    t = 0
    for (i, j) in g.edges:
        for v in g.adj[i]:
            if v > j and v in g.adj[j]:
                t += 1
    return t


def pattern_count(g: MarkedGraph, t: RootedMarkedGraph, k: int) -> int:
    """Direct count of vertices whose depth-k view is isomorphic to ``t``."""
    target = canonical_code(truncate(t.graph, t.root, k))
    return sum(1 for v in range(1, g.n + 1) if canonical_code(truncate(g, v, k)) == target)


@dataclass(frozen=True)
class Breakdown:
    header_bits: int
    counts_bits: int
    rank_bits: int
    residual_bits: int
    w_size: int
    residual_size: int
    removed_edges: int
    padding_bits: int


def breakdown(blob: CompressedBlob, mark_sets: MarkSets | None = None) -> Breakdown:
    h, ms, classes, counts_, rsize, removed = _read_prefix(blob, mark_sets)
    size = count_W(counts_, _params(h, ms))
    cbits = len(classes) * width(h.n)
    rbits = width(size)
    return Breakdown(8 * h.offset, cbits, rbits, h.payload_bits - cbits - rbits, size, rsize,
                     removed, 8 * len(blob.data) - 8 * h.offset - h.payload_bits)


def inspect_blob(blob: CompressedBlob, mark_sets: MarkSets | None = None) -> str:
    h, ms, classes, counts_, rsize, removed = _read_prefix(blob, mark_sets)
    lines = [
        f"magic={MAGIC.decode()} version={VERSION}",
        f"n={h.n} vertex_marks={h.n_vertex_marks} edge_marks={h.n_edge_marks}",
        f"depth={h.k} max_degree={h.delta} payload_bits={h.payload_bits}",
        f"classes={len(classes)} residual={rsize} removed_edges={removed}",
        "index,count,class",
    ]
    for i, (code, c) in enumerate(zip(classes, counts_)):
        if c:
            lines.append(f"{i},{c},{code.hex()}")
    return "\n".join(lines) + "\n"

