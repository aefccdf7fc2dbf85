"""Empirical rooted distributions, neighbourhood type vectors, root statistics,
Lévy–Prokhorov distances and the finite involution identity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Callable

import networkx as nx
import numpy as np

from .errors import DegreeBoundViolated, DepthProfileMismatch, DepthTooSmall, FormatError, SupportTooLarge
from .graph import MarkSets, MarkedGraph, forget_marks
from .rooted import (
    DepthProfile,
    RootedClassCode,
    RootedMarkedGraph,
    canonical_code,
    class_code,
    decode_code,
    depth_profile,
    enumerate_classes,
    metric,
    pair_code,
    truncate,
)

ORACLE_MAX_SUPPORT = 16


@dataclass(frozen=True)
class Distribution:
    """Finitely supported probability measure on rooted classes, exact weights.

    ``depth`` is the truncation depth of every atom, or ``None`` for whole
    components.
    """

    atoms: dict
    depth: int | None
    mark_sets: MarkSets

    def __post_init__(self):
        atoms = {c: Fraction(w) for c, w in sorted(self.atoms.items())}
        if any(w <= 0 for w in atoms.values()):
            raise ValueError("atom weights must be positive")
        if sum(atoms.values()) != 1:
            raise ValueError("atom weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)

    def __getitem__(self, code: RootedClassCode) -> Fraction:
        return self.atoms.get(code, Fraction(0))

    def __len__(self):
        return len(self.atoms)

    def representative(self, code: RootedClassCode) -> RootedMarkedGraph:
        return decode_code(code, self.mark_sets)

    def profile(self, code: RootedClassCode) -> DepthProfile:
        return _atom_profile(code, self.depth, self.mark_sets)


@lru_cache(maxsize=1 << 16)
def _atom_profile(code, depth, mark_sets):
    r = decode_code(code, mark_sets)
    if depth is None:
        return depth_profile(r.graph, 1)
    return depth_profile(r.graph, 1, depth, complete=code.depth < depth)


def dirac(code: RootedClassCode, depth, mark_sets) -> Distribution:
    return Distribution({code: Fraction(1)}, depth, mark_sets)


def empirical(g: MarkedGraph, h: int | None = None) -> Distribution:
    """Uniform-root distribution of depth-``h`` neighbourhoods (whole components if ``None``)."""
    if g.n == 0:
        raise ValueError("empirical distribution of an empty graph")
    tally = {}
    for v in range(1, g.n + 1):
        c = class_code(g, v, h)
        tally[c] = tally.get(c, 0) + 1
    return Distribution({c: Fraction(k, g.n) for c, k in tally.items()}, h, g.mark_sets)


def truncate_distribution(mu: Distribution, h: int) -> Distribution:
    """Push ``mu`` forward through depth-``h`` truncation."""
    if mu.depth is not None and mu.depth < h:
        raise DepthTooSmall(f"cannot deepen a depth-{mu.depth} distribution to {h}")
    if mu.depth == h:
        return mu
    atoms = {}
    for code, w in mu.atoms.items():
        c = code if code.depth <= h else class_code(mu.representative(code).graph, 1, h)
        atoms[c] = atoms.get(c, Fraction(0)) + w
    return Distribution(atoms, h, mu.mark_sets)


# -- type vectors ---------------------------------------------------------

@dataclass(frozen=True)
class TypeVector:
    """Dense neighbourhood counts in the order of ``classes``."""

    classes: tuple
    counts: tuple

    def __post_init__(self):
        if len(self.classes) != len(self.counts):
            raise ValueError("counts and classes differ in length")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def __getitem__(self, code: RootedClassCode) -> int:
        try:
            return self.counts[self.classes.index(code)]
        except ValueError:
            return 0

    def sparse(self) -> dict:
        return {c: k for c, k in zip(self.classes, self.counts) if k}


def type_vector(g: MarkedGraph, k: int, delta: int, budget: int | None = None) -> TypeVector:
    if g.max_degree() > delta:
        raise DegreeBoundViolated(f"max degree {g.max_degree()} exceeds {delta}")
    classes = enumerate_classes(g.mark_sets, k, delta) if budget is None else \
        enumerate_classes(g.mark_sets, k, delta, budget)
    index = {c: i for i, c in enumerate(classes)}
    counts = [0] * len(classes)
    for v in range(1, g.n + 1):
        counts[index[class_code(g, v, k)]] += 1
    return TypeVector(classes, tuple(counts))


# -- statistics -----------------------------------------------------------

@dataclass(frozen=True)
class MeasureStats:
    deg: dict
    total_deg: Fraction
    vtype: dict


def stats(mu: Distribution) -> MeasureStats:
    """Expected directed root degrees and root-mark probabilities."""
    if mu.depth is not None and mu.depth < 1:
        raise DepthTooSmall("root degrees need depth at least 1")
    ne, nv = mu.mark_sets.ne, mu.mark_sets.nv
    deg = {(x, y): Fraction(0) for x in range(ne) for y in range(ne)}
    vtype = {t: Fraction(0) for t in range(nv)}
    for code, w in mu.atoms.items():
        g = mu.representative(code).graph
        vtype[g.tau[0]] += w
        for nb, toward_nb in g.adj[1].items():
            deg[(g.adj[nb][1], toward_nb)] += w
    return MeasureStats(deg, sum(deg.values(), Fraction(0)), vtype)


def event_probability(mu: Distribution, t: RootedMarkedGraph, h: int | None = None) -> Fraction:
    """Mass of atoms whose depth-``h`` truncation matches ``t`` (``h`` defaults to t's depth)."""
    if h is None:
        h = t.depth if t.depth is not None else t.radius()
    if mu.depth is not None and mu.depth < h:
        raise DepthTooSmall(f"distribution depth {mu.depth} below event depth {h}")
    target = canonical_code(truncate(t.graph, t.root, h))
    total = Fraction(0)
    for code, w in mu.atoms.items():
        if code.depth <= h:
            c = code
        else:
            c = class_code(mu.representative(code).graph, 1, h)
        if c == target:
            total += w
    return total


# -- Lévy–Prokhorov -------------------------------------------------------

def _support(mu: Distribution, nu: Distribution):
    if mu.mark_sets != nu.mark_sets:
        raise ValueError("distributions use different mark sets")
    codes = sorted(set(mu.atoms) | set(nu.atoms))
    denom = 1
    for w in list(mu.atoms.values()) + list(nu.atoms.values()):
        denom = lcm(denom, w.denominator)
    a = [int(mu[c] * denom) for c in codes]
    b = [int(nu[c] * denom) for c in codes]
    return codes, a, b, denom


def _distance_matrix(mu, nu, codes):
    prof_mu = {c: mu.profile(c) for c in codes}
    prof_nu = {c: nu.profile(c) for c in codes}
    if mu.depth != nu.depth and not _all_saturated(prof_mu, prof_nu, mu.depth, nu.depth):
        raise DepthProfileMismatch(f"distribution depths {mu.depth} and {nu.depth} differ")
    s = len(codes)
    d = [[Fraction(0)] * s for _ in range(s)]
    for i in range(s):
        for j in range(s):
            if i != j:
                d[i][j] = metric(prof_mu[codes[i]], prof_nu[codes[j]])
    return d


def _all_saturated(pa, pb, da, db):
    # comparing across depths is only meaningful when the shallower side saw everything
    if da is None:
        return all(p.saturated for p in pb.values())
    if db is None:
        return all(p.saturated for p in pa.values())
    shallow = pa if da < db else pb
    return all(p.saturated for p in shallow.values())


def _candidates(d):
    return sorted({Fraction(0)} | {x for row in d for x in row})


def lp_distance(mu: Distribution, nu: Distribution) -> Fraction:
    """Lévy–Prokhorov distance via max-flow couplings at each candidate radius."""
    codes, a, b, denom = _support(mu, nu)
    d = _distance_matrix(mu, nu, codes)
    s = len(codes)
    best = Fraction(1)
    for t in _candidates(d):
        if t >= best:
            break
        net = nx.DiGraph()
        for i in range(s):
            if a[i]:
                net.add_edge("src", ("a", i), capacity=a[i])
            if b[i]:
                net.add_edge(("b", i), "snk", capacity=b[i])
        for i in range(s):
            if not a[i]:
                continue
            for j in range(s):
                if b[j] and d[i][j] <= t:
                    net.add_edge(("a", i), ("b", j))
        if "src" in net and "snk" in net:
            flow = nx.maximum_flow_value(net, "src", "snk")
        else:
            flow = 0
        gap = Fraction(denom - flow, denom)
        best = min(best, max(t, gap))
    return best


def lp_distance_oracle(mu: Distribution, nu: Distribution) -> Fraction:
    """Exhaustive check over every subset of the combined support."""
    codes, a, b, denom = _support(mu, nu)
    s = len(codes)
    if s > ORACLE_MAX_SUPPORT:
        raise SupportTooLarge(f"combined support {s} exceeds {ORACLE_MAX_SUPPORT}")
    d = _distance_matrix(mu, nu, codes)
    a_arr = np.array(a, dtype=np.int64)
    b_arr = np.array(b, dtype=np.int64)
    mass_a = _subset_sums(a_arr)
    mass_b = _subset_sums(b_arr)
    best = Fraction(1)
    for t in _candidates(d):
        nb = np.array([sum(1 << j for j in range(s) if d[i][j] <= t) for i in range(s)], dtype=np.int64)
        nb_rev = np.array([sum(1 << i for i in range(s) if d[i][j] <= t) for j in range(s)], dtype=np.int64)
        grow = _subset_unions(nb)
        grow_rev = _subset_unions(nb_rev)
        gap = max(int((mass_a - mass_b[grow]).max()), int((mass_b - mass_a[grow_rev]).max()), 0)
        best = min(best, max(t, Fraction(gap, denom)))
    return best


def _subset_sums(w: np.ndarray) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for x in w:
        out = np.concatenate([out, out + x])
    return out


def _subset_unions(masks: np.ndarray) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for m in masks:
        out = np.concatenate([out, out | m])
    return out


# -- involution identity and mark support ---------------------------------

def involution_check(g: MarkedGraph, f: Callable[[RootedClassCode], Fraction], radius: int):
    """Both sides of the edge-swap identity under the uniform root measure."""
    lhs = Fraction(0)
    rhs = Fraction(0)
    for o in range(1, g.n + 1):
        for v in g.adj[o]:
            lhs += Fraction(f(pair_code(g, o, v, radius)))
            rhs += Fraction(f(pair_code(g, v, o, radius)))
    return lhs / g.n, rhs / g.n


def root_mark_support_check(g: MarkedGraph, theta0) -> bool:
    allowed = {g.mark_sets.vertex_index(t) for t in theta0}
    roots = {decode_code(c, g.mark_sets).graph.tau[0] for c in empirical(g, 0).atoms}
    premise = roots <= allowed
    return (not premise) or all(t in allowed for t in g.tau)


def forget_distribution(mu: Distribution) -> Distribution:
    """Push a distribution through the mark-forgetting map."""
    ms = mu.mark_sets.unmarked()
    out = {}
    for code, w in mu.atoms.items():
        r = mu.representative(code)
        c = canonical_code(RootedMarkedGraph(forget_marks(r.graph), 1))
        out[c] = out.get(c, Fraction(0)) + w
    return Distribution(out, mu.depth, ms)


# -- text format ----------------------------------------------------------

def format_distribution(mu: Distribution) -> str:
    depth = "full" if mu.depth is None else str(mu.depth)
    lines = [f"# depth={depth} vertex_marks={mu.mark_sets.nv} edge_marks={mu.mark_sets.ne}"]
    for code, w in mu.atoms.items():
        lines.append(f"{w.numerator} {w.denominator} {code.hex()}")
    return "\n".join(lines) + "\n"


def parse_distribution(text: str, mark_sets: MarkSets | None = None) -> Distribution:
    header = {}
    atoms = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    header[k] = v
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"bad distribution line: {line!r}")
        try:
            w = Fraction(int(parts[0]), int(parts[1]))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad weight in line: {line!r}") from None
        code = RootedClassCode.from_hex(parts[2])
        if code in atoms:
            raise FormatError(f"duplicate atom {parts[2]}")
        atoms[code] = w
    if "depth" not in header:
        raise FormatError("missing '# depth=' header")
    depth = None if header["depth"] == "full" else int(header["depth"])
    if mark_sets is None:
        try:
            mark_sets = MarkSets.of_sizes(int(header["vertex_marks"]), int(header["edge_marks"]))
        except KeyError:
            raise FormatError("missing mark alphabet sizes in header") from None
    try:
        return Distribution(atoms, depth, mark_sets)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
