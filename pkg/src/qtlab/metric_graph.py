"""Finite graphs as geodesic metric spaces.

A MetricGraph is a finite connected simple graph carrying its shortest-path
metric as a cached integer matrix.  On top of that sit the two workhorse
scans (four-point hyperbolicity, bottleneck constant), geodesic enumeration,
and the ends profile of a truncation with an explicit boundary set.

Conventions used by every scan in this module:

* scan order, witnesses and tie-breaks follow lexicographic order on vertex
  ids, never insertion order;
* hyperbolicity delta is stored exactly as the numerator of 2*delta;
* balls B(z, c) are closed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CenterNotFound,
    DisconnectedGraph,
    EmptyGraph,
    FormatError,
    RadiusTooLarge,
    SizeLimitExceeded,
    VertexNotFound,
)

DELTA_DEFAULT_CAP = 200
BOTTLENECK_DEFAULT_CAP = 500
GEODESIC_DEFAULT_CAP = 10000


def resolve_cap(cap: Optional[int], default: int) -> int:
    """Explicit argument beats QTLAB_MAX_VERTICES beats the built-in default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get("QTLAB_MAX_VERTICES")
    if env:
        return int(env)
    return default


class MetricGraph:
    """Finite simple graph with precomputed BFS distances.

    Vertex ids are strings.  Edges are unordered pairs; loops and duplicate
    edges are rejected.  Unless allow_disconnected is set, the graph must be
    connected (unreachable entries would otherwise sit at -1 in dist).
    """

    def __init__(self, vertex_ids, edges, boundary=(), allow_disconnected=False):
        ids = [str(v) for v in vertex_ids]
        if not ids:
            raise EmptyGraph("graph has no vertices")
        if len(set(ids)) != len(ids):
            raise FormatError("duplicate vertex ids")
        self.vertex_ids = tuple(ids)
        self._index = {v: i for i, v in enumerate(ids)}
        n = len(ids)

        seen = set()
        pairs = []
        for e in edges:
            a, b = e
            for end in (a, b):
                if end not in self._index:
                    raise VertexNotFound(f"edge endpoint {end!r} is not a vertex")
            i, j = self._index[a], self._index[b]
            if i == j:
                raise FormatError(f"self-loop at {a!r}")
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise FormatError(f"duplicate edge {a!r} - {b!r}")
            seen.add(key)
            pairs.append(key)
        pairs.sort()
        self.edge_pairs = tuple(pairs)

        for v in boundary:
            if v not in self._index:
                raise VertexNotFound(f"boundary vertex {v!r} is not a vertex")
        self.boundary = tuple(str(v) for v in boundary)

        deg = np.zeros(n, dtype=np.int64)
        for i, j in pairs:
            deg[i] += 1
            deg[j] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(len(pairs) * 2, dtype=np.int32)
        fill = indptr[:-1].copy()
        for i, j in pairs:
            indices[fill[i]] = j
            fill[i] += 1
            indices[fill[j]] = i
            fill[j] += 1
        # neighbor lists sorted by index so BFS layers come out deterministic
        for i in range(n):
            indices[indptr[i]:indptr[i + 1]].sort()
        self._indptr = indptr
        self._indices = indices

        dist = _kernels.apsp(indptr, indices, n)
        self.connected = bool((dist >= 0).all())
        if not self.connected and not allow_disconnected:
            src = 0
            missing = int(np.nonzero(dist[0] < 0)[0][0])
            raise DisconnectedGraph(ids[src], ids[missing])
        dist.setflags(write=False)
        self.dist = dist

    # -- basic accessors ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_pairs)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise VertexNotFound(f"no vertex {v!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._index

    def d(self, u: str, v: str) -> int:
        """Shortest-path distance between two vertex ids (-1 if unreachable)."""
        return int(self.dist[self.index(u), self.index(v)])

    def neighbors(self, v: str):
        i = self.index(v)
        return tuple(self.vertex_ids[j] for j in self._indices[self._indptr[i]:self._indptr[i + 1]])

    def neighbor_indices(self, i: int):
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    def degree(self, v: str) -> int:
        i = self.index(v)
        return int(self._indptr[i + 1] - self._indptr[i])

    def edges(self):
        """Edges as id pairs, sorted."""
        return tuple((self.vertex_ids[i], self.vertex_ids[j]) for i, j in self.edge_pairs)

    def has_edge(self, u: str, v: str) -> bool:
        i, j = self.index(u), self.index(v)
        key = (i, j) if i < j else (j, i)
        return key in self._edge_set()

    def _edge_set(self):
        cached = getattr(self, "_edge_set_cache", None)
        if cached is None:
            cached = set(self.edge_pairs)
            self._edge_set_cache = cached
        return cached

    def is_tree(self) -> bool:
        return self.connected and self.n_edges == self.n - 1

    def id_order(self) -> np.ndarray:
        """Permutation of indices sorting vertices by id."""
        return np.array(sorted(range(self.n), key=lambda i: self.vertex_ids[i]), dtype=np.int64)

    def __repr__(self):
        return f"MetricGraph({self.n} vertices, {self.n_edges} edges)"


def all_pairs_distances(vertex_ids, edges, boundary=()) -> MetricGraph:
    """Build a MetricGraph, computing the full distance matrix by BFS."""
    return MetricGraph(vertex_ids, edges, boundary=boundary)


def _permuted_csr(g: MetricGraph, order: np.ndarray):
    """CSR adjacency of g relabeled so index k means the k-th vertex in id order."""
    n = g.n
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    deg = np.zeros(n, dtype=np.int64)
    for i, j in g.edge_pairs:
        deg[pos[i]] += 1
        deg[pos[j]] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(g.n_edges * 2, dtype=np.int32)
    fill = indptr[:-1].copy()
    for i, j in g.edge_pairs:
        a, b = pos[i], pos[j]
        indices[fill[a]] = b
        fill[a] += 1
        indices[fill[b]] = a
        fill[b] += 1
    for i in range(n):
        indices[indptr[i]:indptr[i + 1]].sort()
    return indptr, indices


# ---------------------------------------------------------------------------
# hyperbolicity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicityReport:
    """Exact four-point hyperbolicity constant of a finite graph.

    two_delta holds 2*delta as an integer; witness is the first ordered
    quadruple (x, y, z, w) in id-lexicographic order whose defect

        min((x.z)_w, (z.y)_w) - (x.y)_w

    attains delta.
    """

    two_delta: int
    witness: tuple
    n_vertices: int

    @property
    def delta(self) -> Fraction:
        return Fraction(self.two_delta, 2)


def hyperbolicity_delta(g: MetricGraph, max_vertices: Optional[int] = None) -> HyperbolicityReport:
    cap = resolve_cap(max_vertices, DELTA_DEFAULT_CAP)
    if g.n > cap:
        raise SizeLimitExceeded(g.n, cap, "hyperbolicity_delta")
    if not g.connected:
        raise DisconnectedGraph(*_disconnected_pair(g))
    order = g.id_order()
    Dp = np.ascontiguousarray(g.dist[np.ix_(order, order)])
    two_delta, x, y, z, w = _kernels.delta_scan(Dp)
    ids = g.vertex_ids
    witness = (ids[order[x]], ids[order[y]], ids[order[z]], ids[order[w]])
    return HyperbolicityReport(int(two_delta), witness, g.n)


def four_point_defect2(g: MetricGraph, x: str, y: str, z: str, w: str) -> int:
    """2 * (min((x.z)_w, (z.y)_w) - (x.y)_w); recomputes a witness defect."""
    D = g.dist
    xi, yi, zi, wi = (g.index(v) for v in (x, y, z, w))
    s1 = int(D[xi, yi]) + int(D[zi, wi])
    s2 = int(D[xi, zi]) + int(D[yi, wi])
    s3 = int(D[xi, wi]) + int(D[yi, zi])
    return s1 - max(s2, s3)


def _disconnected_pair(g: MetricGraph):
    bad = np.argwhere(g.dist < 0)
    i, j = bad[0]
    return g.vertex_ids[int(i)], g.vertex_ids[int(j)]


# ---------------------------------------------------------------------------
# bottleneck constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BottleneckWitness:
    x: str
    y: str
    z: str
    avoiding_path: tuple  # x..y path missing B(z, constant - 1)


@dataclass(frozen=True)
class BottleneckReport:
    """Least C such that for every pair (x, y) and every z lying on a
    geodesic between them, deleting the closed ball B(z, C) disconnects x
    from y or swallows one of them.  witness is None iff constant == 0;
    otherwise avoiding_path shows that constant - 1 fails.
    """

    constant: int
    witness: Optional[BottleneckWitness]
    n_vertices: int


def bottleneck_constant(g: MetricGraph, max_vertices: Optional[int] = None) -> BottleneckReport:
    cap = resolve_cap(max_vertices, BOTTLENECK_DEFAULT_CAP)
    if g.n > cap:
        raise SizeLimitExceeded(g.n, cap, "bottleneck_constant")
    if not g.connected:
        raise DisconnectedGraph(*_disconnected_pair(g))
    order = g.id_order()
    Dp = np.ascontiguousarray(g.dist[np.ix_(order, order)])
    indptr, indices = _permuted_csr(g, order)
    n = g.n
    diam = int(Dp.max())
    best = 0
    wit = None
    for z in range(n):
        ecc = int(Dp[z].max())
        c_hi = min(ecc - 1, diam // 2)
        t, x, y = _kernels.bottleneck_center(Dp, indptr, indices, z, best, c_hi)
        if t > best:
            best = int(t)
            wit = (int(x), int(y), z)
    if best == 0:
        return BottleneckReport(0, None, n)
    x, y, z = wit
    path = _avoiding_path(Dp, indptr, indices, x, y, z, best - 1)
    ids = g.vertex_ids
    witness = BottleneckWitness(
        ids[order[x]], ids[order[y]], ids[order[z]],
        tuple(ids[order[v]] for v in path),
    )
    return BottleneckReport(best, witness, n)


def _avoiding_path(Dp, indptr, indices, x, y, z, radius):
    """BFS path x..y through vertices with d(z, .) > radius (must exist)."""
    n = Dp.shape[0]
    r = Dp[z]
    prev = np.full(n, -1, dtype=np.int64)
    prev[x] = x
    queue = [x]
    while queue:
        nxt = []
        for u in queue:
            if u == y:
                queue = []
                break
            for v in indices[indptr[u]:indptr[u + 1]]:
                v = int(v)
                if prev[v] < 0 and r[v] > radius:
                    prev[v] = u
                    nxt.append(v)
        else:
            queue = nxt
            continue
        break
    assert prev[y] >= 0, "witness path must exist at constant - 1"
    path = [y]
    while path[-1] != x:
        path.append(int(prev[path[-1]]))
    path.reverse()
    return path


@dataclass(frozen=True)
class QuasitreeResult:
    passed: bool
    c_max: int
    report: BottleneckReport


def is_quasitree(g: MetricGraph, c_max: int, max_vertices: Optional[int] = None) -> QuasitreeResult:
    """Bottleneck test: passes iff the exact constant is <= c_max."""
    report = bottleneck_constant(g, max_vertices=max_vertices)
    return QuasitreeResult(report.constant <= c_max, c_max, report)


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicsResult:
    sequences: tuple  # tuple of vertex-id tuples, lexicographic order
    overflow: bool    # True when the cap cut off the enumeration

    @property
    def count(self) -> int:
        return len(self.sequences)


def enumerate_geodesics(g: MetricGraph, u: str, v: str, cap: int = GEODESIC_DEFAULT_CAP) -> GeodesicsResult:
    """All geodesic vertex sequences from u to v in lexicographic id order.

    Walks the shortest-path DAG depth-first with neighbors in id order, so
    output order is the lexicographic order on sequences.  Stops after cap
    sequences and flags overflow.
    """
    ui, vi = g.index(u), g.index(v)
    if g.dist[ui, vi] < 0:
        raise DisconnectedGraph(u, v)
    target = g.dist[:, vi]
    out = []
    overflow = False
    stack = [(ui, [ui])]
    while stack:
        node, path = stack.pop()
        if node == vi:
            if len(out) >= cap:
                overflow = True
                break
            out.append(tuple(g.vertex_ids[i] for i in path))
            continue
        nxt = [int(w) for w in g.neighbor_indices(node) if target[w] == target[node] - 1]
        nxt.sort(key=lambda i: g.vertex_ids[i], reverse=True)  # stack pops smallest id first
        for w in nxt:
            stack.append((w, path + [w]))
    return GeodesicsResult(tuple(out), overflow)


# ---------------------------------------------------------------------------
# ends profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndsProfile:
    """Component counts of g minus B(center, radius), restricted to
    components containing at least one designated boundary vertex."""

    center: str
    radius: int
    component_count: int
    counts_by_radius: tuple  # counts at radii 0..radius


def ends_profile(g: MetricGraph, center: str, radius: int, boundary: Optional[Sequence[str]] = None) -> EndsProfile:
    if not g.has_vertex(center):
        raise CenterNotFound(f"no vertex {center!r}")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if boundary is None:
        boundary = g.boundary
    bset = set()
    for b in boundary:
        if not g.has_vertex(b):
            raise VertexNotFound(f"boundary vertex {b!r} is not a vertex")
        bset.add(g.index(b))
    ci = g.index(center)
    ball = g.dist[ci]
    if bset and all(ball[b] <= radius for b in bset):
        raise RadiusTooLarge(
            f"B({center!r}, {radius}) swallows every boundary vertex; profile uninformative"
        )
    counts = []
    for rad in range(radius + 1):
        counts.append(_boundary_components(g, ball, rad, bset))
    return EndsProfile(center, radius, counts[-1], tuple(counts))


def _boundary_components(g: MetricGraph, ball, rad, bset) -> int:
    alive = ball > rad
    seen = np.zeros(g.n, dtype=bool)
    count = 0
    for s in range(g.n):
        if not alive[s] or seen[s]:
            continue
        comp = [s]
        seen[s] = True
        touches = s in bset
        head = 0
        while head < len(comp):
            u = comp[head]
            head += 1
            for v in g.neighbor_indices(u):
                v = int(v)
                if alive[v] and not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    if v in bset:
                        touches = True
        if touches:
            count += 1
    return count
