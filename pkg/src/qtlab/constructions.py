"""Builders for the example spaces and actions used across the package.

Everything here returns finite truncations.  A builder that truncates an
infinite object marks the cut locus in ``graph.boundary`` so downstream
checks can tell "really has degree 3" from "ran out of window".  Actions are
emitted in automorphism mode with partial generator maps: a generator is
simply undefined wherever its image would leave the truncation.

The group-table machinery is deliberately tiny: ordered element names and a
dense multiplication dict.  It only needs to support the coset-tree and
finite Cayley constructions, not general group theory.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import FormatError, InvalidChain, UnknownFamily
from .metric_graph import MetricGraph
from .group_action import GroupAction


@dataclass
class Construction:
    """A built space plus the bundled action and a sensible basepoint.

    extras holds builder-specific data (end rays, coset levels, apex ids)
    keyed by plain strings so fixtures can serialize it untyped.
    """

    graph: MetricGraph
    action: Optional[GroupAction]
    basepoint: str
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# plain graphs
# ---------------------------------------------------------------------------


def _pad_ids(prefix: str, n: int) -> List[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{k:0{width}d}" for k in range(n)]


def path_graph(n: int) -> MetricGraph:
    if n < 1:
        raise FormatError("path needs at least one vertex")
    ids = _pad_ids("v", n)
    return MetricGraph(ids, [(ids[k], ids[k + 1]) for k in range(n - 1)])


def cycle_graph(n: int) -> MetricGraph:
    if n < 3:
        raise FormatError("cycle needs at least three vertices")
    ids = _pad_ids("v", n)
    edges = [(ids[k], ids[(k + 1) % n]) for k in range(n)]
    return MetricGraph(ids, edges)


def grid_graph(m: int, n: int) -> MetricGraph:
    if m < 1 or n < 1:
        raise FormatError("grid needs positive side lengths")
    wi, wj = len(str(m - 1)), len(str(n - 1))
    vid = lambda i, j: f"{i:0{wi}d},{j:0{wj}d}"
    ids = [vid(i, j) for i in range(m) for j in range(n)]
    edges = []
    for i in range(m):
        for j in range(n):
            if i + 1 < m:
                edges.append((vid(i, j), vid(i + 1, j)))
            if j + 1 < n:
                edges.append((vid(i, j), vid(i, j + 1)))
    return MetricGraph(ids, edges)


def star_graph(leaves: int) -> MetricGraph:
    if leaves < 1:
        raise FormatError("star needs at least one leaf")
    leaf_ids = _pad_ids("l", leaves)
    return MetricGraph(["c"] + leaf_ids, [("c", l) for l in leaf_ids])


def regular_tree(degree: int, depth: int) -> MetricGraph:
    """Rooted truncation of the degree-regular tree: the root has `degree`
    children, every other internal vertex degree-1 children.  Ids encode the
    child path, so "r21" is child 1 of child 2 of the root."""
    if degree < 2:
        raise FormatError("regular tree needs degree >= 2")
    if degree > 10:
        raise FormatError("ids use one digit per branching step; degree > 10 unsupported")
    if depth < 0:
        raise FormatError("depth must be >= 0")
    ids = ["r"]
    edges = []
    frontier = ["r"]
    for level in range(depth):
        nxt = []
        for v in frontier:
            fanout = degree if v == "r" else degree - 1
            for c in range(fanout):
                child = v + str(c)
                ids.append(child)
                edges.append((v, child))
                nxt.append(child)
        frontier = nxt
    g = MetricGraph(ids, edges, boundary=frontier if depth > 0 else ())
    return g


def rips_graph(g: MetricGraph, r: int) -> MetricGraph:
    """Same vertices, edge iff 0 < d(x,y) <= r."""
    if r < 0:
        raise FormatError("r must be >= 0")
    close = np.triu((g.dist > 0) & (g.dist <= r), 1)
    edges = [(g.vertex_ids[i], g.vertex_ids[j]) for i, j in np.argwhere(close)]
    return MetricGraph(g.vertex_ids, edges, boundary=g.boundary,
                       allow_disconnected=(r == 0 or not g.connected))


# ---------------------------------------------------------------------------
# finite group tables
# ---------------------------------------------------------------------------


ASSOC_CHECK_CAP = 60


class FiniteGroupTable:
    """Ordered element names plus a complete multiplication dict.

    Associativity is checked exhaustively up to ASSOC_CHECK_CAP elements
    (216k products at the cap); beyond that the table is trusted.  Identity
    and inverses are always verified.
    """

    def __init__(self, elements: Sequence[str], mult: Dict[Tuple[str, str], str],
                 chain: Optional[Sequence[Sequence[str]]] = None):
        self.elements = tuple(str(e) for e in elements)
        if not self.elements:
            raise FormatError("group table needs at least one element")
        if len(set(self.elements)) != len(self.elements):
            raise FormatError("duplicate element names")
        eset = set(self.elements)
        self.mult = dict(mult)
        for a in self.elements:
            for b in self.elements:
                c = self.mult.get((a, b))
                if c is None:
                    raise FormatError(f"multiplication table missing ({a!r}, {b!r})")
                if c not in eset:
                    raise FormatError(f"product {a!r}*{b!r} = {c!r} is not an element")
        ident = None
        for e in self.elements:
            if all(self.mult[(e, a)] == a and self.mult[(a, e)] == a for a in self.elements):
                ident = e
                break
        if ident is None:
            raise FormatError("table has no identity element")
        self.identity = ident
        self._inv = {}
        for a in self.elements:
            for b in self.elements:
                if self.mult[(a, b)] == ident and self.mult[(b, a)] == ident:
                    self._inv[a] = b
                    break
            else:
                raise FormatError(f"element {a!r} has no inverse")
        if len(self.elements) <= ASSOC_CHECK_CAP:
            for a in self.elements:
                for b in self.elements:
                    ab = self.mult[(a, b)]
                    for c in self.elements:
                        if self.mult[(ab, c)] != self.mult[(a, self.mult[(b, c)])]:
                            raise FormatError(
                                f"multiplication is not associative at ({a!r},{b!r},{c!r})")
        self.chain = tuple(tuple(h) for h in chain) if chain is not None else None

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: str, b: str) -> str:
        return self.mult[(a, b)]

    def inv(self, a: str) -> str:
        return self._inv[a]

    def is_subgroup(self, subset: Sequence[str]) -> bool:
        s = set(subset)
        if not s or not s.issubset(self.elements) or self.identity not in s:
            return False
        return all(self.mult[(a, b)] in s for a in s for b in s)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroupTable":
        if n < 1:
            raise FormatError("cyclic group needs n >= 1")
        names = _pad_ids("g", n)
        mult = {(names[i], names[j]): names[(i + j) % n]
                for i in range(n) for j in range(n)}
        return cls(names, mult)

    @classmethod
    def direct_product(cls, a: "FiniteGroupTable", b: "FiniteGroupTable") -> "FiniteGroupTable":
        names = [f"{x}|{y}" for x in a.elements for y in b.elements]
        mult = {}
        for x1 in a.elements:
            for y1 in b.elements:
                for x2 in a.elements:
                    for y2 in b.elements:
                        mult[(f"{x1}|{y1}", f"{x2}|{y2}")] = \
                            f"{a.mul(x1, x2)}|{b.mul(y1, y2)}"
        return cls(names, mult)


def c6_chain() -> Tuple[FiniteGroupTable, Tuple[Tuple[str, ...], ...]]:
    table = FiniteGroupTable.cyclic(6)
    chain = (("g0",), ("g0", "g3"), table.elements)
    return table, chain


def c30_chain() -> Tuple[FiniteGroupTable, Tuple[Tuple[str, ...], ...]]:
    """C2 x C3 x C5 with the chain {e} < C2 < C2xC3 < C2xC3xC5."""
    table = FiniteGroupTable.direct_product(
        FiniteGroupTable.direct_product(FiniteGroupTable.cyclic(2),
                                        FiniteGroupTable.cyclic(3)),
        FiniteGroupTable.cyclic(5))

    def pick(keep):
        return tuple(e for e in table.elements if keep(e.split("|")))

    chain = (
        pick(lambda p: p == ["g0", "g0", "g0"]),
        pick(lambda p: p[1] == "g0" and p[2] == "g0"),
        pick(lambda p: p[2] == "g0"),
        table.elements,
    )
    return table, chain


# ---------------------------------------------------------------------------
# coset tree
# ---------------------------------------------------------------------------


def _validate_chain(table: FiniteGroupTable, chain) -> List[Tuple[str, ...]]:
    if chain is None:
        chain = table.chain
    if not chain:
        raise InvalidChain("no subgroup chain given")
    out = [tuple(h) for h in chain]
    if set(out[0]) != {table.identity}:
        raise InvalidChain("chain must start at the trivial subgroup")
    prev = None
    for i, h in enumerate(out):
        if not table.is_subgroup(h):
            raise InvalidChain(f"chain level {i} is not a subgroup")
        if prev is not None and not set(prev).issubset(h):
            raise InvalidChain(f"chain level {i} does not contain level {i - 1}")
        prev = h
    return out


def coset_tree(table: FiniteGroupTable, chain=None) -> Construction:
    """Tree of nested cosets: level-i vertices are the cosets of chain[i],
    with an edge from each coset to the level-(i+1) coset containing it.

    When the chain ends at the whole group (and did not stall there), an
    extra apex vertex is attached above the single top coset; it stands in
    for the next, uncomputed level of an increasing chain and gives the top
    coset the same [G_i : G_{i-1}] + 1 valence as the interior levels.  The
    whole group acts by left multiplication (every non-identity element is a
    generator); the apex is fixed by everything.
    """
    chain = _validate_chain(table, chain)
    k = len(chain) - 1
    full = set(table.elements)

    # per level: element -> coset id, plus the ordered coset member lists
    level_ids: List[List[str]] = []
    coset_of: List[Dict[str, str]] = []
    members: List[Dict[str, Tuple[str, ...]]] = []
    for i, h in enumerate(chain):
        seen: Dict[str, Tuple[str, ...]] = {}
        assign: Dict[str, str] = {}
        for g in table.elements:
            cos = tuple(sorted(table.mul(g, x) for x in h))
            rep = cos[0]
            vid = f"lv{i}_{rep}"
            seen.setdefault(vid, cos)
            assign[g] = vid
        level_ids.append(sorted(seen))
        coset_of.append(assign)
        members.append(seen)

    edges = []
    for i in range(k):
        for vid, cos in members[i].items():
            edges.append((vid, coset_of[i + 1][cos[0]]))

    apex = None
    if k >= 1 and set(chain[k]) == full and set(chain[k]) != set(chain[k - 1]):
        apex = "apex"
        edges.append((level_ids[k][0], apex))

    ids = [vid for lv in level_ids for vid in lv] + ([apex] if apex else [])
    top_count = len(level_ids[k])
    graph = MetricGraph(ids, edges,
                        allow_disconnected=(apex is None and (top_count > 1 or k == 0 and len(ids) > 1)))

    gens = []
    for g in table.elements:
        if g == table.identity:
            continue
        fwd = {}
        for i in range(k + 1):
            for vid, cos in members[i].items():
                fwd[vid] = coset_of[i][table.mul(g, cos[0])]
        if apex:
            fwd[apex] = apex
        gens.append((g, fwd))
    action = GroupAction(graph, gens, mode="automorphism")

    base_ids = [coset_of[i][table.identity] for i in range(k + 1)]
    stab_sizes = [sum(1 for g in table.elements
                      if coset_of[i][table.mul(g, table.identity)] == base_ids[i])
                  for i in range(k + 1)]
    valences = [graph.degree(base_ids[i]) for i in range(k + 1)]
    index_ratios = [len(chain[i]) // len(chain[i - 1]) for i in range(1, k + 1)]
    return Construction(
        graph, action, base_ids[0],
        extras={
            "levels": level_ids,
            "apex": apex,
            "stabilizer_sizes": stab_sizes,
            "valences": valences,
            "index_ratios": index_ratios,
        })


# ---------------------------------------------------------------------------
# Cayley-ball families
# ---------------------------------------------------------------------------


def _ball_bfs(start, steps, radius):
    """BFS over an implicit graph up to the given depth; steps(v) yields
    neighbors in a fixed order.  Returns insertion-ordered
    {vertex: word length}."""
    dist = {start: 0}
    frontier = [start]
    for depth in range(radius):
        nxt = []
        for v in frontier:
            for u in steps(v):
                if u not in dist:
                    dist[u] = depth + 1
                    nxt.append(u)
        frontier = nxt
    return dist


_F2_INV = {"x": "X", "X": "x", "y": "Y", "Y": "y"}


def _f2_mul(left: str, word: str) -> str:
    out = list(left)
    for ch in word:
        if out and out[-1] == _F2_INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def cayley_graph(family: str, radius: int, gens=None,
                 table: Optional[FiniteGroupTable] = None) -> Construction:
    """Ball of the given radius in a Cayley graph.  Edges come from right
    multiplication by generators, the action from left multiplication (which
    is how left multiplication ends up a graph automorphism).  Frontier
    vertices (word length exactly `radius`) are marked boundary.

    Families: "Z" (gens: nonzero ints, default (1,)), "Z2" (gens: int pairs,
    default unit steps), "F2" (free group on x, y), "finite" (needs `table`
    and generator element names).
    """
    if radius < 0:
        raise FormatError("radius must be >= 0")

    if family == "Z":
        steps = tuple(gens) if gens else (1,)
        if not steps or any(not isinstance(g, int) or g == 0 for g in steps):
            raise FormatError("Z generators must be nonzero integers")
        reach = {}
        frontier = [0]
        reach[0] = 0
        for depth in range(radius):
            nxt = []
            for v in frontier:
                for g in steps:
                    for u in (v + g, v - g):
                        if u not in reach:
                            reach[u] = depth + 1
                            nxt.append(u)
            frontier = nxt
        vid = lambda v: str(v)
        edges = set()
        for v in reach:
            for g in steps:
                if v + g in reach:
                    edges.add(tuple(sorted((vid(v), vid(v + g)))))
        names = ["s"] if len(steps) == 1 else [f"s{g}" for g in steps]
        gen_maps = []
        for g, name in zip(steps, names):
            gen_maps.append((name, {vid(v): vid(v + g) for v in reach if v + g in reach}))
        boundary = [vid(v) for v, d in reach.items() if d == radius]
        graph = MetricGraph(sorted(vid(v) for v in reach), sorted(edges), boundary=boundary)
        action = GroupAction(graph, gen_maps, mode="automorphism")
        return Construction(graph, action, "0", extras={"family": family, "radius": radius})

    if family == "Z2":
        steps = tuple(tuple(g) for g in gens) if gens else ((1, 0), (0, 1))
        if not steps or any(len(g) != 2 or g == (0, 0) for g in steps):
            raise FormatError("Z2 generators must be nonzero integer pairs")
        reach = {(0, 0): 0}
        frontier = [(0, 0)]
        for depth in range(radius):
            nxt = []
            for v in frontier:
                for g in steps:
                    for u in ((v[0] + g[0], v[1] + g[1]), (v[0] - g[0], v[1] - g[1])):
                        if u not in reach:
                            reach[u] = depth + 1
                            nxt.append(u)
            frontier = nxt
        vid = lambda v: f"{v[0]},{v[1]}"
        edges = set()
        for v in reach:
            for g in steps:
                u = (v[0] + g[0], v[1] + g[1])
                if u in reach:
                    edges.add(tuple(sorted((vid(v), vid(u)))))
        if steps == ((1, 0), (0, 1)):
            names = ["sx", "sy"]
        else:
            names = [f"s{k}" for k in range(len(steps))]
        gen_maps = []
        for g, name in zip(steps, names):
            fwd = {}
            for v in reach:
                u = (v[0] + g[0], v[1] + g[1])
                if u in reach:
                    fwd[vid(v)] = vid(u)
            gen_maps.append((name, fwd))
        boundary = [vid(v) for v, d in reach.items() if d == radius]
        graph = MetricGraph(sorted(vid(v) for v in reach), sorted(edges), boundary=boundary)
        action = GroupAction(graph, gen_maps, mode="automorphism")
        return Construction(graph, action, "0,0", extras={"family": family, "radius": radius})

    if family == "F2":
        if gens is not None:
            raise FormatError("F2 generators are fixed (x, y)")
        words = [""]
        frontier = [""]
        for depth in range(radius):
            nxt = []
            for w in frontier:
                for l in "xXyY":
                    u = _f2_mul(w, l)      # right multiply
                    if len(u) > len(w):
                        words.append(u)
                        nxt.append(u)
            frontier = nxt
        vid = lambda w: w if w else "e"
        edges = [(vid(w), vid(w[:-1])) for w in words if w]
        gen_maps = []
        for l in ("x", "y"):
            fwd = {}
            for w in words:
                u = _f2_mul(l, w)          # left multiply
                if len(u) <= radius:
                    fwd[vid(w)] = vid(u)
            gen_maps.append((l, fwd))
        boundary = [vid(w) for w in words if len(w) == radius]
        graph = MetricGraph(sorted(vid(w) for w in words), sorted(edges), boundary=boundary)
        action = GroupAction(graph, gen_maps, mode="automorphism")
        return Construction(graph, action, "e", extras={"family": family, "radius": radius})

    if family == "finite":
        if table is None:
            raise FormatError("finite family needs a group table")
        if not gens:
            raise FormatError("finite family needs generator element names")
        sg = [str(g) for g in gens]
        for g in sg:
            if g not in table.elements:
                raise FormatError(f"generator {g!r} is not a table element")
            if g == table.identity:
                raise FormatError("identity is not a useful generator")
        reach = {table.identity: 0}
        frontier = [table.identity]
        for depth in range(radius):
            nxt = []
            for v in frontier:
                for g in sg:
                    for u in (table.mul(v, g), table.mul(v, table.inv(g))):
                        if u not in reach:
                            reach[u] = depth + 1
                            nxt.append(u)
            frontier = nxt
        edges = set()
        for v in reach:
            for g in sg:
                u = table.mul(v, g)
                if u in reach and u != v:
                    edges.add(tuple(sorted((v, u))))
        gen_maps = []
        for g in sg:
            fwd = {v: table.mul(g, v) for v in reach if table.mul(g, v) in reach}
            gen_maps.append((g, fwd))
        boundary = [v for v, d in reach.items() if d == radius]
        graph = MetricGraph(sorted(reach), sorted(edges), boundary=boundary)
        action = GroupAction(graph, gen_maps, mode="automorphism")
        return Construction(graph, action, table.identity,
                            extras={"family": family, "radius": radius})

    raise UnknownFamily(f"unknown Cayley family {family!r}")


# ---------------------------------------------------------------------------
# Farey graph
# ---------------------------------------------------------------------------


def farey_graph(Q: int, P: Optional[int] = None) -> Construction:
    """Farey graph truncation: infinity (= 1/0) plus every reduced p/q with
    1 <= q <= Q and |p| <= P, adjacent when |ps - qr| = 1.  Generators
    S: z -> -1/z and T: z -> z + 1 act as partial maps.  Both caps are
    needed for finiteness; vertices within one step of either cap are marked
    boundary.
    """
    if Q < 1:
        raise FormatError("Q must be >= 1")
    if P is None:
        P = 3 * Q
    if P < 1:
        raise FormatError("P must be >= 1")

    fracs = [(1, 0)]
    for q in range(1, Q + 1):
        for p in range(-P, P + 1):
            if gcd(abs(p), q) == 1:
                fracs.append((p, q))

    def vid(pq):
        p, q = pq
        if q == 0:
            return "inf"
        return str(p) if q == 1 else f"{p}/{q}"

    nums = np.array([p for p, q in fracs], dtype=np.int64)
    dens = np.array([q for p, q in fracs], dtype=np.int64)
    det = np.abs(nums[:, None] * dens[None, :] - dens[:, None] * nums[None, :])
    hit = np.triu(det == 1, 1)
    ids = [vid(f) for f in fracs]
    edges = [(ids[i], ids[j]) for i, j in np.argwhere(hit)]

    boundary = [vid((p, q)) for p, q in fracs if q > 0 and (q >= Q - 1 or abs(p) >= P - 1)]

    in_range = {f: vid(f) for f in fracs}

    def canon(p, q):
        if q < 0:
            p, q = -p, -q
        return (p, q)

    s_map = {}
    t_map = {}
    for p, q in fracs:
        img = canon(-q, p)
        if img in in_range:
            s_map[vid((p, q))] = in_range[img]
        img = canon(p + q, q)
        if img in in_range:
            t_map[vid((p, q))] = in_range[img]

    graph = MetricGraph(ids, edges, boundary=boundary)
    action = GroupAction(graph, [("S", s_map), ("T", t_map)], mode="automorphism")
    return Construction(graph, action, "inf", extras={"Q": Q, "P": P})


# ---------------------------------------------------------------------------
# Bass-Serre tree of BS(1,2)
# ---------------------------------------------------------------------------
#
# BS(1,2) = <a, t | t a t^-1 = a^2> acts on the 2-adic affine line, a as
# x -> x + 1 and t as x -> 2x.  Cosets of <a> correspond to 2-adic balls,
# encoded (m, r): the set of points congruent to r mod 2^m, with r a dyadic
# rational in [0, 2^m).  Each ball splits into two at level m+1 and sits
# inside one at level m-1, giving a 3-regular tree; the parent chain
# m -> -infinity is the end fixed by the whole group.


def _bs_vid(m: int, r: Fraction) -> str:
    return f"m{m}:{r.numerator}/{r.denominator}"


def bass_serre_tree_bs12(radius: int) -> Construction:
    if radius < 1:
        raise FormatError("radius must be >= 1")

    def parent(v):
        m, r = v
        return (m - 1, r % (Fraction(2) ** (m - 1)))

    def children(v):
        m, r = v
        step = Fraction(2) ** m
        return ((m + 1, r), (m + 1, r + step))

    def neighbors(v):
        c1, c2 = children(v)
        return (parent(v), c1, c2)

    base = (0, Fraction(0))
    dist = _ball_bfs(base, neighbors, radius)
    ball = set(dist)

    ids = {v: _bs_vid(*v) for v in ball}
    edges = []
    for v in ball:
        p = parent(v)
        if p in ball:
            edges.append((ids[v], ids[p]))

    a_map = {}
    t_map = {}
    for v in ball:
        m, r = v
        img = (m, (r + 1) % (Fraction(2) ** m))
        if img in ball:
            a_map[ids[v]] = ids[img]
        img = (m + 1, (2 * r) % (Fraction(2) ** (m + 1)))
        if img in ball:
            t_map[ids[v]] = ids[img]

    boundary = [ids[v] for v, d in dist.items() if d == radius]
    graph = MetricGraph(sorted(ids.values()), sorted(edges), boundary=boundary)
    action = GroupAction(graph, [("a", a_map), ("t", t_map)], mode="automorphism")
    ray = [_bs_vid(-j, Fraction(0)) for j in range(radius + 1)]
    return Construction(graph, action, _bs_vid(0, Fraction(0)),
                        extras={"radius": radius, "ray": ray})


# ---------------------------------------------------------------------------
# cone, double line, horoball
# ---------------------------------------------------------------------------


def cone_graph(base: MetricGraph, base_action: Optional[GroupAction] = None,
               basepoint: Optional[str] = None) -> Construction:
    """Join an apex to every vertex of the base.  Any automorphism action on
    the base extends by fixing the apex; the result has diameter <= 2 no
    matter how spread out the base was."""
    if base.has_vertex("apex"):
        raise FormatError("base already has a vertex named 'apex'")
    ids = list(base.vertex_ids) + ["apex"]
    edges = list(base.edges()) + [(v, "apex") for v in base.vertex_ids]
    boundary = list(base.boundary)
    if boundary:
        boundary = boundary + ["apex"]
    graph = MetricGraph(ids, edges, boundary=boundary)
    action = None
    if base_action is not None:
        if base_action.mode != "automorphism":
            raise FormatError("cone extension needs an automorphism-mode base action")
        gens = []
        for gm in base_action.generators:
            fwd = {base.vertex_ids[s]: base.vertex_ids[d] for s, d in gm.forward.items()}
            fwd["apex"] = "apex"
            gens.append((gm.name, fwd))
        action = GroupAction(graph, gens, mode="automorphism")
    if basepoint is None:
        basepoint = min(base.vertex_ids)
    return Construction(graph, action, basepoint, extras={"apex": "apex"})


def double_line_graph(n: int, swaps: Sequence[int] = (0, 3)) -> Construction:
    """Two parallel lines with crossing edges: (k,1)~(k+1,2) and
    (k,1)~(k-1,2).  The twins (k,1), (k,2) are non-adjacent with identical
    neighborhoods, so swapping any single pair is an automorphism; the
    emitted generators are the shift s and the swaps sigma_k for the
    requested positions."""
    if n < 1:
        raise FormatError("n must be >= 1")
    for k in swaps:
        if abs(k) > n:
            raise FormatError(f"swap position {k} outside [-{n}, {n}]")

    vid = lambda k, i: f"({k},{i})"
    ids = [vid(k, i) for k in range(-n, n + 1) for i in (1, 2)]
    edges = []
    for k in range(-n, n + 1):
        for i in (1, 2):
            if k + 1 <= n:
                edges.append((vid(k, i), vid(k + 1, i)))
        if k - 1 >= -n:
            edges.append((vid(k, 1), vid(k - 1, 2)))
        if k + 1 <= n:
            edges.append((vid(k, 1), vid(k + 1, 2)))

    shift = {vid(k, i): vid(k + 1, i) for k in range(-n, n) for i in (1, 2)}
    gens = [("s", shift)]
    for k in swaps:
        fwd = {v: v for v in ids}
        fwd[vid(k, 1)] = vid(k, 2)
        fwd[vid(k, 2)] = vid(k, 1)
        gens.append((f"sigma{k}", fwd))

    boundary = [vid(k, i) for k in (-n, n) for i in (1, 2)]
    graph = MetricGraph(ids, edges, boundary=boundary)
    action = GroupAction(graph, gens, mode="automorphism")
    return Construction(graph, action, vid(0, 1),
                        extras={"n": n, "swaps": list(swaps)})


def horoball(base: MetricGraph, base_action: Optional[GroupAction] = None,
             depth: int = 1, basepoint: Optional[str] = None) -> Construction:
    """Combinatorial horoball over the base, truncated at the given depth:
    levels 0..depth, vertical edges between consecutive copies of a vertex,
    and a level-n edge between v and w whenever 0 < d_base(v, w) <= 2^n.
    Distances between far-apart base vertices shrink to O(log) by routing
    through deep levels.  The depth cut and any base boundary are marked."""
    if depth < 1:
        raise FormatError("depth must be >= 1")
    ids_base = base.vertex_ids
    vid = lambda v, j: f"{v}|{j}"
    ids = [vid(v, j) for j in range(depth + 1) for v in ids_base]
    edges = []
    for j in range(depth):
        for v in ids_base:
            edges.append((vid(v, j), vid(v, j + 1)))
    for j in range(depth + 1):
        close = np.triu((base.dist > 0) & (base.dist <= 2 ** j), 1)
        for i, k in np.argwhere(close):
            edges.append((vid(ids_base[i], j), vid(ids_base[k], j)))

    boundary = [vid(v, depth) for v in ids_base]
    boundary += [vid(v, j) for v in base.boundary for j in range(depth)]
    graph = MetricGraph(ids, edges, boundary=boundary)
    action = None
    if base_action is not None:
        if base_action.mode != "automorphism":
            raise FormatError("horoball extension needs an automorphism-mode base action")
        gens = []
        for gm in base_action.generators:
            fwd = {}
            for s, d in gm.forward.items():
                sv, dv = base.vertex_ids[s], base.vertex_ids[d]
                for j in range(depth + 1):
                    fwd[vid(sv, j)] = vid(dv, j)
            gens.append((gm.name, fwd))
        action = GroupAction(graph, gens, mode="automorphism")
    if basepoint is None:
        basepoint = vid(ids_base[0], 0)
    return Construction(graph, action, basepoint, extras={"depth": depth})
