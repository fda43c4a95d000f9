"""Partial group actions on finite graph truncations.

Generators are injective partial maps of the vertex set (inverses derived).
Everything downstream treats the truncation as a window onto an infinite
action: orbit computations stay honest about frontier escapes, translation
lengths come as upper bounds with certificates, and classification verdicts
carry a certified/heuristic grade.

Word convention: a word is a sequence of signed generator letters applied
left to right, so evaluating [s, t] at v yields t(s(v)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    EndNotInvariant,
    FormatError,
    NotATree,
    NotAQuasitree,
    OutOfTruncation,
    VertexNotFound,
)
from .metric_graph import (
    DELTA_DEFAULT_CAP,
    MetricGraph,
    QuasitreeResult,
    hyperbolicity_delta,
)

# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------


class Word:
    """Sequence of signed generator letters, e.g. Word([("t", 1), ("a", -1)])."""

    __slots__ = ("letters",)

    def __init__(self, letters: Sequence[Tuple[str, int]] = ()):
        letters = tuple((str(n), int(s)) for n, s in letters)
        for n, s in letters:
            if s not in (1, -1):
                raise FormatError(f"letter sign must be +-1, got {s}")
        self.letters = letters

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse 'a b^-1 c^2' (spaces or '*' between letters)."""
        letters = []
        for tok in text.replace("*", " ").split():
            if "^" in tok:
                name, exp = tok.split("^", 1)
                try:
                    k = int(exp)
                except ValueError:
                    raise FormatError(f"bad exponent in {tok!r}") from None
            else:
                name, k = tok, 1
            if not name:
                raise FormatError(f"bad token {tok!r}")
            sign = 1 if k > 0 else -1
            letters.extend([(name, sign)] * abs(k))
        return cls(letters)

    def inverse(self) -> "Word":
        return Word([(n, -s) for n, s in reversed(self.letters)])

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def power(self, k: int) -> "Word":
        if k < 0:
            return self.inverse().power(-k)
        return Word(self.letters * k)

    def reduced(self) -> "Word":
        """Free reduction: cancel adjacent inverse pairs."""
        out: List[Tuple[str, int]] = []
        for n, s in self.letters:
            if out and out[-1][0] == n and out[-1][1] == -s:
                out.pop()
            else:
                out.append((n, s))
        return Word(out)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def display(self) -> str:
        if not self.letters:
            return "1"
        out = []
        for n, s in self.letters:
            if out and out[-1][0] == n and out[-1][1] * s > 0:
                out[-1] = (n, out[-1][1] + s)
            else:
                out.append((n, s))
        return " ".join(n if k == 1 else f"{n}^{k}" for n, k in out)

    def __repr__(self):
        return f"Word({self.display()!r})"


@dataclass(frozen=True)
class GeneratorMap:
    name: str
    forward: dict  # vertex index -> vertex index
    backward: dict


class GroupAction:
    """A finite set of partial graph symmetries acting on a MetricGraph.

    mode 'automorphism' checks that each generator preserves the adjacency
    relation wherever both endpoints are defined; mode 'isometry' checks full
    distance preservation on defined pairs.
    """

    def __init__(self, space: MetricGraph, generators, mode: str = "automorphism"):
        if mode not in ("automorphism", "isometry"):
            raise FormatError(f"unknown mode {mode!r}")
        self.space = space
        self.mode = mode
        gens: List[GeneratorMap] = []
        names = set()
        for name, mapping in generators:
            name = str(name)
            if not name or name in names:
                raise FormatError(f"generator names must be unique and nonempty, got {name!r}")
            names.add(name)
            fwd: Dict[int, int] = {}
            for src, dst in mapping.items():
                fwd[space.index(src)] = space.index(dst)
            if len(set(fwd.values())) != len(fwd):
                raise FormatError(f"generator {name!r} is not injective")
            self._check_mode(name, fwd)
            bwd = {t: s for s, t in fwd.items()}
            gens.append(GeneratorMap(name, fwd, bwd))
        self.generators = tuple(gens)
        self._by_name = {g.name: g for g in gens}

    def _check_mode(self, name: str, fwd: Dict[int, int]):
        if not fwd:
            return
        src = np.fromiter(fwd.keys(), dtype=np.int64)
        dst = np.fromiter((fwd[s] for s in src), dtype=np.int64)
        A = self.space.dist[np.ix_(src, src)]
        B = self.space.dist[np.ix_(dst, dst)]
        if self.mode == "isometry":
            bad = np.argwhere(A != B)
        else:
            bad = np.argwhere((A == 1) != (B == 1))
        if len(bad):
            i, j = bad[0]
            u = self.space.vertex_ids[int(src[i])]
            v = self.space.vertex_ids[int(src[j])]
            raise FormatError(
                f"generator {name!r} violates {self.mode} mode at pair ({u!r}, {v!r})"
            )

    def gen(self, name: str) -> GeneratorMap:
        try:
            return self._by_name[name]
        except KeyError:
            raise FormatError(f"no generator named {name!r}") from None

    def gen_names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def letter_map(self, name: str, sign: int) -> dict:
        g = self.gen(name)
        return g.forward if sign > 0 else g.backward

    def apply_letter(self, name: str, sign: int, i: int) -> Optional[int]:
        return self.letter_map(name, sign).get(i)

    def __repr__(self):
        return f"GroupAction({len(self.generators)} generators on {self.space!r}, mode={self.mode})"


# ---------------------------------------------------------------------------
# evaluation and orbits
# ---------------------------------------------------------------------------


def evaluate_word(a: GroupAction, w: Word, v: str) -> str:
    """Apply w to v letter by letter; OutOfTruncation names the first failing
    letter position and the vertex where evaluation stood."""
    cur = a.space.index(v)
    for pos, (name, sign) in enumerate(w.letters):
        nxt = a.apply_letter(name, sign, cur)
        if nxt is None:
            raise OutOfTruncation(pos, a.space.vertex_ids[cur],
                                  name if sign > 0 else f"{name}^-1")
        cur = nxt
    return a.space.vertex_ids[cur]


def word_map(a: GroupAction, w: Word) -> np.ndarray:
    """Composite partial map of w on all vertices; -1 marks undefined."""
    n = a.space.n
    img = np.arange(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    for name, sign in w.letters:
        m = a.letter_map(name, sign)
        for i in range(n):
            if alive[i]:
                nxt = m.get(int(img[i]))
                if nxt is None:
                    alive[i] = False
                else:
                    img[i] = nxt
    img[~alive] = -1
    return img


@dataclass(frozen=True)
class OrbitResult:
    basepoint: str
    horizon: int
    vertices: tuple            # ids in BFS discovery order
    witnesses: dict            # id -> Word (shortest, lex-first by generator index then sign)
    complete: bool             # no generator application left the truncation
    exhausted: bool            # BFS closed before the horizon cut it off

    @property
    def size(self) -> int:
        return len(self.vertices)


def orbit(a: GroupAction, x0: str, horizon: int) -> OrbitResult:
    """BFS orbit of x0 under all generators and inverses, up to word length
    `horizon`.  Expansion order is generator index ascending, +1 before -1,
    which makes witness words the lexicographically-first shortest ones."""
    start = a.space.index(x0)
    letters = []
    for gi, gm in enumerate(a.generators):
        letters.append((gm.name, 1))
        letters.append((gm.name, -1))
    witnesses = {start: Word()}
    order = [start]
    frontier = [start]
    complete = True
    depth = 0
    exhausted = False
    while frontier and depth < horizon:
        nxt = []
        for i in frontier:
            for name, sign in letters:
                j = a.apply_letter(name, sign, i)
                if j is None:
                    complete = False
                    continue
                if j not in witnesses:
                    witnesses[j] = witnesses[i] * Word([(name, sign)])
                    order.append(j)
                    nxt.append(j)
        frontier = nxt
        depth += 1
    if not frontier:
        exhausted = True
    ids = a.space.vertex_ids
    return OrbitResult(
        x0, horizon,
        tuple(ids[i] for i in order),
        {ids[i]: w for i, w in witnesses.items()},
        complete, exhausted,
    )


@dataclass(frozen=True)
class LocalFinitenessReport:
    basepoint: str
    horizon: int
    counts: tuple              # counts[rho] = orbit points within distance rho, full horizon
    counts_half_horizon: tuple
    growth_warning: bool

    @property
    def verdict(self) -> str:
        return "growth-warning" if self.growth_warning else "locally-finite-at-horizon"


def check_locally_finite_orbit(a: GroupAction, x0: str, rho_max: int, horizon: int) -> LocalFinitenessReport:
    """Counts orbit points in balls around x0, at the full horizon and at half
    of it.  A count that is still growing with the horizon at fixed radius is
    evidence against a locally finite orbit and raises the warning flag."""
    full = orbit(a, x0, horizon)
    half = orbit(a, x0, max(1, horizon // 2))
    xi = a.space.index(x0)
    drow = a.space.dist[xi]

    def ball_counts(res):
        ds = sorted(int(drow[a.space.index(v)]) for v in res.vertices)
        out = []
        for rho in range(rho_max + 1):
            out.append(sum(1 for d in ds if 0 <= d <= rho))
        return tuple(out)

    cf = ball_counts(full)
    ch = ball_counts(half)
    warning = any(f > h for f, h in zip(cf, ch))
    return LocalFinitenessReport(x0, horizon, cf, ch, warning)


@dataclass(frozen=True)
class RipsOrbitGraph:
    r: int
    basepoint: str
    horizon: int
    graph: MetricGraph         # vertices = orbit points, edge iff 0 < d_X <= r
    action: GroupAction        # generators restricted to the orbit
    orbit: OrbitResult


def rips_orbit_graph(a: GroupAction, x0: str, r: int, horizon: int) -> RipsOrbitGraph:
    """Rips graph of the orbit: vertices are the orbit points, with an edge
    between distinct points at ambient distance at most r.  The ambient
    generators restrict to a (partial) action on it."""
    if r < 0:
        raise FormatError("r must be >= 0")
    res = orbit(a, x0, horizon)
    ids = sorted(res.vertices)
    idx = [a.space.index(v) for v in ids]
    sub = a.space.dist[np.ix_(idx, idx)]
    close = np.triu((sub > 0) & (sub <= r), 1)
    edges = [(ids[i], ids[j]) for i, j in np.argwhere(close)]
    graph = MetricGraph(ids, edges, allow_disconnected=True)
    present = set(ids)
    gens = []
    for gm in a.generators:
        restricted = {}
        for s, t in gm.forward.items():
            su, tu = a.space.vertex_ids[s], a.space.vertex_ids[t]
            if su in present and tu in present:
                restricted[su] = tu
        gens.append((gm.name, restricted))
    action = GroupAction(graph, gens, mode="automorphism")
    return RipsOrbitGraph(r, x0, horizon, graph, action, res)


def connectivity_radius(a: GroupAction, x0: str) -> int:
    """max over generators s of d(s(x0), x0); with r at least this value the
    Rips orbit graph is connected on BFS-reachable orbit points."""
    xi = a.space.index(x0)
    best = 0
    for gi, gm in enumerate(a.generators):
        j = gm.forward.get(xi)
        if j is None:
            raise OutOfTruncation(0, x0, gm.name)
        best = max(best, int(a.space.dist[xi, j]))
    return best


# ---------------------------------------------------------------------------
# translation lengths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TauEstimate:
    word: Word
    basepoint: str
    horizon: int
    n_reached: int
    sequence: tuple            # Fractions d(g^n x0, x0) / n for n = 1..n_reached
    running_min: tuple
    truncated: bool

    @property
    def tau_upper(self) -> Optional[Fraction]:
        return self.running_min[-1] if self.running_min else None


def stable_translation_length(a: GroupAction, w: Word, x0: str, horizon: int) -> TauEstimate:
    """Sequence d(g^n x0, x0)/n with its running minimum.  The limit is the
    infimum, so the final running minimum is an upper bound for tau."""
    xi = a.space.index(x0)
    seq: List[Fraction] = []
    cur = xi
    n = 0
    truncated = False
    while n < horizon:
        try:
            cur = a.space.index(evaluate_word(a, w, a.space.vertex_ids[cur]))
        except OutOfTruncation:
            truncated = True
            break
        n += 1
        seq.append(Fraction(int(a.space.dist[xi, cur]), n))
    running = []
    for q in seq:
        running.append(q if not running else min(running[-1], q))
    return TauEstimate(w, x0, horizon, n, tuple(seq), tuple(running), truncated)


def _require_tree(g: MetricGraph):
    if not g.is_tree():
        raise NotATree("space is not a tree")


def _tree_classify(a: GroupAction, w: Word):
    """(tau, kind, vertex) for a word acting on a tree truncation.

    kind is 'fixed-vertex', 'inverted-edge' or 'axis'; vertex attains the
    minimal displacement.  Exact for trees: min displacement is tau except
    for edge inversions, which translate by 0.
    """
    _require_tree(a.space)
    img = word_map(a, w)
    defined = np.nonzero(img >= 0)[0]
    if len(defined) == 0:
        raise OutOfTruncation(0, a.space.vertex_ids[0], w.display())
    disp = a.space.dist[defined, img[defined]]
    m = int(disp.min())
    at = defined[disp == m]
    best = min(int(v) for v in at)
    vid = a.space.vertex_ids[best]
    if m == 0:
        return 0, "fixed-vertex", vid
    if m == 1:
        for v in at:
            v = int(v)
            fv = int(img[v])
            ffv = img[fv] if img[fv] >= 0 else -1
            if ffv >= 0:
                if ffv == v:
                    return 0, "inverted-edge", a.space.vertex_ids[v]
                if int(a.space.dist[v, ffv]) == 2:
                    return 1, "axis", a.space.vertex_ids[v]
        # cannot see g^2 anywhere at the minimum; report the displacement
        return 1, "axis", vid
    return m, "axis", vid


def tree_translation_length(a: GroupAction, w: Word) -> int:
    """Exact translation length on a tree: minimum vertex displacement, and 0
    for elliptic words (fixed vertex or inverted edge)."""
    tau, kind, _ = _tree_classify(a, w)
    return tau


# ---------------------------------------------------------------------------
# isometry classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsometryReport:
    word: Word
    verdict: str               # Elliptic | Loxodromic | ParabolicCandidate | Unknown
    confidence: str            # certified | heuristic
    method: str
    tau_upper: Optional[Fraction]
    tau_lower: Optional[Fraction]
    certificate: dict
    truncated: bool
    notes: tuple


def _ambient_slack(g: MetricGraph) -> Tuple[Fraction, Optional[str]]:
    """4 * delta when the hyperbolicity scan is affordable, else a documented
    default of 4 with a note."""
    cached = getattr(g, "_delta4_cache", None)
    if cached is not None:
        return cached, None
    if g.n <= DELTA_DEFAULT_CAP:
        val = 4 * hyperbolicity_delta(g).delta
        g._delta4_cache = val
        return val, None
    return Fraction(4), "ambient delta not computed (graph over cap); using slack 4"


def classify_isometry(
    a: GroupAction,
    w: Word,
    x0: str,
    horizon: int = 32,
    slack: Optional[Fraction] = None,
    space_is_quasitree: Optional[bool] = None,
) -> IsometryReport:
    """Elliptic / loxodromic / parabolic-candidate classification of one word.

    Pipeline: power-orbit cycle detection (elliptic, certified); exact
    translation length on trees; otherwise a displacement-doubling test with
    additive slack (default 4*delta of the ambient space) for loxodromy, and
    a decay gate for parabolic candidates: the tau upper bound must fall
    under the horoball rate 2*(1 + ceil(log2 n))/n and the power orbit must
    escape past 3/4 of the truncation radius seen from x0.  Parabolic
    candidates are demoted to Unknown when the ambient space is known to be a
    quasitree (finitely generated groups acting on quasitrees have no
    parabolic isometries)."""
    notes: List[str] = []
    xi = a.space.index(x0)
    ids = a.space.vertex_ids
    points = [xi]
    truncated = False
    seen = {xi: 0}
    cycle = None
    cur = xi
    for k in range(1, horizon + 1):
        try:
            cur = a.space.index(evaluate_word(a, w, ids[cur]))
        except OutOfTruncation:
            truncated = True
            break
        if cur in seen:
            cycle = (seen[cur], k)
            points.append(cur)
            break
        seen[cur] = k
        points.append(cur)

    if cycle is not None:
        j, k = cycle
        return IsometryReport(
            w, "Elliptic", "certified", "power-orbit-cycle", Fraction(0), Fraction(0),
            {"cycle_start": j, "period": k - j, "vertex": ids[points[j]]},
            truncated, tuple(notes))

    if a.space.is_tree():
        try:
            tau, kind, vertex = _tree_classify(a, w)
        except OutOfTruncation:
            tau, kind, vertex = None, None, None
            notes.append("tree method saw no defined vertex")
        if kind is not None:
            if tau > 0:
                return IsometryReport(
                    w, "Loxodromic", "certified", "tree-min-displacement",
                    Fraction(tau), Fraction(tau),
                    {"kind": kind, "vertex": vertex, "tau": tau}, truncated, tuple(notes))
            return IsometryReport(
                w, "Elliptic", "certified", "tree-min-displacement",
                Fraction(0), Fraction(0),
                {"kind": kind, "vertex": vertex}, truncated, tuple(notes))

    n_reached = len(points) - 1
    if n_reached < 2:
        notes.append("power orbit too short for heuristics")
        return IsometryReport(w, "Unknown", "heuristic", "insufficient-data",
                              None, None, {}, truncated, tuple(notes))

    dists = [int(a.space.dist[xi, p]) for p in points]
    tau_upper = min(Fraction(dists[k], k) for k in range(1, n_reached + 1))

    if slack is None:
        slack, note = _ambient_slack(a.space)
        if note:
            notes.append(note)
    doubling_ok = all(
        dists[2 * k] >= 2 * dists[k] - slack
        for k in range(1, n_reached // 2 + 1)
    )
    tau_lower = max(
        (Fraction(dists[k]) - slack) / k for k in range(1, n_reached + 1)
    ) if n_reached else Fraction(0)
    if doubling_ok and tau_lower > 0:
        return IsometryReport(
            w, "Loxodromic", "heuristic", "displacement-doubling",
            tau_upper, tau_lower,
            {"slack": str(slack), "n_reached": n_reached}, truncated, tuple(notes))

    ecc = int(a.space.dist[xi].max())
    escape = max(dists) > Fraction(3, 4) * ecc
    decay_bound = Fraction(2 * (1 + math.ceil(math.log2(n_reached))), n_reached)
    decays = tau_upper <= decay_bound
    if escape and decays:
        quasitree = space_is_quasitree
        if quasitree is None:
            quasitree = a.space.is_tree()
        if quasitree:
            notes.append("parabolic candidate demoted: ambient space is a quasitree")
            return IsometryReport(w, "Unknown", "heuristic", "decay-gate-demoted",
                                  tau_upper, None,
                                  {"decay_bound": str(decay_bound), "escape": True},
                                  truncated, tuple(notes))
        return IsometryReport(
            w, "ParabolicCandidate", "heuristic", "decay-gate",
            tau_upper, None,
            {"decay_bound": str(decay_bound), "max_displacement": max(dists), "ecc": ecc},
            truncated, tuple(notes))

    notes.append("no verdict gate fired")
    return IsometryReport(w, "Unknown", "heuristic", "inconclusive",
                          tau_upper, None, {}, truncated, tuple(notes))


# ---------------------------------------------------------------------------
# Serre fixed-point test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SerreResult:
    all_elliptic: bool
    fixed_vertex: Optional[str]
    culprit: Optional[Word]
    checked: tuple
    notes: tuple


def serre_elliptic_test(a: GroupAction, words: Optional[Sequence[Word]] = None) -> SerreResult:
    """On a tree: if every generator and every pairwise product is elliptic,
    a finitely generated group fixes a vertex.  Returns the lexicographically
    first common fixed vertex of the generator words, or the first
    non-elliptic word found."""
    _require_tree(a.space)
    if words is None:
        words = [Word([(gm.name, 1)]) for gm in a.generators]
    words = list(words)
    to_check = list(words)
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            to_check.append(words[i] * words[j])
    notes = []
    for w in to_check:
        tau, kind, vertex = _tree_classify(a, w)
        if tau > 0:
            return SerreResult(False, None, w, tuple(v.display() for v in to_check), ())
    common: Optional[set] = None
    for w in words:
        img = word_map(a, w)
        fixed = {i for i in range(a.space.n) if img[i] == i}
        common = fixed if common is None else (common & fixed)
    if not common:
        notes.append("all words elliptic but no common fixed vertex inside the truncation")
        return SerreResult(True, None, None, tuple(v.display() for v in to_check), tuple(notes))
    best = min(a.space.vertex_ids[i] for i in common)
    return SerreResult(True, best, None, tuple(v.display() for v in to_check), ())


# ---------------------------------------------------------------------------
# Busemann homomorphism along an end
# ---------------------------------------------------------------------------


def busemann_homomorphism(a: GroupAction, ray: Sequence[str], w: Word, min_tail: int = 3) -> int:
    """Translation of the basepoint ray[0] along the end defined by a
    geodesic ray.  Computed as the stable value of

        d(g(ray[0]), ray[n]) - d(ray[0], ray[n]),

    positive when g moves the basepoint away from the end.  EndNotInvariant
    when the differences do not stabilize over the available tail."""
    ray = [str(v) for v in ray]
    if len(ray) < max(2, min_tail):
        raise EndNotInvariant("ray too short to certify an end")
    r0 = a.space.index(ray[0])
    prev = r0
    ridx = []
    for k, v in enumerate(ray):
        vi = a.space.index(v)
        if k > 0 and int(a.space.dist[prev, vi]) != 1:
            raise FormatError(f"ray is not a path at position {k}")
        if int(a.space.dist[r0, vi]) != k:
            raise FormatError(f"ray is not geodesic at position {k}")
        ridx.append(vi)
        prev = vi
    ridx = np.array(ridx, dtype=np.int64)
    # The difference below stabilizes on trees even for a g sending the ray
    # toward a different end, so stabilization alone certifies nothing.  g
    # fixes the end only if the image of the ray stays within bounded
    # distance of the ray, so check that first.
    gmap = word_map(a, w)
    drift = [int(a.space.dist[gmap[vi]][ridx].min()) for vi in ridx if gmap[vi] >= 0]
    if len(drift) < min_tail:
        raise EndNotInvariant("image of the ray leaves the truncation too early")
    if len(set(drift[-min_tail:])) != 1:
        raise EndNotInvariant(
            f"image of the ray drifts away from it: distances {drift[-6:]}"
        )
    gx = a.space.index(evaluate_word(a, w, ray[0]))
    vals = [int(a.space.dist[gx, vi]) - k for k, vi in enumerate(ridx)]
    tail = vals[-min_tail:]
    if len(set(tail)) != 1:
        raise EndNotInvariant(
            f"Busemann differences do not stabilize along the ray tail: {vals[-6:]}"
        )
    return tail[0]


# ---------------------------------------------------------------------------
# realized elements (words deduplicated by their action on the truncation)
# ---------------------------------------------------------------------------


@dataclass
class RealizedElement:
    word: Word
    depth: int
    image: np.ndarray          # composite partial map, -1 undefined


def realized_elements(a: GroupAction, horizon: int) -> List[RealizedElement]:
    """BFS over words, deduplicated by their realized partial map: two words
    are identified when they agree on every vertex where both are defined,
    and merged maps keep the union of domains.  Identification by agreement
    undercounts distinct group elements, which keeps counts built on it
    honest lower bounds.  Only fresh elements are expanded, so the walk is
    bounded by (elements) x (letters)."""
    n = a.space.n
    letters = []
    for gm in a.generators:
        letters.append((gm.name, 1))
        letters.append((gm.name, -1))
    identity = RealizedElement(Word(), 0, np.arange(n, dtype=np.int64))
    elements = [identity]
    frontier = [identity]
    depth = 0
    while frontier and depth < horizon:
        nxt = []
        for el in frontier:
            for name, sign in letters:
                m = a.letter_map(name, sign)
                img = el.image.copy()
                for i in range(n):
                    if img[i] >= 0:
                        img[i] = m.get(int(img[i]), -1)
                if not (img >= 0).any():
                    continue
                merged = False
                for other in elements:
                    both = (img >= 0) & (other.image >= 0)
                    if both.any() and (img[both] == other.image[both]).all():
                        gains = (img >= 0) & (other.image < 0)
                        if gains.any():
                            other.image[gains] = img[gains]
                        merged = True
                        break
                    if not both.any():
                        # no overlap: indistinguishable from this rep; merge too
                        other.image[img >= 0] = img[img >= 0]
                        merged = True
                        break
                if not merged:
                    el2 = RealizedElement(el.word * Word([(name, sign)]), depth + 1, img)
                    elements.append(el2)
                    nxt.append(el2)
        frontier = nxt
        depth += 1
    return elements


# ---------------------------------------------------------------------------
# properness and acylindricity profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PropernessReport:
    horizon: int
    n_elements: int
    acylindricity: tuple       # ((epsilon, R, N), ...)
    uniform: tuple             # ((r, N_r), ...)
    max_stabilizer: int
    stabilizer_growth_warning: bool
    no_pair_flags: tuple       # R values with no vertex pair at distance >= R


def properness_profiles(
    a: GroupAction,
    epsilons: Sequence[int],
    radii: Sequence[int],
    rs: Sequence[int],
    horizon: int = 4,
) -> PropernessReport:
    """Acylindricity table N(epsilon, R) (over realized elements moving both
    ends of a distant pair by at most epsilon), uniform-properness counts
    N_r, and a stabilizer summary with a growth warning when the maximal
    realized stabilizer count still grows from horizon/2 to horizon."""
    els = realized_elements(a, horizon)
    D = a.space.dist
    n = a.space.n
    BIG = 10 ** 6
    disp = np.full((len(els), n), BIG, dtype=np.int64)
    for t, el in enumerate(els):
        defined = el.image >= 0
        idx = np.nonzero(defined)[0]
        disp[t, idx] = D[idx, el.image[idx]]

    acyl = []
    no_pair = []
    for eps in epsilons:
        ok = (disp <= eps).astype(np.int64)
        P = ok.T @ ok
        for R in radii:
            mask = D >= R
            if not mask.any():
                no_pair.append(R)
                acyl.append((int(eps), int(R), 0))
            else:
                acyl.append((int(eps), int(R), int(P[mask].max())))
    uniform = []
    for r in rs:
        counts = (disp <= r).sum(axis=0)
        uniform.append((int(r), int(counts.max())))

    def max_stab(hor):
        e2 = els if hor == horizon else realized_elements(a, hor)
        best = 0
        for v in range(n):
            cnt = sum(1 for el in e2 if el.image[v] == v)
            best = max(best, cnt)
        return best

    full_stab = max_stab(horizon)
    half_stab = max_stab(max(1, horizon // 2))
    return PropernessReport(
        horizon, len(els), tuple(acyl), tuple(uniform),
        full_stab, full_stab > half_stab, tuple(sorted(set(no_pair))),
    )


# ---------------------------------------------------------------------------
# orbit quasiconvexity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuasiconvexityReport:
    passed: bool
    K: int
    C: int
    M: int
    orbit_size: int
    violations: tuple          # ((vertex, x, y), ...) truncation artifacts


def orbit_quasiconvexity(
    a: GroupAction,
    x0: str,
    quasitree: "QuasitreeResult | int",
    horizon: int = 12,
) -> QuasiconvexityReport:
    """On a quasitree with bottleneck constant C, the orbit is K-quasiconvex
    for the least K with 2K - 2C >= M, where M is the connectivity radius.
    Verifies exhaustively that every vertex on every geodesic between orbit
    points lies within K of an orbit point; violations are reported
    individually as truncation artifacts."""
    if isinstance(quasitree, QuasitreeResult):
        if not quasitree.passed:
            raise NotAQuasitree(
                f"bottleneck constant {quasitree.report.constant} exceeds c_max {quasitree.c_max}")
        C = quasitree.report.constant
    else:
        C = int(quasitree)
        if C < 0:
            raise NotAQuasitree("bottleneck constant must be >= 0")
    M = connectivity_radius(a, x0)
    K = C + (M + 1) // 2
    res = orbit(a, x0, horizon)
    oi = np.array(sorted(a.space.index(v) for v in res.vertices), dtype=np.int64)
    D = a.space.dist
    min_orb = D[:, oi].min(axis=1)
    DOO = D[np.ix_(oi, oi)]
    violations = []
    for v in np.nonzero(min_orb > K)[0]:
        dv = D[int(v), oi]
        on_geo = (dv[:, None] + dv[None, :]) == DOO
        hits = np.argwhere(on_geo)
        if len(hits):
            i, j = hits[0]
            violations.append((
                a.space.vertex_ids[int(v)],
                a.space.vertex_ids[int(oi[i])],
                a.space.vertex_ids[int(oi[j])],
            ))
    return QuasiconvexityReport(not violations, K, C, M, len(oi), tuple(violations))


# ---------------------------------------------------------------------------
# action type classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActionTypeReport:
    verdict: str               # Bounded | ParabolicCandidate | Lineal | QuasiParabolic | General | Undetermined
    confidence: str            # certified | heuristic
    evidence: dict
    loxodromics: tuple         # display strings of loxodromic words found


def _reduced_words(names: Sequence[str], max_len: int) -> List[Word]:
    """All nonempty freely reduced words up to max_len, letters in generator
    order with +1 before -1."""
    letters = []
    for n in names:
        letters.append((n, 1))
        letters.append((n, -1))
    out: List[Word] = []
    frontier: List[Word] = [Word()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for (n, s) in letters:
                if w.letters and w.letters[-1] == (n, -s):
                    continue
                w2 = w * Word([(n, s)])
                nxt.append(w2)
        out.extend(nxt)
        frontier = nxt
    return out


def _gromov_product2(D, i, j, base) -> int:
    return int(D[i, base]) + int(D[j, base]) - int(D[i, j])


def _direction_fingerprint(a: GroupAction, w: Word, x0i: int, horizon: int) -> Optional[int]:
    """Farthest vertex reached along the power orbit of w from x0; the
    lex-first id among the points attaining the maximum.  None when the
    orbit never leaves x0."""
    ids = a.space.vertex_ids
    cur = x0i
    pts = []
    for _ in range(horizon):
        try:
            cur = a.space.index(evaluate_word(a, w, ids[cur]))
        except OutOfTruncation:
            break
        pts.append(cur)
    if not pts:
        return None
    D = a.space.dist
    dmax = max(int(D[x0i, p]) for p in pts)
    if dmax == 0:
        return None
    att = [p for p in pts if int(D[x0i, p]) == dmax]
    return min(att, key=lambda p: ids[p])


def _pingpong_certificate(a: GroupAction, x0i: int, w1: Word, w2: Word,
                          reps, orbit_idx, power: int, threshold: int) -> Optional[dict]:
    """Checks a ping-pong schedule for w1^power, w2^power on the orbit.

    Quadrants are orbit points with Gromov product >= threshold against each
    of the four direction fingerprints.  Requires pairwise disjoint quadrants,
    basepoint outside all of them, and each signed power mapping every defined
    orbit point outside its repelling quadrant into its attracting one."""
    D = a.space.dist
    quads = []
    for rep in reps:
        quads.append({v for v in orbit_idx
                      if _gromov_product2(D, v, rep, x0i) >= 2 * threshold})
    for i in range(4):
        for j in range(i + 1, 4):
            if quads[i] & quads[j]:
                return None
    if any(x0i in q for q in quads):
        return None
    moves = [
        (w1.power(power), quads[1], quads[0]),
        (w1.power(-power), quads[0], quads[1]),
        (w2.power(power), quads[3], quads[2]),
        (w2.power(-power), quads[2], quads[3]),
    ]
    checked = 0
    for wp, repelling, attracting in moves:
        img = word_map(a, wp)
        any_defined = False
        for v in orbit_idx:
            if v in repelling or img[v] < 0:
                continue
            any_defined = True
            if int(img[v]) not in attracting:
                return None
            checked += 1
        if not any_defined:
            return None
    return {
        "powers": (f"{w1.display()}^{power}", f"{w2.display()}^{power}"),
        "checks": checked,
        "threshold": threshold,
    }


def classify_action_type(
    a: GroupAction,
    x0: str,
    horizon: int = 8,
    word_cap: int = 2,
    sep_threshold: Optional[int] = None,
    pp_threshold: int = 1,
    pp_power: int = 2,
    space_is_quasitree: Optional[bool] = None,
) -> ActionTypeReport:
    """Finite-horizon surrogate of the bounded / horocyclic / lineal / focal /
    general classification of an action on a hyperbolic space.

    Pipeline: a fully exhausted orbit certifies Bounded; otherwise words up
    to word_cap are scanned for loxodromics.  None found with an unbounded
    orbit gives ParabolicCandidate (heuristic).  With loxodromics, direction
    fingerprints (farthest points along g^{+-n} x0) are clustered by Gromov
    product at sep_threshold (default half the largest fingerprint radius):
    one shared unordered pair of directions is Lineal, one shared direction
    with at least two distinct opposite directions is QuasiParabolic, and two
    loxodromics with four separated directions plus a verified ping-pong
    schedule (default powers 2, giving a displacement margin over the
    quadrant threshold) certify General."""
    x0i = a.space.index(x0)
    ids = a.space.vertex_ids
    D = a.space.dist
    orb = orbit(a, x0, max(horizon, 4))
    if orb.exhausted and orb.complete:
        return ActionTypeReport("Bounded", "certified",
                                {"orbit_size": orb.size, "horizon": orb.horizon}, ())

    words = _reduced_words(a.gen_names(), word_cap)
    quasitree = space_is_quasitree
    if quasitree is None:
        quasitree = a.space.is_tree()
    lox: List[Tuple[Word, IsometryReport]] = []
    parabolic_flag = False
    for w in words:
        rep = classify_isometry(a, w, x0, horizon=horizon,
                                space_is_quasitree=quasitree)
        if rep.verdict == "Loxodromic":
            lox.append((w, rep))
        elif rep.verdict == "ParabolicCandidate":
            parabolic_flag = True

    if not lox:
        if not orb.exhausted or not orb.complete:
            verdict = "ParabolicCandidate"
            if quasitree and not parabolic_flag:
                verdict = "Undetermined"
            return ActionTypeReport(
                verdict, "heuristic",
                {"words_scanned": len(words), "orbit_exhausted": orb.exhausted,
                 "orbit_complete": orb.complete}, ())
        return ActionTypeReport("Undetermined", "heuristic",
                                {"words_scanned": len(words)}, ())

    # direction fingerprints for each loxodromic, then clustering
    dirs = []   # (word, plus_rep, minus_rep)
    for w, _rep in lox:
        p = _direction_fingerprint(a, w, x0i, horizon)
        m = _direction_fingerprint(a, w.inverse(), x0i, horizon)
        if p is None or m is None:
            continue
        dirs.append((w, p, m))
    if not dirs:
        return ActionTypeReport("Undetermined", "heuristic",
                                {"reason": "loxodromics without usable fingerprints"},
                                tuple(w.display() for w, _ in lox))

    reps = sorted({p for _, p, m in dirs} | {m for _, p, m in dirs},
                  key=lambda i: ids[i])
    radius = max(int(D[x0i, r]) for r in reps)
    if sep_threshold is None:
        sep_threshold = max(1, radius // 2)
    # union-find clustering by Gromov product
    cls = {r: r for r in reps}

    def find(r):
        while cls[r] != r:
            cls[r] = cls[cls[r]]
            r = cls[r]
        return r

    for i, r1 in enumerate(reps):
        for r2 in reps[i + 1:]:
            if _gromov_product2(D, r1, r2, x0i) >= 2 * sep_threshold:
                a_, b_ = find(r1), find(r2)
                if a_ != b_:
                    cls[a_] = b_
    pairs = [(find(p), find(m)) for _, p, m in dirs]
    lox_words = tuple(w.display() for w, _, _ in dirs)
    evidence = {
        "n_loxodromics": len(dirs),
        "sep_threshold": sep_threshold,
        "direction_classes": len({find(r) for r in reps}),
    }

    first = frozenset(pairs[0])
    if all(frozenset(pr) == first for pr in pairs) and len(first) == 2:
        return ActionTypeReport("Lineal", "heuristic", evidence, lox_words)

    all_classes = [frozenset(pr) for pr in pairs]
    shared = frozenset.intersection(*all_classes) if all_classes else frozenset()
    if len(shared) == 1:
        others = {next(iter(pr - shared)) for pr in all_classes if len(pr - shared) == 1}
        if len(others) >= 2:
            evidence["shared_direction"] = ids[next(iter(shared))]
            evidence["opposite_directions"] = sorted(ids[o] for o in others)
            return ActionTypeReport("QuasiParabolic", "heuristic", evidence, lox_words)

    orbit_idx = [a.space.index(v) for v in orb.vertices]
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            w1, p1, m1 = dirs[i]
            w2, p2, m2 = dirs[j]
            four = [p1, m1, p2, m2]
            labels = {find(r) for r in four}
            if len(labels) != 4:
                continue
            cert = _pingpong_certificate(a, x0i, w1, w2, four, orbit_idx,
                                         pp_power, pp_threshold)
            if cert is not None:
                evidence["pingpong"] = cert
                return ActionTypeReport("General", "certified", evidence, lox_words)
            evidence["pingpong"] = "four separated directions, schedule not verified"
            return ActionTypeReport("General", "heuristic", evidence, lox_words)
    return ActionTypeReport("Undetermined", "heuristic", evidence, lox_words)
