"""Dual trees of the curve families Γ_n and the tower of tree maps.

Edges of T_n are the level-n curves homotopic into Γ.  A level-n edge
has an address ``(γ; c_0 … c_{n-1})``: start in the annulus of γ, take
its ``c_0``-th child (counted in radial order), which maps onto the
annulus of that child's target, take the ``c_1``-th child there, and so
on.  Vertices are the level-0 components ("core" vertices, which persist
at every level) and the gap annuli ``(γ; w; g)`` between consecutive
children ``w·g`` and ``w·(g+1)``.

T_{n+1} is obtained from T_n by label-driven substitution: vertices are
replaced by the pieces listed in the map spec's substitution rules, edges by
their essential preimages, and the pieces are glued along shared
preimage curves.  τ_n drops the first address symbol; ι_n subdivides
each edge into its children.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Optional, Sequence

from ._rational import as_fraction
from .multicurve import (
    MulticurveError,
    is_stable,
    kappa_vector,
    mat_vec,
    multicurve,
    perron_certificate,
    reduced_matrix,
)
from .spec_model import MapSpec, gap_id, require_valid, split_gap_id, tower_children


class TowerError(ValueError):
    pass


def edge_key(cls: str, word: Sequence[int]) -> str:
    return cls + "".join(f".{c}" for c in word)


def gap_key(cls: str, word: Sequence[int], g: int) -> str:
    return f"{edge_key(cls, word)}/{g}"


@dataclass(frozen=True)
class TreeVertex:
    id: str
    kind: str  # "core" or "gap"
    label: str  # level-0 vertex it lands on under τ_0 ∘ … ∘ τ_{n-1}
    marked: int
    cls: Optional[str] = None
    word: tuple[int, ...] = ()
    gap: Optional[int] = None


@dataclass(frozen=True)
class TreeEdge:
    id: str
    cls: str
    word: tuple[int, ...]
    left: str
    right: str
    base: str  # level-0 edge class it covers under τ^n
    degree: int  # covering degree of F^n on this curve


@dataclass
class DualTree:
    level: int
    vertices: dict[str, TreeVertex]
    edges: dict[str, TreeEdge]

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges.values():
            adj[e.left].append(e.right)
            adj[e.right].append(e.left)
        return adj

    def degree_of(self, v: str) -> int:
        return sum(1 for e in self.edges.values() if v in (e.left, e.right))

    def tree_problems(self) -> list[str]:
        out = []
        if len(self.edges) != len(self.vertices) - 1:
            out.append(f"{len(self.edges)} edges on {len(self.vertices)} vertices")
        for e in self.edges.values():
            if e.left not in self.vertices or e.right not in self.vertices:
                out.append(f"edge {e.id} has a dangling end")
                return out
        if self.vertices:
            adj = self.adjacency()
            start = next(iter(self.vertices))
            seen = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            if len(seen) != len(self.vertices):
                out.append("not connected")
        return out

    def is_tree(self) -> bool:
        return not self.tree_problems()

    def marked_total(self) -> int:
        return sum(v.marked for v in self.vertices.values())


@dataclass(frozen=True)
class TreeMap:
    """τ_n: T_{n+1} → T_n."""

    vertices: dict[str, str]
    edges: dict[str, tuple[str, int]]  # edge -> (image edge, orientation)

    def fiber_sizes(self) -> tuple[int, int]:
        vcount: dict[str, int] = defaultdict(int)
        ecount: dict[str, int] = defaultdict(int)
        for img in self.vertices.values():
            vcount[img] += 1
        for img, _ in self.edges.values():
            ecount[img] += 1
        return max(vcount.values(), default=0), max(ecount.values(), default=0)

    @property
    def degree(self) -> int:
        return max(self.fiber_sizes())


@dataclass(frozen=True)
class Inclusion:
    """ι_n: T_n → T_{n+1}; edges go to the ordered path of their children."""

    vertices: dict[str, str]
    edges: dict[str, tuple[str, ...]]


class _Rules:
    """Per-spec lookup tables shared by every level of the tower."""

    def __init__(self, spec: MapSpec, gamma: Sequence[str]):
        self.spec = spec
        self.gamma = tuple(gamma)
        cfg = spec.config
        self.cfg = cfg
        self.kids = {c: tower_children(spec, c, gamma) for c in gamma}
        # preimages of class γ: (δ, local child index, orientation)
        self.pre: dict[str, list[tuple[str, int, int]]] = {c: [] for c in gamma}
        for d in gamma:
            for i, ch in enumerate(self.kids[d]):
                self.pre[ch.target].append((d, i, ch.orientation))
        self.image_of: dict[str, str] = {}
        for v, pieces in spec.substitution.items():
            for pc in pieces:
                self.image_of[pc.id] = v
        self.core_ids = set(cfg.vertex_ids)
        self.marked = dict(cfg.vertices)

    def end_vertex(self, cls: str, i: int, side: str) -> str:
        """Level-1 vertex on ``side`` of child ``i`` of ``cls``."""
        k = len(self.kids[cls])
        e = self.cfg.edge(cls)
        if side == "left":
            return e.left if i == 0 else gap_key(cls, (), i - 1)
        return e.right if i == k - 1 else gap_key(cls, (), i)

    def level0_image(self, piece: str) -> str:
        """τ_0 of a level-1 core vertex or depth-0 gap."""
        if piece in self.core_ids:
            return self.image_of[piece]
        cls, _, g = piece.rpartition("/")
        return self.image_of[gap_id(cls, int(g))]

    def target_of(self, cls: str, word: Sequence[int]) -> str:
        cur = cls
        for c in word:
            cur = self.kids[cur][c].target
        return cur

    def word_degree(self, cls: str, word: Sequence[int]) -> int:
        cur, deg = cls, 1
        for c in word:
            ch = self.kids[cur][c]
            deg *= ch.degree
            cur = ch.target
        return deg

    def local_order(self, cls: str, word: Sequence[int]) -> list[int]:
        return list(range(len(self.kids[self.target_of(cls, word)])))


def dual_tree_level0(spec: MapSpec) -> DualTree:
    """T_0 read straight off the level-0 configuration."""
    require_valid(spec)
    if spec.config is None:
        raise TowerError("spec has no level-0 configuration")
    cfg = spec.config
    verts = {v: TreeVertex(v, "core", v, m) for v, m in cfg.vertices}
    edges = {e.cls: TreeEdge(e.cls, e.cls, (), e.left, e.right, e.cls, 1) for e in cfg.edges}
    return DualTree(0, verts, edges)


def _check_gamma(spec: MapSpec, gamma) -> tuple[str, ...]:
    require_valid(spec)
    if spec.config is None or spec.substitution is None:
        raise TowerError("the tree tower needs a level-0 configuration and substitution rules")
    if gamma is None:
        return spec.config.classes
    mc = multicurve(spec, gamma)
    if set(mc.classes) != set(spec.config.classes):
        raise TowerError(
            f"Γ must be the configuration's curve family {list(spec.config.classes)}"
        )
    return mc.classes


def pullback_tree(spec: MapSpec, tree: DualTree, gamma=None) -> tuple[DualTree, TreeMap]:
    """Substitute and glue: T_n ↦ (T_{n+1}, τ_n)."""
    gamma = _check_gamma(spec, gamma)
    R = _Rules(spec, gamma)
    n1 = tree.level + 1
    verts: dict[str, TreeVertex] = {}
    tau_v: dict[str, str] = {}

    for x in tree.vertices.values():
        if x.kind == "core":
            for pc in spec.substitution[x.id]:
                if pc.id in R.core_ids:
                    vid = pc.id
                    verts[vid] = TreeVertex(vid, "core", x.label, R.marked[vid])
                else:
                    cls, g = split_gap_id(pc.id)
                    vid = gap_key(cls, (), g)
                    verts[vid] = TreeVertex(vid, "gap", x.label, 0, cls, (), g)
                tau_v[vid] = x.id
        else:
            for d, i, _ in R.pre[x.cls]:
                word = (i,) + x.word
                vid = gap_key(d, word, x.gap)
                verts[vid] = TreeVertex(vid, "gap", x.label, 0, d, word, x.gap)
                tau_v[vid] = x.id

    edges: dict[str, TreeEdge] = {}
    tau_e: dict[str, tuple[str, int]] = {}
    for e in tree.edges.values():
        for d, i, o in R.pre[e.cls]:
            word = (i,) + e.word
            first, second = (e.left, e.right) if o == 1 else (e.right, e.left)
            left = _lift(R, tree, first, d, i, "left")
            right = _lift(R, tree, second, d, i, "right")
            for lifted, orig in ((left, first), (right, second)):
                if lifted not in verts or tau_v[lifted] != orig:
                    raise TowerError(
                        "substitution inconsistent: non-tree pullback "
                        f"(edge {edge_key(d, word)} would glue {lifted} over {orig})"
                    )
            eid = edge_key(d, word)
            edges[eid] = TreeEdge(eid, d, word, left, right, e.base, e.degree * R.kids[d][i].degree)
            tau_e[eid] = (e.id, o)

    new = DualTree(n1, verts, edges)
    problems = new.tree_problems()
    if problems:
        raise TowerError("substitution inconsistent: non-tree pullback (" + "; ".join(problems) + ")")
    return new, TreeMap(tau_v, tau_e)


def _lift(R: _Rules, tree: DualTree, x: str, cls: str, i: int, side: str) -> str:
    v = tree.vertices[x]
    if v.kind == "gap":
        return gap_key(cls, (i,) + v.word, v.gap)
    return R.end_vertex(cls, i, side)


def _path_order(R: _Rules, cls: str, word: tuple[int, ...], depth: int) -> list[tuple[int, ...]]:
    """Words of length ``depth`` below ``(cls; word)`` in left-to-right order."""
    if len(word) == depth:
        return [word]
    target = R.target_of(cls, word)
    out = []
    for c in range(len(R.kids[target])):
        out.extend(_path_order(R, cls, word + (c,), depth))
    # orientation reversals below a child flip the order of its sub-words
    return sorted(out, key=lambda w: _position_key(R, cls, w))


def _position_key(R: _Rules, cls: str, word: tuple[int, ...]) -> tuple:
    key = []
    cur, flip = cls, False
    for c in word:
        kids = R.kids[cur]
        key.append(len(kids) - 1 - c if flip else c)
        if kids[c].orientation == -1:
            flip = not flip
        cur = kids[c].target
    return tuple(key)


def inclusion(spec: MapSpec, small: DualTree, big: DualTree, gamma=None) -> Inclusion:
    """ι_n: each edge onto the ordered path of its homotopic children."""
    gamma = _check_gamma(spec, gamma)
    R = _Rules(spec, gamma)
    vmap = {}
    for v in small.vertices:
        if v not in big.vertices:
            raise TowerError(f"vertex {v} of T_{small.level} is missing from T_{big.level}")
        vmap[v] = v
    emap: dict[str, tuple[str, ...]] = {}
    used: set[str] = set()
    for e in small.edges.values():
        words = _path_order(R, e.cls, e.word, len(e.word) + 1)
        ids = tuple(edge_key(e.cls, w) for w in words)
        for i in ids:
            if i not in big.edges:
                raise TowerError(f"edge {i} missing from T_{big.level}")
            if i in used:
                raise TowerError(f"homotopy-class collision at edge {i}")
            used.add(i)
        # the images must chain from ι(left) to ι(right)
        cur = vmap[e.left]
        for i in ids:
            be = big.edges[i]
            if be.left == cur:
                cur = be.right
            elif be.right == cur:
                cur = be.left
            else:
                raise TowerError(f"ι({e.id}) is not a path (breaks at {i})")
        if cur != vmap[e.right]:
            raise TowerError(f"ι({e.id}) does not end at ι({e.right})")
        emap[e.id] = ids
    return Inclusion(vmap, emap)


# -- metric -----------------------------------------------------------------------


@dataclass
class TowerMetric:
    lam: Fraction
    v: tuple[Fraction, ...]
    Mv: tuple[Fraction, ...]
    lengths: list[dict[str, Fraction]]
    slope_cap: Fraction

    def total(self, n: int) -> Fraction:
        return sum(self.lengths[n].values(), Fraction(0))


def perron_metric(spec: MapSpec, gamma, tower: "TreeTower", slope_cap=None) -> TowerMetric:
    """Edge lengths making ι_n isometric and τ_n expanding by more than λ.

    With a certificate ``M_r v > λ v``: an edge of T_1 gets length
    ``v(τ_0 e)``, so ``|ι_0(e_i)| = Σ_j b_ij v_j = (M_r v)_i > λ v_i``; T_0
    edge i gets length ``(M_r v)_i`` so that ι_0 is an isometry, and
    deeper levels subdivide isometrically, giving τ slopes
    ``(M_r v)_t / v_t > λ``.
    """
    mc = multicurve(spec, gamma)
    B = reduced_matrix(spec, mc).rows()
    try:
        cert = perron_certificate(B)
    except MulticurveError as exc:
        raise TowerError(f"Γ is not Cantor: {exc}") from None
    v = cert.v
    Mv = tuple(mat_vec(B, v))
    idx = {c: i for i, c in enumerate(mc.classes)}
    for i in range(len(v)):
        if not Mv[i] > cert.lam * v[i]:  # pragma: no cover - certificate already verified
            raise TowerError("Perron inequality failed")
    R = _Rules(spec, mc.classes)

    def length(cls: str, word: tuple[int, ...]) -> Fraction:
        if not word:
            return Mv[idx[cls]]
        t = R.kids[cls][word[0]].target
        j = idx[t]
        return length(t, word[1:]) * v[j] / Mv[j]

    lengths = [
        {eid: length(e.cls, e.word) for eid, e in tree.edges.items()} for tree in tower.trees
    ]
    max_slope = max(Mv[i] / v[i] for i in range(len(v)))
    d = tower.degree
    cap = (
        as_fraction(slope_cap)
        if slope_cap is not None
        else Fraction(floor(max(cert.lam, Fraction(d), max_slope)) + 1)
    )
    if not cap > max(cert.lam, Fraction(d)):
        raise TowerError("slope cap λ₁ must exceed max(λ, d)")
    if cap < max_slope:
        raise TowerError(f"slope cap λ₁ = {cap} is below the largest slope {max_slope}")
    return TowerMetric(cert.lam, v, Mv, lengths, cap)


# -- the tower -------------------------------------------------------------------


@dataclass
class TreeTower:
    gamma: tuple[str, ...]
    trees: list[DualTree]
    taus: list[TreeMap]
    iotas: list[Inclusion]
    degree: int
    metric: Optional[TowerMetric] = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.trees) - 1

    def edge_counts(self) -> list[int]:
        return [len(t.edges) for t in self.trees]

    def totals(self) -> list[Fraction]:
        if self.metric is None:
            return []
        return [self.metric.total(n) for n in range(len(self.trees))]


def _axiom_a(small: DualTree, big: DualTree, tau: TreeMap, iota: Inclusion) -> Optional[str]:
    for v in iota.vertices.values():
        if v not in big.vertices:
            return f"ι maps a vertex outside V_{big.level}"
    if set(tau.vertices) != set(big.vertices):
        return "τ is not defined on every vertex"
    for v, img in tau.vertices.items():
        if img not in small.vertices:
            return f"τ({v}) = {img} is not a vertex of T_{small.level}"
    for eid, e in big.edges.items():
        img, o = tau.edges[eid]
        ie = small.edges[img]
        want = (ie.left, ie.right) if o == 1 else (ie.right, ie.left)
        if (tau.vertices[e.left], tau.vertices[e.right]) != want:
            return f"τ is not continuous on edge {eid}"
    return None


def _new_part(small: DualTree, big: DualTree, iota: Inclusion) -> tuple[set[str], set[str]]:
    """Edges and vertices of ``big`` outside ι(small) as point sets."""
    covered_e = {i for ids in iota.edges.values() for i in ids}
    covered_v = set(iota.vertices.values())
    for ids in iota.edges.values():
        for i in ids:
            covered_v.update((big.edges[i].left, big.edges[i].right))
    return set(big.edges) - covered_e, set(big.vertices) - covered_v


def _axiom_b(towers: list[DualTree], taus, iotas, n: int) -> Optional[str]:
    # τ_{n+1}(T_{n+2} \ ι_{n+1}(T_{n+1})) ⊆ T_{n+1} \ ι_n(T_n)
    new_e2, new_v2 = _new_part(towers[n + 1], towers[n + 2], iotas[n + 1])
    new_e1, new_v1 = _new_part(towers[n], towers[n + 1], iotas[n])
    for e in new_e2:
        if taus[n + 1].edges[e][0] not in new_e1:
            return f"τ maps new edge {e} into ι(T_{n})"
    for v in new_v2:
        if taus[n + 1].vertices[v] not in new_v1:
            return f"τ maps new vertex {v} into ι(T_{n})"
    return None


def _axiom_d(trees, taus, iotas, n: int) -> Optional[str]:
    # τ_{n+1} ∘ ι_{n+1} = ι_n ∘ τ_n on T_{n+1}
    t1 = trees[n + 1]
    for v in t1.vertices:
        if taus[n + 1].vertices[iotas[n + 1].vertices[v]] != iotas[n].vertices[taus[n].vertices[v]]:
            return f"diagram fails at vertex {v}"
    for eid in t1.edges:
        lhs = tuple(taus[n + 1].edges[x][0] for x in iotas[n + 1].edges[eid])
        img, o = taus[n].edges[eid]
        rhs = iotas[n].edges[img]
        if o == -1:
            rhs = tuple(reversed(rhs))
        if lhs != rhs:
            return f"diagram fails at edge {eid}: {lhs} != {rhs}"
    return None


def tower_build(spec: MapSpec, gamma=None, depth: int = 3, slope_cap=None, with_metric: bool = True) -> TreeTower:
    """Build T_0 … T_depth, check the tower axioms, attach the metric.

    Any axiom violation raises :class:`TowerError` naming the witness.
    The metric is attached when Γ is Cantor and ``with_metric`` is set.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    gamma = _check_gamma(spec, gamma)
    trees = [dual_tree_level0(spec)]
    taus: list[TreeMap] = []
    iotas: list[Inclusion] = []
    for _ in range(depth + 1):  # one extra level so axioms (b), (d) reach T_depth
        nxt, tau = pullback_tree(spec, trees[-1], gamma)
        iotas.append(inclusion(spec, trees[-1], nxt, gamma))
        trees.append(nxt)
        taus.append(tau)
    for n in range(depth + 1):
        msg = _axiom_a(trees[n], trees[n + 1], taus[n], iotas[n])
        if msg:
            raise TowerError(f"axiom (a) at level {n}: {msg}")
    for n in range(depth):
        for check, fn in (("b", _axiom_b), ("d", _axiom_d)):
            msg = fn(trees, taus, iotas, n)
            if msg:
                raise TowerError(f"axiom ({check}) at level {n}: {msg}")
    deg = max((t.degree for t in taus), default=1)
    if deg > spec.degree:
        raise TowerError(f"tree-map degree {deg} exceeds the covering degree {spec.degree}")
    for n, tree in enumerate(trees):
        expect = sum(kappa_vector(spec, gamma, n))
        if len(tree.edges) != expect:
            raise TowerError(f"T_{n} has {len(tree.edges)} edges but Σκ_{n} = {expect}")
        if tree.marked_total() != spec.post_critical_count:
            raise TowerError(f"T_{n} carries {tree.marked_total()} marked points")
    # drop the look-ahead level
    tower = TreeTower(gamma, trees[: depth + 1], taus[:depth], iotas[:depth], deg)
    tower.checks = {"a": True, "b": True, "d": True, "degree": True, "edge_counts": True}
    if with_metric:
        try:
            tower.metric = perron_metric(spec, gamma, tower, slope_cap)
        except TowerError:
            if slope_cap is not None:
                raise
            tower.metric = None
        if tower.metric is not None:
            _check_metric(tower)
    return tower


def _check_metric(tower: TreeTower) -> None:
    m = tower.metric
    for n, iota in enumerate(tower.iotas):
        for eid, ids in iota.edges.items():
            if sum((m.lengths[n + 1][i] for i in ids), Fraction(0)) != m.lengths[n][eid]:
                raise TowerError(f"ι_{n} is not isometric on {eid}")
    for n, tau in enumerate(tower.taus):
        for eid, (img, _) in tau.edges.items():
            slope = m.lengths[n][img] / m.lengths[n + 1][eid]
            if not m.lam < slope <= m.slope_cap:
                raise TowerError(f"slope {slope} of τ_{n} on {eid} outside (λ, λ₁]")


# -- length bound ----------------------------------------------------------------


@dataclass(frozen=True)
class LengthBoundReport:
    totals: tuple[Fraction, ...]
    degree: int
    slope_cap: Fraction
    factor: Fraction
    recursive_ok: bool
    closed_ok: bool

    @property
    def ok(self) -> bool:
        return self.recursive_ok and self.closed_ok


def length_bound_check(tower: TreeTower, slope_cap=None) -> LengthBoundReport:
    """|T_n| ≤ |T_{n-1}| + (d/λ₁)(|T_{n-1}| - |T_{n-2}|) and ≤ λ₁/(λ₁-d)|T_0|."""
    if tower.metric is None:
        raise TowerError("tower has no metric")
    cap = as_fraction(slope_cap) if slope_cap is not None else tower.metric.slope_cap
    d = Fraction(tower.degree)
    if not cap > d:
        raise TowerError("slope cap must exceed the tree-map degree")
    totals = tower.totals()
    rec = True
    prev2 = Fraction(0)
    for n in range(1, len(totals)):
        prev = totals[n - 1]
        if not totals[n] <= prev + d / cap * (prev - prev2):
            rec = False
        prev2 = prev
    factor = cap / (cap - d)
    closed = all(t <= factor * totals[0] for t in totals)
    return LengthBoundReport(tuple(totals), tower.degree, cap, factor, rec, closed)


# -- coding ----------------------------------------------------------------------


@dataclass(frozen=True)
class CodingStep:
    level: int
    element: str
    length: Optional[Fraction]
    bound: Optional[Fraction]


def coding_point(spec: MapSpec, tower: TreeTower, address) -> list[CodingStep]:
    """Follow a symbolic address through the tower.

    ``address`` is either ``(cls, word)`` with ``word`` a sequence or
    itinerary of local child indices (an edge chain, i.e. a regular point
    of the dendrite), or a vertex id (a complementary component, which is
    the same vertex at every level from its birth on).
    """
    R = _Rules(spec, tower.gamma)
    m = tower.metric
    if isinstance(address, str):
        steps = []
        for n, tree in enumerate(tower.trees):
            if address in tree.vertices:
                steps.append(CodingStep(n, address, None, None))
        if not steps:
            raise TowerError(f"invalid vertex address {address!r}")
        return steps
    cls, word = address
    if cls not in tower.gamma:
        raise TowerError(f"invalid address: {cls!r} not in Γ")
    N = tower.depth
    word = tuple(word.prefix(N) if hasattr(word, "prefix") else tuple(word)[:N])
    cur = cls
    for c in word:
        if not 0 <= c < len(R.kids[cur]):
            raise TowerError(f"invalid address: no child {c} in {cur}")
        cur = R.kids[cur][c].target
    steps = []
    top = max(m.lengths[0].values()) if m else None
    for n in range(len(word) + 1):
        eid = edge_key(cls, word[:n])
        if eid not in tower.trees[n].edges:  # pragma: no cover - guarded above
            raise TowerError(f"edge {eid} missing at level {n}")
        length = m.lengths[n][eid] if m else None
        bound = top / m.lam**n if m else None
        steps.append(CodingStep(n, eid, length, bound))
    return steps


# -- census ----------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicComponent:
    vertex: str
    preperiod: int
    period: int


@dataclass(frozen=True)
class CensusLevel:
    depth: int
    complex_components: tuple[str, ...]
    periodic: tuple[PeriodicComponent, ...]
    disk: int
    annular: int
    trivial: int

    @property
    def complex_count(self) -> int:
        return len(self.complex_components)


@dataclass(frozen=True)
class CensusReport:
    gamma: tuple[str, ...]
    levels: tuple[CensusLevel, ...]

    @property
    def complex_counts(self) -> list[int]:
        return [lv.complex_count for lv in self.levels]


def classify_component(boundary_count: int, marked: int) -> str:
    """Type of a complementary component from its boundary/marked counts."""
    if boundary_count <= 1 and marked <= 1:
        return "disk" if marked == 1 else "trivial"
    if boundary_count == 2 and marked == 0:
        return "annular"
    return "complex"


def decomposition_census(spec: MapSpec, gamma=None, depth: int = 3) -> CensusReport:
    """Component census of the complements of Γ_n for n ≤ depth.

    Complex components are the core vertices; their return map is the
    functional graph that sends a core vertex to the level-0 component
    whose substitution rule lists it.  Annular pieces are the gap
    vertices; disk- and trivial-type pieces are counted from the
    peripheral and null preimages of the previous level's curves.
    """
    gamma = _check_gamma(spec, gamma)
    if not is_stable(spec, gamma):
        raise TowerError("census needs a stable multicurve")
    tower = tower_build(spec, gamma, depth, with_metric=False)
    R = _Rules(spec, gamma)
    ess = set(spec.essential)
    levels = []
    for n, tree in enumerate(tower.trees):
        kinds: dict[str, list[str]] = defaultdict(list)
        for v in tree.vertices.values():
            kinds[classify_component(tree.degree_of(v.id), v.marked)].append(v.id)
        disk = trivial = 0
        if n > 0:
            for e in tower.trees[n - 1].edges.values():
                for pe in spec.pullback[e.cls]:
                    if pe.image == "null":
                        trivial += 1
                    elif pe.image not in ess:
                        disk += 1
        cplx = tuple(sorted(kinds["complex"]))
        periodic = []
        for v in cplx:
            if tree.vertices[v].kind != "core":  # pragma: no cover - gaps are annular
                continue
            seq = [v]
            while True:
                nxt = R.image_of[seq[-1]]
                if nxt in seq:
                    pre = seq.index(nxt)
                    periodic.append(PeriodicComponent(v, pre, len(seq) - pre))
                    break
                seq.append(nxt)
        levels.append(
            CensusLevel(
                n,
                cplx,
                tuple(periodic),
                disk + len(kinds["disk"]),
                len(kinds["annular"]),
                trivial + len(kinds["trivial"]),
            )
        )
    return CensusReport(gamma, tuple(levels))
