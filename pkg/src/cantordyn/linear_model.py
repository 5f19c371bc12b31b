"""Expanding piecewise-linear interval model of an exact annular system.

Each class of Γ gets a parent interval; the preimage annuli homotopic to
it become child sub-intervals, mapped linearly onto the parent of their
target class.  All endpoints are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx

from ._rational import as_fraction
from .multicurve import (
    Multicurve,
    is_irreducible,
    lambda_reduced,
    mat_vec,
    multicurve,
    perron_certificate,
    reduced_matrix,
)
from .eigen import GREATER
from .spec_model import MapSpec, tower_children


class LinearModelError(ValueError):
    pass


@dataclass(frozen=True)
class LinearChild:
    parent: int
    lo: Fraction
    hi: Fraction
    target: int
    orientation: int = 1
    degree: int = 1

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class IntervalSystem:
    """σ: I¹ → I.  Children are numbered globally, parent by parent, in
    increasing position."""

    parents: tuple[tuple[Fraction, Fraction], ...]
    children: tuple[LinearChild, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise LinearModelError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        for i, (lo, hi) in enumerate(self.parents):
            if not lo < hi:
                out.append(f"parent {i} has non-positive length")
        order = sorted(range(len(self.parents)), key=lambda i: self.parents[i][0])
        for a, b in zip(order, order[1:]):
            if self.parents[a][1] >= self.parents[b][0]:
                out.append(f"parents {a} and {b} overlap")
        last_parent = -1
        for j, c in enumerate(self.children):
            if c.parent < last_parent:
                out.append("children must be listed parent by parent")
            last_parent = c.parent
            if not (0 <= c.parent < len(self.parents) and 0 <= c.target < len(self.parents)):
                out.append(f"child {j} references a missing parent")
                return out
            if c.orientation not in (1, -1):
                out.append(f"child {j} orientation must be ±1")
            plo, phi = self.parents[c.parent]
            if not (plo <= c.lo < c.hi <= phi):
                out.append(f"child {j} is not a sub-interval of its parent")
        for i, (plo, phi) in enumerate(self.parents):
            kids = self.children_of(i)
            if not kids:
                out.append(f"parent {i} has no children")
                continue
            if kids[0].lo != plo or kids[-1].hi != phi:
                out.append(f"parent {i}: endpoints must be child endpoints (exactness)")
            for a, b in zip(kids, kids[1:]):
                if not a.hi < b.lo:
                    out.append(f"parent {i}: consecutive children need a positive gap")
        return out

    def children_of(self, parent: int) -> list[LinearChild]:
        return [c for c in self.children if c.parent == parent]

    def child_indices(self, parent: int) -> list[int]:
        return [j for j, c in enumerate(self.children) if c.parent == parent]

    def parent_length(self, i: int) -> Fraction:
        lo, hi = self.parents[i]
        return hi - lo

    def slope(self, j: int) -> Fraction:
        c = self.children[j]
        return c.orientation * self.parent_length(c.target) / c.length

    def sigma(self, j: int, x: Fraction) -> Fraction:
        c = self.children[j]
        tlo, thi = self.parents[c.target]
        t = (Fraction(x) - c.lo) / c.length
        return tlo + t * (thi - tlo) if c.orientation == 1 else thi - t * (thi - tlo)

    def sigma_inv(self, j: int, y: Fraction) -> Fraction:
        c = self.children[j]
        tlo, thi = self.parents[c.target]
        t = (Fraction(y) - tlo) / (thi - tlo)
        if c.orientation == -1:
            t = 1 - t
        return c.lo + t * c.length

    def pull_back(self, j: int, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        a, b = self.sigma_inv(j, lo), self.sigma_inv(j, hi)
        return (a, b) if a <= b else (b, a)

    def composable(self, word: Sequence[int]) -> bool:
        n = len(self.children)
        if any(not 0 <= w < n for w in word):
            return False
        return all(
            self.children[a].target == self.children[b].parent for a, b in zip(word, word[1:])
        )


# -- construction ----------------------------------------------------------------


def _weights(spec: MapSpec, mc: Multicurve) -> list[Fraction]:
    B = reduced_matrix(spec, mc).rows()
    if is_irreducible(spec, mc) and lambda_reduced(spec, mc).vs_one == GREATER:
        cert = perron_certificate(B)
        return list(cert.v)
    return [Fraction(1)] * len(B)


def from_annular_rules(
    spec: MapSpec,
    gamma,
    shrink=Fraction(4, 5),
    gap_policy: str = "equal",
) -> IntervalSystem:
    """Build the linear model of Γ from the map spec's annular rules.

    Parent lengths are a positive Perron-type vector ``w`` scaled so the
    longest parent has length 1; parents sit left to right with unit
    spacing.  In a parent with k ≥ 2 children, child c gets length
    ``s·|I_i|·w_t(c) / Σ_c' w_t(c')``; with an exact eigenvector this is
    ``s·w_t/λ₀`` on a parent of length ``w_i``.  Gaps are equal.
    """
    s = as_fraction(shrink)
    if not 0 < s < 1:
        raise LinearModelError("shrink factor must lie in (0, 1)")
    if gap_policy != "equal":
        raise LinearModelError(f"unknown gap policy {gap_policy!r}")
    mc = multicurve(spec, gamma)
    idx = {c: i for i, c in enumerate(mc.classes)}
    kids = [tower_children(spec, c, mc.classes) for c in mc.classes]
    for c, k in zip(mc.classes, kids):
        if not k:
            raise LinearModelError(f"class {c} has no preimage homotopic to it in Γ")
    w = _weights(spec, mc)
    top = max(w)
    lengths = [x / top for x in w]
    parents = []
    pos = Fraction(0)
    for L in lengths:
        parents.append((pos, pos + L))
        pos += L + 1
    children = []
    for i, (cls, ks) in enumerate(zip(mc.classes, kids)):
        plo, phi = parents[i]
        if len(ks) == 1:
            ch = ks[0]
            children.append(LinearChild(i, plo, phi, idx[ch.target], ch.orientation, ch.degree))
            continue
        total_w = sum(w[idx[ch.target]] for ch in ks)
        gap = (1 - s) * lengths[i] / (len(ks) - 1)
        x = plo
        for n, ch in enumerate(ks):
            L = s * lengths[i] * w[idx[ch.target]] / total_w
            hi = phi if n == len(ks) - 1 else x + L
            children.append(LinearChild(i, x, hi, idx[ch.target], ch.orientation, ch.degree))
            x = hi + gap
    return IntervalSystem(tuple(parents), tuple(children), mc.classes)


# -- refinement -----------------------------------------------------------------


@dataclass(frozen=True)
class LevelInterval:
    parent: int
    address: tuple[int, ...]
    lo: Fraction
    hi: Fraction

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class RefinementLevel:
    depth: int
    intervals: tuple[LevelInterval, ...]

    def count_in(self, parent: int) -> int:
        return sum(1 for iv in self.intervals if iv.parent == parent)

    def endpoints(self) -> set[Fraction]:
        return {x for iv in self.intervals for x in (iv.lo, iv.hi)}


def _level(sys: IntervalSystem, parent: int, k: int, memo: dict) -> list[tuple[tuple[int, ...], Fraction, Fraction]]:
    key = (parent, k)
    if key in memo:
        return memo[key]
    if k == 0:
        lo, hi = sys.parents[parent]
        out = [((), lo, hi)]
    else:
        out = []
        for j in sys.child_indices(parent):
            target = sys.children[j].target
            for addr, lo, hi in _level(sys, target, k - 1, memo):
                a, b = sys.pull_back(j, lo, hi)
                out.append(((j,) + addr, a, b))
        out.sort(key=lambda t: t[1])
    memo[key] = out
    return out


def refine(sys: IntervalSystem, k: int) -> RefinementLevel:
    """Level-k intervals ``σ^{-k}(I)``, sorted by position."""
    if k < 0:
        raise ValueError("k must be non-negative")
    memo: dict = {}
    intervals = []
    for i in range(len(sys.parents)):
        for addr, lo, hi in _level(sys, i, k, memo):
            intervals.append(LevelInterval(i, addr, lo, hi))
    intervals.sort(key=lambda iv: iv.lo)
    return RefinementLevel(k, tuple(intervals))


# -- expansion -------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    l1: Fraction
    L: tuple[Fraction, ...]  # L[k] for k = 0..horizon
    first_k: Optional[int]
    horizon: int

    @property
    def horizon_exceeded(self) -> bool:
        return self.first_k is None


def max_level_lengths(sys: IntervalSystem, horizon: int) -> list[Fraction]:
    """``L_k`` for k = 0..horizon without enumerating the intervals.

    A level-k interval inside child c is the affine pull-back of a
    level-(k-1) interval of the target parent, scaled by ``|c|/|I_t|``.
    """
    n = len(sys.parents)
    cur = [sys.parent_length(i) for i in range(n)]
    out = [max(cur)]
    ratio = [c.length / sys.parent_length(c.target) for c in sys.children]
    for _ in range(horizon):
        nxt = [Fraction(0)] * n
        for j, c in enumerate(sys.children):
            v = ratio[j] * cur[c.target]
            if v > nxt[c.parent]:
                nxt[c.parent] = v
        cur = nxt
        out.append(max(cur))
    return out


def expansion_report(sys: IntervalSystem, horizon: int) -> ExpansionReport:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    l1 = min(c.length for c in sys.children)
    L = max_level_lengths(sys, horizon)
    first = next((k for k in range(1, horizon + 1) if L[k] < l1), None)
    return ExpansionReport(l1, tuple(L), first, horizon)


# -- itineraries -----------------------------------------------------------------


@dataclass(frozen=True)
class Itinerary:
    """Eventually periodic (``head`` + repeated ``cycle``) or generated.

    A generator maps an index to a child index.  ``wandering`` records the
    user's assertion that the generated sequence is not eventually
    periodic.
    """

    head: tuple[int, ...] = ()
    cycle: tuple[int, ...] = ()
    generator: Optional[Callable[[int], int]] = field(default=None, compare=False)
    wandering: bool = False
    name: str = ""

    def __post_init__(self):
        if self.generator is None and not self.cycle:
            raise ValueError("an itinerary needs a cycle or a generator")

    def symbol(self, k: int) -> int:
        if self.generator is not None:
            return self.generator(k)
        if k < len(self.head):
            return self.head[k]
        return self.cycle[(k - len(self.head)) % len(self.cycle)]

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.symbol(k) for k in range(n))

    def normalized(self) -> "Itinerary":
        """Shortest head and primitive cycle describing the same sequence."""
        if self.generator is not None:
            return self
        cyc = self.cycle
        for p in range(1, len(cyc) + 1):
            if len(cyc) % p == 0 and cyc == cyc[:p] * (len(cyc) // p):
                cyc = cyc[:p]
                break
        head = self.head
        while head and head[-1] == cyc[-1]:
            head = head[:-1]
            cyc = cyc[-1:] + cyc[:-1]
        return Itinerary(head, cyc, name=self.name)


def thue_morse_symbol(k: int) -> int:
    return bin(k).count("1") & 1


def thue_morse(symbols: tuple[int, int] = (0, 1)) -> Itinerary:
    return Itinerary(
        generator=lambda k: symbols[thue_morse_symbol(k)], wandering=True, name="thue-morse"
    )


def periodic_witness(seq: Sequence[int], max_period: int = 64) -> Optional[tuple[int, int]]:
    """Return ``(period, start)`` if some period ≤ max_period holds on the
    second half of ``seq`` onward from ``start ≤ len/2``; else None."""
    n = len(seq)
    for p in range(1, min(max_period, n - 1) + 1):
        last_bad = -1
        for i in range(n - p):
            if seq[i] != seq[i + p]:
                last_bad = i
        start = last_bad + 1
        if start <= n // 2:
            return p, start
    return None


PERIODIC, PREPERIODIC, WANDERING = "periodic", "pre-periodic", "wandering-presentation"


def classify(sys: IntervalSystem, it: Itinerary, check_length: int = 4096, max_period: int = 64) -> str:
    """Periodic, pre-periodic, or a certified wandering presentation.

    Head/cycle itineraries are normalized first, so ``head=(0), cycle=(0)``
    counts as periodic.  Generated itineraries must carry the wandering
    assertion and pass a finite non-periodicity check.
    """
    if it.generator is not None:
        if not it.wandering:
            raise ValueError("generated itinerary without a wandering assertion cannot be classified")
        seq = it.prefix(check_length)
        if not sys.composable(seq):
            raise LinearModelError("itinerary is not composable in this system")
        w = periodic_witness(seq, max_period)
        if w is not None:
            raise ValueError(f"generator looks eventually periodic (period {w[0]} from index {w[1]})")
        return WANDERING
    it = it.normalized()
    if not sys.composable(it.head + it.cycle + it.cycle[:1]):
        raise LinearModelError("itinerary is not composable in this system")
    return PERIODIC if not it.head else PREPERIODIC


@dataclass(frozen=True)
class ItineraryResult:
    word: tuple[int, ...]
    escaped_at: Optional[int] = None

    @property
    def escaped(self) -> bool:
        return self.escaped_at is not None


def itinerary_of(sys: IntervalSystem, x, n: int) -> ItineraryResult:
    """Length-n address of x, or the step at which x falls into a gap."""
    x = as_fraction(x)
    parent = next((i for i, (lo, hi) in enumerate(sys.parents) if lo <= x <= hi), None)
    if parent is None:
        return ItineraryResult((), 0)
    word = []
    for step in range(n):
        j = next(
            (j for j in sys.child_indices(parent) if sys.children[j].lo <= x <= sys.children[j].hi),
            None,
        )
        if j is None:
            return ItineraryResult(tuple(word), step)
        word.append(j)
        x = sys.sigma(j, x)
        parent = sys.children[j].target
    return ItineraryResult(tuple(word))


def point_of(sys: IntervalSystem, it, k: int) -> tuple[Fraction, Fraction]:
    """The level-k interval with address ``it[:k]`` (nested in k)."""
    word = it.prefix(k) if isinstance(it, Itinerary) else tuple(it)[:k]
    if len(word) < k:
        raise LinearModelError("itinerary shorter than requested depth")
    if not word:
        if isinstance(it, Itinerary):
            first = it.symbol(0)
            return sys.parents[sys.children[first].parent]
        raise LinearModelError("depth 0 needs at least one symbol to pick a parent")
    if not sys.composable(word):
        raise LinearModelError("non-composable word")
    lo, hi = sys.parents[sys.children[word[-1]].target]
    for j in reversed(word):
        lo, hi = sys.pull_back(j, lo, hi)
    return lo, hi


def periodic_point(sys: IntervalSystem, cycle: Sequence[int]) -> Fraction:
    """Exact fixed point of the affine composition along ``cycle``."""
    if not sys.composable(tuple(cycle) + (cycle[0],)):
        raise LinearModelError("cycle is not composable")
    # x ↦ σ_{c_{p-1}} ∘ ... ∘ σ_{c_0}(x) = a x + b
    a, b = Fraction(1), Fraction(0)
    for j in cycle:
        c = sys.children[j]
        s = sys.slope(j)
        tlo, thi = sys.parents[c.target]
        base = tlo if c.orientation == 1 else thi
        # σ_j(y) = base + s (y - c.lo)
        a, b = s * a, base + s * (b - c.lo)
    if a == 1:
        raise LinearModelError("composition is not expanding")
    return b / (1 - a)


# -- ω-limits ------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaReport:
    depth: int
    horizon: int
    addresses: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.addresses)


def omega_limit_approx(sys: IntervalSystem, it: Itinerary, horizon: int, depth: int) -> OmegaReport:
    """Depth-``depth`` addresses of σ^k(x) for horizon/2 ≤ k ≤ horizon.

    The depth-d address of σ^k(x) is the window ``i(x)[k : k+d]``.
    """
    seq = it.prefix(horizon + depth + 1)
    if not sys.composable(seq):
        raise LinearModelError("itinerary is not composable in this system")
    seen = {tuple(seq[k : k + depth]) for k in range(horizon // 2, horizon + 1)}
    return OmegaReport(depth, horizon, tuple(sorted(seen)))


# -- annular condition -------------------------------------------------------------


@dataclass(frozen=True)
class AnnularConditionReport:
    branching_reachable: bool
    degree_one_acyclic: bool

    @property
    def ok(self) -> bool:
        return self.branching_reachable and self.degree_one_acyclic

    def __bool__(self) -> bool:
        return self.ok


def annular_condition_check(spec: MapSpec, gamma) -> AnnularConditionReport:
    """(i) every class reaches a class with ≥ 2 children in the child
    digraph; (ii) the degree-1 children contain no cycle."""
    mc = multicurve(spec, gamma)
    g = nx.DiGraph()
    g1 = nx.DiGraph()
    g.add_nodes_from(mc.classes)
    g1.add_nodes_from(mc.classes)
    branching = set()
    for cls in mc.classes:
        kids = tower_children(spec, cls, mc.classes)
        if len(kids) >= 2:
            branching.add(cls)
        for ch in kids:
            g.add_edge(cls, ch.target)
            if ch.degree == 1:
                g1.add_edge(cls, ch.target)
    reach_ok = all(
        branching & (nx.descendants(g, cls) | {cls}) for cls in mc.classes
    )
    acyclic = nx.is_directed_acyclic_graph(g1)
    return AnnularConditionReport(reach_ok, acyclic)
