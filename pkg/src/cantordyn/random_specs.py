"""Random MapSpecs with consistent tree data, for property tests.

A spec is grown from a random tree T_0 whose edges are the essential
classes.  A random map τ_0 on the vertices is chosen, and the children of
an edge γ = (L, R) are the edges of a walk in T_0 from τ_0(L) to τ_0(R)
(the tree path plus random back-and-forth detours).  Interior walk
vertices are the gap images, so the substitution rules are consistent by
construction and every pullback tree is a subdivision of T_0.

Seeds come from ``CANTORDYN_SEED`` unless given explicitly.
"""

from __future__ import annotations

import os
import random
from math import gcd
from typing import Iterator, Optional

import networkx as nx

from .multicurve import pattern_is_irreducible
from .spec_model import (
    GAP,
    NULL,
    Child,
    ConfigEdge,
    LevelConfig,
    MapSpec,
    Piece,
    PullbackEntry,
    gap_id,
    require_valid,
)

MAX_DEGREE = 8


def default_seed() -> int:
    return int(os.environ.get("CANTORDYN_SEED", "0"))


def _random_tree(rng: random.Random, n_edges: int) -> nx.Graph:
    g = nx.Graph()
    g.add_node(0)
    for v in range(1, n_edges + 1):
        g.add_edge(rng.randrange(v), v)
    return g


def _walk(rng: random.Random, g: nx.Graph, a: int, b: int, max_len: int) -> Optional[list[int]]:
    path = nx.shortest_path(g, a, b)
    need_detour = a == b
    while len(path) - 1 < max_len and (need_detour or rng.random() < 0.5):
        if len(path) + 1 > max_len:
            break
        i = rng.randrange(len(path))
        w = rng.choice(sorted(g.neighbors(path[i])))
        path = path[: i + 1] + [w, path[i]] + path[i + 1 :]
        need_detour = False
    if len(path) < 2 or len(path) - 1 > max_len:
        return None
    return path


def _assemble(
    g: nx.Graph,
    edges: list[tuple[int, int]],
    walks: list[list[int]],
    tau: dict[int, int],
    rng: random.Random,
    degree: Optional[int] = None,
) -> Optional[MapSpec]:
    names = [f"c{i}" for i in range(len(edges))]
    edge_name = {}
    for name, (u, v) in zip(names, edges):
        edge_name[(u, v)] = (name, 1)
        edge_name[(v, u)] = (name, -1)
    vname = {v: f"v{v}" for v in g.nodes}
    marked = {v: (2 if g.degree(v) == 1 else 1 if g.degree(v) == 2 else 0) for v in g.nodes}
    p = sum(marked.values())

    kids: dict[str, list[tuple[str, int]]] = {}
    for name, walk in zip(names, walks):
        kids[name] = [edge_name[(walk[i], walk[i + 1])] for i in range(len(walk) - 1)]
    incoming: dict[str, int] = {n: 0 for n in names}
    for ks in kids.values():
        for t, _ in ks:
            incoming[t] += 1
    pieces: dict[int, int] = {v: 0 for v in g.nodes}
    for v in g.nodes:
        pieces[tau[v]] += 1
    for walk in walks:
        for x in walk[1:-1]:
            pieces[x] += 1
    top = max(max(incoming.values()), max(pieces.values()))
    if top > MAX_DEGREE:
        return None
    D = degree if degree is not None else rng.randint(max(top, 2), MAX_DEGREE)
    if D < top:
        return None

    # spread the degree budget of each target over its incoming children
    budget = {n: D - incoming[n] for n in names}
    annular = {}
    entries: dict[str, list[PullbackEntry]] = {n: [] for n in names}
    for name in names:
        slots: list = []
        for i, (t, o) in enumerate(kids[name]):
            extra = rng.randint(0, min(budget[t], 2))
            budget[t] -= extra
            if i:
                slots.append(GAP)
            slots.append(Child(t, 1 + extra, o))
            entries[t].append(PullbackEntry(1 + extra, name))
        annular[name] = tuple(slots)
    peripheral = tuple(f"x{i}" for i in range(p))
    pullback = {}
    for n in names:
        fill = D - sum(e.degree for e in entries[n])
        pullback[n] = tuple(entries[n]) + (PullbackEntry(1, NULL),) * fill
    for x in peripheral:
        pullback[x] = (PullbackEntry(1, x),) + (PullbackEntry(1, NULL),) * (D - 1)
    pullback[NULL] = (PullbackEntry(1, NULL),) * D

    config = LevelConfig(
        tuple((vname[v], marked[v]) for v in sorted(g.nodes)),
        tuple(ConfigEdge(n, vname[u], vname[v]) for n, (u, v) in zip(names, edges)),
    )
    sub: dict[str, list[Piece]] = {vname[v]: [] for v in g.nodes}
    for v in sorted(g.nodes):
        inc = tuple(sorted(n for n, (a, b) in zip(names, edges) if v in (a, b)))
        sub[vname[tau[v]]].append(Piece(vname[v], inc, marked[v]))
    for name, walk in zip(names, walks):
        for gi, x in enumerate(walk[1:-1]):
            sub[vname[x]].append(Piece(gap_id(name, gi), (name, name), 0))
    spec = MapSpec(
        degree=D,
        post_critical_count=p,
        essential=tuple(names),
        peripheral=peripheral,
        pullback=pullback,
        annular=annular,
        config=config,
        substitution={k: tuple(v) for k, v in sub.items()},
    )
    return require_valid(spec)


def random_spec(
    rng: random.Random,
    max_classes: int = 5,
    irreducible: bool = False,
    max_children: int = 4,
) -> MapSpec:
    """A random valid spec; every class has at least one child (pre-stable)."""
    for _ in range(10_000):
        n = rng.randint(1, max_classes)
        g = _random_tree(rng, n)
        edges = sorted(g.edges)
        tau = {v: rng.choice(sorted(g.nodes)) for v in g.nodes}
        walks = []
        for u, v in edges:
            w = _walk(rng, g, tau[u], tau[v], max_children)
            if w is None:
                break
            walks.append(w)
        else:
            if irreducible and not _irreducible(edges, walks):
                continue
            spec = _assemble(g, edges, walks, tau, rng)
            if spec is not None:
                return spec
    raise RuntimeError("random spec generation did not converge")  # pragma: no cover


def _irreducible(edges, walks) -> bool:
    idx = {frozenset(e): i for i, e in enumerate(edges)}
    n = len(edges)
    B = [[0] * n for _ in range(n)]
    for i, w in enumerate(walks):
        for a, b in zip(w, w[1:]):
            B[i][idx[frozenset((a, b))]] += 1
    return pattern_is_irreducible(B)


def star_rotation_spec(rng: random.Random, max_classes: int = 5) -> MapSpec:
    """Irreducible but not Cantor: the arms of a star are cyclically permuted."""
    k = rng.randint(1, max_classes)
    g = nx.star_graph(k)  # centre 0, leaves 1..k
    edges = [(0, i) for i in range(1, k + 1)]
    shift = rng.randrange(1, k) if k > 1 else 0
    # a rotation by a shift coprime to k keeps the class digraph one cycle
    while k > 1 and gcd(shift, k) != 1:
        shift = rng.randrange(1, k)
    tau = {0: 0}
    for i in range(1, k + 1):
        tau[i] = (i - 1 + shift) % k + 1
    walks = [[0, tau[i]] for i in range(1, k + 1)]
    spec = _assemble(g, edges, walks, tau, rng)
    assert spec is not None
    return spec


def irreducible_corpus(count: int, seed: Optional[int] = None, max_classes: int = 5) -> Iterator[MapSpec]:
    """Irreducible specs, roughly a quarter of them non-Cantor rotations."""
    rng = random.Random(default_seed() if seed is None else seed)
    for _ in range(count):
        if rng.random() < 0.25:
            yield star_rotation_spec(rng, max_classes)
        else:
            yield random_spec(rng, max_classes, irreducible=True)


def prestable_corpus(count: int, seed: Optional[int] = None, max_classes: int = 5) -> Iterator[MapSpec]:
    rng = random.Random(default_seed() if seed is None else seed)
    for _ in range(count):
        yield random_spec(rng, max_classes)
