"""Transition matrices of multicurves and the decisions built on them.

Matrices are indexed by the multicurve's class order.  Entry ``(i, j)``
of the weighted matrix sums ``1/deg`` over the preimages of ``γ_j`` that
are homotopic to ``γ_i``; the reduced matrix counts those preimages.
Everything is exact: rationals for weights, Python integers for counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from ._rational import fmt
from .eigen import EQUAL, GREATER, LESS, EigenReport, leading_eigenvalue, same_largest_root
from .spec_model import MapSpec, require_valid

DEFAULT_WIDTH = Fraction(1, 10**6)


class MulticurveError(ValueError):
    pass


@dataclass(frozen=True)
class Multicurve:
    classes: tuple[str, ...]

    def __post_init__(self):
        if not self.classes:
            raise MulticurveError("a multicurve is non-empty")
        if len(set(self.classes)) != len(self.classes):
            raise MulticurveError("duplicate classes in multicurve")

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def index(self, cls: str) -> int:
        return self.classes.index(cls)


GammaLike = Union[Multicurve, Sequence[str], str]


def multicurve(spec: MapSpec, gamma: GammaLike) -> Multicurve:
    """Coerce ``gamma`` (a Multicurve, ids, or comma-separated string)."""
    if isinstance(gamma, Multicurve):
        mc = gamma
    else:
        if isinstance(gamma, str):
            gamma = [g.strip() for g in gamma.split(",") if g.strip()]
        mc = Multicurve(tuple(gamma))
    unknown = [c for c in mc.classes if c not in spec.essential]
    if unknown:
        raise MulticurveError(f"unknown class id(s): {', '.join(unknown)}")
    return mc


@dataclass(frozen=True)
class TransitionMatrix:
    classes: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class ReducedTransitionMatrix:
    classes: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def column_sums(self) -> list[int]:
        n = len(self.classes)
        return [sum(self.entries[i][j] for i in range(n)) for j in range(n)]

    def row_sums(self) -> list[int]:
        return [sum(r) for r in self.entries]


def transition_matrix(spec: MapSpec, gamma: GammaLike) -> TransitionMatrix:
    require_valid(spec)
    mc = multicurve(spec, gamma)
    idx = {c: i for i, c in enumerate(mc.classes)}
    n = len(mc)
    a = [[Fraction(0)] * n for _ in range(n)]
    for j, beta in enumerate(mc.classes):
        for e in spec.pullback[beta]:
            i = idx.get(e.image)
            if i is not None:
                a[i][j] += Fraction(1, e.degree)
    return TransitionMatrix(mc.classes, tuple(tuple(r) for r in a))


def reduced_matrix(spec: MapSpec, gamma: GammaLike) -> ReducedTransitionMatrix:
    require_valid(spec)
    mc = multicurve(spec, gamma)
    idx = {c: i for i, c in enumerate(mc.classes)}
    n = len(mc)
    b = [[0] * n for _ in range(n)]
    for j, beta in enumerate(mc.classes):
        for e in spec.pullback[beta]:
            i = idx.get(e.image)
            if i is not None:
                b[i][j] += 1
    return ReducedTransitionMatrix(mc.classes, tuple(tuple(r) for r in b))


# -- matrix helpers ----------------------------------------------------------


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_pow(A, n: int):
    size = len(A)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    base = [list(r) for r in A]
    while n:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def pattern_is_irreducible(B: Sequence[Sequence]) -> bool:
    """Irreducibility of a non-negative pattern: edge j→i when B[i][j] > 0.

    Every class must be reachable from every class by a path of positive
    length, so a 1×1 zero matrix is reducible.
    """
    n = len(B)
    if n == 0:
        return False
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((j, i) for i in range(n) for j in range(n) if B[i][j])
    if n == 1:
        return bool(B[0][0])
    return nx.is_strongly_connected(g)


# -- predicates ----------------------------------------------------------------


def is_irreducible(spec: MapSpec, gamma: GammaLike) -> bool:
    return pattern_is_irreducible(reduced_matrix(spec, gamma).entries)


def is_prestable(spec: MapSpec, gamma: GammaLike) -> bool:
    """Every class of Γ is homotopic to some preimage of a class of Γ."""
    return all(s > 0 for s in reduced_matrix(spec, gamma).row_sums())


def is_stable(spec: MapSpec, gamma: GammaLike) -> bool:
    """Every essential preimage of a class of Γ is homotopic into Γ."""
    require_valid(spec)
    mc = multicurve(spec, gamma)
    ess = set(spec.essential)
    members = set(mc.classes)
    return all(
        e.image in members
        for beta in mc.classes
        for e in spec.pullback[beta]
        if e.image in ess
    )


def kappa_vector(spec: MapSpec, gamma: GammaLike, n: int) -> list[int]:
    """``κ_n`` for every class of Γ: the row sums of ``M_r^n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    B = reduced_matrix(spec, gamma).rows()
    return [sum(r) for r in mat_pow(B, n)]


def kappa(spec: MapSpec, gamma: GammaLike, cls: str, n: int) -> int:
    mc = multicurve(spec, gamma)
    return kappa_vector(spec, mc, n)[mc.index(cls)]


def kappa_table(spec: MapSpec, gamma: GammaLike, depth: int) -> list[list[int]]:
    B = reduced_matrix(spec, gamma).rows()
    size = len(B)
    P = [[int(i == j) for j in range(size)] for i in range(size)]
    rows = []
    for _ in range(depth + 1):
        rows.append([sum(r) for r in P])
        P = mat_mul(P, B)
    return rows


def m_values(spec: MapSpec, gamma: GammaLike) -> list[int]:
    """``m(γ_j)``: preimages of γ_j homotopic into Γ (column sums of M_r)."""
    return reduced_matrix(spec, gamma).column_sums()


@dataclass(frozen=True)
class HorizonReport:
    """κ_n growth up to a horizon; makes no claim about the limit."""

    horizon: int
    kappa: tuple[tuple[int, ...], ...]
    monotone: bool
    all_grew: bool

    def describe(self) -> str:
        last = self.kappa[-1]
        return (
            f"horizon {self.horizon}: κ = {list(last)}; "
            f"{'non-decreasing' if self.monotone else 'not monotone'}; "
            f"{'every class grew' if self.all_grew else 'some class did not grow'} "
            "(horizon-limited, no limit claimed)"
        )


def is_cantor(spec: MapSpec, gamma: GammaLike, horizon: Optional[int] = None):
    """Cantor test.

    In exact mode (``horizon is None``) Γ must be irreducible and the answer
    is whether some ``m(γ) ≥ 2``.  With a horizon the κ_n table is computed
    and a :class:`HorizonReport` is returned instead.
    """
    if horizon is not None:
        table = kappa_table(spec, gamma, horizon)
        mono = all(
            table[k + 1][i] >= table[k][i] for k in range(horizon) for i in range(len(table[0]))
        )
        grew = all(table[-1][i] > table[0][i] for i in range(len(table[0])))
        return HorizonReport(horizon, tuple(tuple(r) for r in table), mono, grew)
    if not is_irreducible(spec, gamma):
        raise MulticurveError(
            "exact Cantor test needs an irreducible multicurve; pass a horizon instead"
        )
    return any(m >= 2 for m in m_values(spec, gamma))


def cantor_conditions(spec: MapSpec, gamma: GammaLike) -> dict[str, bool]:
    """Three finite tests for the Cantor property, evaluated separately."""
    B = reduced_matrix(spec, gamma)
    n = len(B.classes)
    gamma1 = sum(B.row_sums())
    return {
        "count": gamma1 > n,
        "m": any(m >= 2 for m in B.column_sums()),
        "kappa1": any(k >= 2 for k in B.row_sums()),
    }


# -- eigenvalues ---------------------------------------------------------------


def lambda_gamma(spec: MapSpec, gamma: GammaLike, width=DEFAULT_WIDTH) -> EigenReport:
    return leading_eigenvalue(transition_matrix(spec, gamma).entries, width)


def lambda_reduced(spec: MapSpec, gamma: GammaLike, width=DEFAULT_WIDTH) -> EigenReport:
    return leading_eigenvalue(reduced_matrix(spec, gamma).entries, width)


@dataclass(frozen=True)
class ReducedEigenCheck:
    eigen: EigenReport
    prestable: bool
    irreducible: bool
    cantor: Optional[bool]
    violations: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations


def reduced_eigen_check(spec: MapSpec, gamma: GammaLike, width=DEFAULT_WIDTH) -> ReducedEigenCheck:
    """Check the three spectral-radius implications on Γ.

    Cantor-ness is decided exactly when Γ is irreducible; otherwise it is
    read off the κ table with growth from horizon 2·#Γ, which is exact for
    reducible matrices too (a non-negative integer matrix with spectral
    radius > 1 grows some row, and one with radius ≤ 1 cannot push every
    row to infinity unless a Jordan block of size > 1 sits at 1).
    """
    mc = multicurve(spec, gamma)
    eig = lambda_reduced(spec, mc, width)
    pre = is_prestable(spec, mc)
    irr = is_irreducible(spec, mc)
    cantor = _cantor_any(spec, mc) if not irr else is_cantor(spec, mc)
    bad = []
    if pre and eig.vs_one == LESS:
        bad.append("pre-stable but λ(M_r) < 1")
    if cantor and eig.vs_one != GREATER:
        bad.append("Cantor but λ(M_r) ≤ 1")
    if irr and eig.vs_one == GREATER and not cantor:
        bad.append("irreducible with λ(M_r) > 1 but not Cantor")
    return ReducedEigenCheck(eig, pre, irr, cantor, tuple(bad))


def _cantor_any(spec: MapSpec, mc: Multicurve) -> bool:
    """Exact Cantor test for an arbitrary Γ.

    κ_n(γ) → ∞ iff the orbit of γ under the pullback digraph reaches a
    strongly connected block with spectral radius > 1, or a chain of two
    distinct radius-1 blocks (polynomial growth).  Blocks are the SCCs of
    the digraph with edge i → j when b_ij ≥ 1 (κ counts follow rows).
    """
    B = reduced_matrix(spec, mc).rows()
    n = len(B)
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if B[i][j])
    cond = nx.condensation(g)
    growth = {}
    for c in cond.nodes:
        members = sorted(cond.nodes[c]["members"])
        sub = [[B[i][j] for j in members] for i in members]
        if len(members) == 1 and sub[0][0] == 0:
            growth[c] = "zero"
            continue
        rep = leading_eigenvalue(sub, Fraction(1, 2))
        growth[c] = {GREATER: "exp", EQUAL: "one", LESS: "zero"}[rep.vs_one]

    # longest count of radius-1 blocks along a path, and whether an exp block is reachable
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def reach(c):
        exp = growth[c] == "exp"
        ones = 1 if growth[c] == "one" else 0
        best_ones = ones
        for d in cond.successors(c):
            e, o = reach(d)
            exp = exp or e
            best_ones = max(best_ones, ones + o)
        return exp, best_ones

    for i in range(n):
        exp, ones = reach(cond.graph["mapping"][i])
        if not (exp or ones >= 2):
            return False
    return True


def is_thurston_obstruction(spec: MapSpec, gamma: GammaLike) -> bool:
    """Stable and λ_Γ ≥ 1, compared exactly."""
    if not is_stable(spec, gamma):
        return False
    return lambda_gamma(spec, gamma).vs_one in (EQUAL, GREATER)


# -- stabilization and cores ---------------------------------------------------


def stabilize(spec: MapSpec, gamma0: GammaLike) -> Multicurve:
    """Grow a pre-stable Γ₀ by essential pullback until it is stable.

    New classes are appended in universe order so the result is
    deterministic.
    """
    mc = multicurve(spec, gamma0)
    if not is_prestable(spec, mc):
        raise MulticurveError("stabilize needs a pre-stable multicurve")
    ess = spec.essential
    current = set(mc.classes)
    for _ in range(len(ess) + 1):
        nxt = set(current)
        for c in current:
            nxt.update(e.image for e in spec.pullback[c] if e.image in ess)
        if nxt == current:
            break
        current = nxt
    extra = [c for c in ess if c in current and c not in mc.classes]
    return Multicurve(mc.classes + tuple(extra))


def irreducible_core(spec: MapSpec, gamma: GammaLike, width=DEFAULT_WIDTH) -> Multicurve:
    """Strongly connected block of Γ whose Perron root equals λ_Γ."""
    mc = multicurve(spec, gamma)
    if not is_stable(spec, mc):
        raise MulticurveError("irreducible_core needs a stable multicurve")
    A = transition_matrix(spec, mc).rows()
    full = leading_eigenvalue(A, width)
    if full.hi == 0:
        raise MulticurveError("λ_Γ = 0: no irreducible core")
    n = len(A)
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((j, i) for i in range(n) for j in range(n) if A[i][j])
    blocks = sorted(sorted(c) for c in nx.strongly_connected_components(g))
    for block in blocks:
        sub = [[A[i][j] for j in block] for i in block]
        if len(block) == 1 and sub[0][0] == 0:
            continue
        if same_largest_root(A, sub):
            rep = leading_eigenvalue(sub, width)
            if rep.hi < full.lo or rep.lo > full.hi:  # pragma: no cover - defensive
                raise AssertionError("bracket mismatch in irreducible core")
            return Multicurve(tuple(mc.classes[i] for i in block))
    raise AssertionError("no block attains λ_Γ")  # pragma: no cover


def find_obstructions(spec: MapSpec, max_classes: int = 12) -> list[Multicurve]:
    """All stable subsets of the universe with λ_Γ ≥ 1 that are irreducible.

    The universe is small in practice; subsets are enumerated exhaustively
    up to ``max_classes`` classes.  The geometric requirement that the
    curves be pairwise disjoint is not modeled.
    """
    require_valid(spec)
    ess = spec.essential
    if len(ess) > max_classes:
        raise MulticurveError(f"universe too large to enumerate ({len(ess)} classes)")
    found = []
    for r in range(1, len(ess) + 1):
        for combo in combinations(ess, r):
            if is_stable(spec, combo) and is_irreducible(spec, combo):
                if lambda_gamma(spec, combo).vs_one in (EQUAL, GREATER):
                    found.append(Multicurve(combo))
    return found


# -- reporting -----------------------------------------------------------------


def analysis_report(spec: MapSpec, gamma: GammaLike, width=DEFAULT_WIDTH, depth: int = 6) -> dict:
    mc = multicurve(spec, gamma)
    A = transition_matrix(spec, mc)
    B = reduced_matrix(spec, mc)
    lam = lambda_gamma(spec, mc, width)
    lam_r = lambda_reduced(spec, mc, width)
    stable = is_stable(spec, mc)
    irr = is_irreducible(spec, mc)
    check = reduced_eigen_check(spec, mc, width)
    obstruction = stable and lam.vs_one in (EQUAL, GREATER)
    return {
        "multicurve": list(mc.classes),
        "transition_matrix": [[fmt(x) for x in r] for r in A.entries],
        "reduced_matrix": [list(r) for r in B.entries],
        "lambda": {"bracket": [fmt(lam.lo), fmt(lam.hi)], "vs_one": lam.vs_one},
        "lambda_reduced": {"bracket": [fmt(lam_r.lo), fmt(lam_r.hi)], "vs_one": lam_r.vs_one},
        "stable": stable,
        "prestable": is_prestable(spec, mc),
        "irreducible": irr,
        "cantor": check.cantor,
        "cantor_mode": "exact" if irr else "block-growth",
        "m": B.column_sums(),
        "kappa": kappa_table(spec, mc, depth),
        "thurston_obstruction": obstruction,
        "eigen_lemma_violations": list(check.violations),
    }


def summary_line(report: dict) -> str:
    lam = report["lambda"]
    lo, hi = lam["bracket"]
    lam_text = lo if lo == hi else f"[{lo}, {hi}]"
    if report["thurston_obstruction"]:
        return f"OBSTRUCTION λ={lam_text}"
    parts = [f"λ={lam_text}"]
    parts.append("Cantor" if report["cantor"] else "not Cantor")
    if not report["stable"]:
        parts.append("not stable")
    return ", ".join(parts)


# -- Perron certificates -------------------------------------------------------


@dataclass(frozen=True)
class PerronCertificate:
    """Rational ``λ > 1`` and positive ``v`` with ``M v > λ v`` entrywise."""

    lam: Fraction
    v: tuple[Fraction, ...]
    k: int
    method: str

    def verify(self, B) -> bool:
        Mv = mat_vec(B, self.v)
        return all(x > 0 for x in self.v) and all(a > self.lam * b for a, b in zip(Mv, self.v))


def check_perron_inequality(B, v, lam) -> bool:
    """Exact check of ``B v > lam·v`` with ``v > 0``."""
    v = [Fraction(x) for x in v]
    lam = Fraction(lam)
    Mv = mat_vec(B, v)
    return all(x > 0 for x in v) and all(a > lam * b for a, b in zip(Mv, v))


def perron_certificate(B, max_steps: int = 256) -> PerronCertificate:
    """Constructive certificate for a matrix with spectral radius λ₀ > 1.

    λ is the midpoint of 1 and a rational lower bound of λ₀.  The vector is
    searched first among ``B^k·1`` and, since those oscillate for periodic
    matrices, then among ``(I+B)^k·1``, which converge to the Perron
    direction for every irreducible B.
    """
    B = [[Fraction(x) for x in row] for row in B]
    rep = leading_eigenvalue(B, Fraction(1, 2**20))
    if rep.vs_one != GREATER:
        raise MulticurveError("no Perron certificate: λ(M_r) ≤ 1 (not Cantor)")
    width = Fraction(1, 2**20)
    while rep.lo <= 1:
        width /= 2**10
        rep = leading_eigenvalue(B, width)
    lam = (1 + rep.lo) / 2
    n = len(B)
    v = [Fraction(1)] * n
    for k in range(max_steps):
        if check_perron_inequality(B, v, lam):
            return PerronCertificate(lam, tuple(v), k, "power")
        v = mat_vec(B, v)
        if not any(v):
            break
    IB = [[B[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    v = [Fraction(1)] * n
    for k in range(max_steps):
        if check_perron_inequality(B, v, lam):
            return PerronCertificate(lam, tuple(v), k, "shifted-power")
        v = mat_vec(IB, v)
        g = max(v)
        v = [x / g for x in v]  # keep numbers small; positivity unaffected
    raise MulticurveError("could not find a positive vector with M v > λ v")
