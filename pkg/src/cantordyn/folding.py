"""Folding surgeries: plans, invariants, degree bounds and certificates.

A folding ``(F, β)`` has ``m`` preimage curves of β, all homotopic to β,
with local degrees ``d_1 … d_m`` in radial order.  The two outer disks
``U_1`` and ``V_1`` map either to the same side of β (type A, ``m`` even),
each to its own side (type B, ``m`` odd) or to the opposite sides (type
C, ``m`` odd).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence

from ._rational import fmt, parse
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

BETA = "beta"
TYPES = ("A", "B", "C")
RECIPES = ("apply1", "apply1_pair", "apply2", "apply2_pair")


class FoldingError(ValueError):
    pass


def classify_type(u_image: str, v_image: str, m: Optional[int] = None) -> str:
    """Folding type from where the outer disks U_1, V_1 land ("U" or "V")."""
    for side in (u_image, v_image):
        if side not in ("U", "V"):
            raise FoldingError(f"disk image must be 'U' or 'V', got {side!r}")
    if u_image == v_image:
        kind = "A"
    elif u_image == "U":
        kind = "B"
    else:
        kind = "C"
    if m is not None:
        if m < 2:
            raise FoldingError("a folding needs m ≥ 2")
        if (kind == "A") != (m % 2 == 0):
            raise FoldingError(f"parity mismatch: type {kind} with m = {m}")
    return kind


def lambda_beta(d_seq: Sequence[int]) -> Fraction:
    if any(d < 1 for d in d_seq):
        raise FoldingError("local degrees must be positive")
    return sum((Fraction(1, d) for d in d_seq), Fraction(0))


def feasible_A(deg_g: int, m: int, d_seq: Sequence[int], post_critical_ok: bool = True) -> bool:
    """Constraints of the even-``m`` construction: d_1 = deg g and λ_β < 1."""
    return (
        post_critical_ok
        and deg_g >= 2
        and m >= 2
        and m % 2 == 0
        and len(d_seq) == m
        and all(d >= 2 for d in d_seq)
        and d_seq[0] == deg_g
        and lambda_beta(d_seq) < 1
    )


def feasible_B(
    deg_g1: int, deg_g2: int, m: int, d_seq: Sequence[int], post_critical_ok: bool = True
) -> bool:
    """Constraints of the odd-``m`` construction: d_1 = deg g_1, d_m = deg g_2."""
    return (
        post_critical_ok
        and deg_g1 >= 2
        and deg_g2 >= 2
        and deg_g1 + deg_g2 >= 5
        and m >= 3
        and m % 2 == 1
        and len(d_seq) == m
        and all(d >= 2 for d in d_seq)
        and d_seq[0] == deg_g1
        and d_seq[-1] == deg_g2
        and lambda_beta(d_seq) < 1
    )


# -- degree bounds ---------------------------------------------------------------


def _need_poly(*degs: int) -> None:
    if any(d < 2 for d in degs):
        raise FoldingError("polynomial degrees must be at least 2")


def min_degree_apply1(deg_g: int) -> int:
    _need_poly(deg_g)
    return max(deg_g + 2, 5)


def min_degree_apply1_pair(d1: int, d2: int) -> int:
    """Smallest d with d > d1 + d2 + d1·d2/(d1·d2 − d1 − d2)."""
    _need_poly(d1, d2)
    denom = d1 * d2 - d1 - d2
    if denom <= 0:
        raise FoldingError(f"need deg g1·deg g2 > deg g1 + deg g2, got {d1}, {d2}")
    bound = d1 + d2 + Fraction(d1 * d2, denom)
    return bound.numerator // bound.denominator + 1


def min_degree_apply2(deg_g: int) -> int:
    _need_poly(deg_g)
    return deg_g + (deg_g + 1) * (deg_g + 5)


def min_degree_apply2_pair(d1: int, dm: int) -> int:
    _need_poly(d1, dm)
    if d1 > dm or d1 + dm < 5:
        raise FoldingError(f"need deg g1 ≤ deg g2 and deg g1 + deg g2 ≥ 5, got {d1}, {dm}")
    return d1 + dm + d1 * (dm + 7)


MIN_DEGREE = {
    "apply1": min_degree_apply1,
    "apply1_pair": min_degree_apply1_pair,
    "apply2": min_degree_apply2,
    "apply2_pair": min_degree_apply2_pair,
}


# -- plans -----------------------------------------------------------------------


@dataclass(frozen=True)
class InjectiveTreeWitness:
    declared: bool
    k: Optional[int]


@dataclass(frozen=True)
class FoldingPlan:
    type: str
    degrees: tuple[int, ...]
    polynomial_degrees: tuple[int, ...]
    post_critical_count: int
    split: Optional[tuple[int, int]] = None
    witness: Optional[InjectiveTreeWitness] = None
    bounded_fatou: bool = True
    fatou_touching: Optional[bool] = None
    recipe: Optional[str] = None

    def __post_init__(self):
        if self.type not in TYPES:
            raise FoldingError(f"unknown folding type {self.type!r}")
        if self.m < 2:
            raise FoldingError("a folding needs m ≥ 2")
        if (self.type == "A") != (self.m % 2 == 0):
            raise FoldingError(f"parity mismatch: type {self.type} with m = {self.m}")
        if any(d < 1 for d in self.degrees):
            raise FoldingError("local degrees must be positive")
        want = 1 if self.type == "A" else 2
        if len(self.polynomial_degrees) != want:
            raise FoldingError(f"type {self.type} takes {want} polynomial degree(s)")
        if self.post_critical_count < 4:
            raise FoldingError("β needs at least two marked points on each side")
        if self.split is None:
            p = self.post_critical_count
            split = (p - 2, 2) if self.type == "A" else (p - p // 2, p // 2)
            object.__setattr__(self, "split", split)
        a, b = self.split
        if a < 2 or b < 2 or a + b != self.post_critical_count:
            raise FoldingError(f"marked split {self.split} must have ≥2 per side and sum to p")

    @property
    def m(self) -> int:
        return len(self.degrees)

    @property
    def degree(self) -> int:
        return sum(self.degrees)

    @property
    def lam(self) -> Fraction:
        return lambda_beta(self.degrees)

    @property
    def d0(self):
        """d(F, β); for type C this is a square root, see :attr:`d0_squared`."""
        if self.type == "A":
            return self.polynomial_degrees[0]
        if self.type == "B":
            return min(self.degrees[0], self.degrees[-1])
        sq = self.d0_squared
        r = isqrt(sq)
        return r if r * r == sq else sq ** 0.5

    @property
    def d0_squared(self) -> int:
        if self.type == "C":
            return self.degrees[0] * self.degrees[-1]
        return self.d0**2

    def squared(self) -> "FoldingPlan":
        """The type-B folding (F², β) of a type-C plan."""
        if self.type != "C":
            raise FoldingError("only type C plans are squared")
        # type C children start with orientation −1, so child i reverses
        # the sub-order exactly when i is even (counting from 0)
        degs = []
        for i, a in enumerate(self.degrees):
            inner = self.degrees if i % 2 else tuple(reversed(self.degrees))
            degs.extend(a * b for b in inner)
        d1 = self.degrees[0] * self.degrees[-1]
        return replace(
            self,
            type="B",
            degrees=tuple(degs),
            polynomial_degrees=(d1, d1),
            split=None,
            recipe=f"{self.recipe}+squared" if self.recipe else "squared",
        )

    def feasible(self) -> bool:
        if self.type == "A":
            return feasible_A(self.polynomial_degrees[0], self.m, self.degrees)
        if self.type == "B":
            return feasible_B(*self.polynomial_degrees, self.m, self.degrees)
        return self.lam < 1


def airplane_plan() -> FoldingPlan:
    """Folding of the square of the airplane polynomial: d = (4, 4), p = 5."""
    return FoldingPlan("A", (4, 4), (4,), 5, (3, 2))


def plan_from_recipe(which: str, deg, d: int, p: Optional[int] = None) -> FoldingPlan:
    """Instantiate the explicit degree sequence from a degree-bound proof."""
    if which not in RECIPES:
        raise FoldingError(f"unknown recipe {which!r}; choose from {', '.join(RECIPES)}")
    degs = (deg,) if isinstance(deg, int) else tuple(deg)
    pair = which.endswith("_pair")
    if len(degs) != (2 if pair else 1):
        raise FoldingError(f"{which} takes {'two polynomial degrees' if pair else 'one polynomial degree'}")
    bound = MIN_DEGREE[which](*degs)
    if d < bound:
        raise FoldingError(f"degree {d} is below the {which} bound {bound}")
    if which == "apply1":
        (g,) = degs
        seq = (g, d - g)
    elif which == "apply1_pair":
        g1, g2 = degs
        seq = (g1, d - g1 - g2, g2)
    elif which == "apply2":
        (g,) = degs
        m = g + 1 if (g + 1) % 2 == 0 else g + 2
        middle = (g + 5,) * (m - 2)
        seq = (g,) + middle + (d - g - sum(middle),)
    else:
        g1, g2 = degs
        m = g1 + 1 if (g1 + 1) % 2 == 1 else g1 + 2
        middle = (g2 + 7,) * (m - 3)
        seq = (g1,) + middle + (d - g1 - g2 - sum(middle), g2)
    kind = "A" if len(seq) % 2 == 0 else "B"
    if p is None:
        p = 4 if kind == "A" else 5
    plan = FoldingPlan(kind, seq, degs, p, recipe=which)
    if sum(seq) != d:  # pragma: no cover - arithmetic identity
        raise FoldingError("recipe degrees do not add up")
    if not plan.lam < 1:
        raise FoldingError(f"recipe gives λ_β = {fmt(plan.lam)} ≥ 1")
    if which.startswith("apply2") and not plan.d0 < plan.m:
        raise FoldingError(f"recipe gives d₀ = {plan.d0} ≥ m = {plan.m}")
    return plan


# -- certificates ----------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    kind: str
    accepted: bool
    applicable: bool = True
    data: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "accepted": self.accepted,
            "applicable": self.applicable,
            "data": _plain(self.data),
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False) + "\n"


def _plain(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def smallest_power(p: int, d0: int, m: int) -> int:
    """Smallest N ≥ 1 with (p−3)·d0^N < m^N; requires d0 < m."""
    if not d0 < m:
        raise FoldingError("no such N unless d₀ < m")
    n = 1
    while not (p - 3) * d0**n < m**n:
        n += 1
    return n


def check_thm_no1(plan: FoldingPlan) -> Certificate:
    """No obstruction when d(F, β) < m(F, β); returns the exponent N."""
    notes = []
    work = plan
    if plan.type == "C":
        work = plan.squared()
        notes.append("type C: processed as the type B folding (F², β)")
    d0, m, p = work.d0, work.m, work.post_critical_count
    data = {"d0": d0, "m": m, "p": p}
    if not d0 < m:
        notes.append(f"inapplicable: d₀ = {d0} ≥ m = {m}")
        return Certificate("thm_no1", False, False, data, tuple(notes))
    n = smallest_power(p, d0, m)
    data.update(N=n, lhs=(p - 3) * d0**n, rhs=m**n)
    return Certificate("thm_no1", True, True, data, tuple(notes))


def check_thm_no2(plan: FoldingPlan) -> Certificate:
    """Accept a declared injective-tree witness after consistency checks.

    The tree itself is not computed; acceptance is conditional on the
    declaration being true.
    """
    w = plan.witness
    if w is None or not w.declared:
        raise FoldingError("missing injective-tree witness")
    problems = []
    if w.k is None or w.k < 1:
        problems.append("witness needs an integer k ≥ 1")
    if not plan.lam < 1:
        problems.append(f"λ_β = {fmt(plan.lam)} is not below 1")
    if not plan.bounded_fatou:
        problems.append("source polynomial has no bounded Fatou domains, so no injective tree exists")
    notes = ["conditional on declared witness"]
    if plan.fatou_touching is False:
        notes.append("warning: no two bounded Fatou domains touch; the declared tree is suspect")
    data = {"k": w.k, "lambda_beta": plan.lam}
    if problems:
        return Certificate("thm_no2", False, True, data, tuple(notes + problems))
    return Certificate("thm_no2", True, True, data, tuple(notes))


def _rows(M) -> list[list[Fraction]]:
    rows = M.rows() if hasattr(M, "rows") else M
    return [[Fraction(x) for x in r] for r in rows]


def _single_cycle(rows: list[list[Fraction]]) -> bool:
    n = len(rows)
    succ = []
    for r in rows:
        nz = [j for j, x in enumerate(r) if x != 0]
        if len(nz) != 1:
            return False
        succ.append(nz[0])
    if sorted(succ) != list(range(n)):
        return False
    i, steps = 0, 0
    while True:
        i = succ[i]
        steps += 1
        if i == 0:
            return steps == n


def entry_bound_check(M, k: Sequence[int], d0, m: int, N: int = 1) -> Certificate:
    """Check a_ij ≤ d0^N k_j²/(m^N k_i²), then M v < v for v_i = 1/k_i².

    ``M`` is the transition matrix of the N-th iterate; ``N = 1`` is the
    plain entry bound.  In the single-cycle case the sharper
    ``M v ≤ v/m^N`` with v_i = 1/k_i is checked as well.
    """
    rows = _rows(M)
    n = len(rows)
    k = [int(x) for x in k]
    if len(k) != n or any(len(r) != n for r in rows):
        raise FoldingError("matrix and intersection numbers disagree in size")
    if any(x < 0 for x in k):
        raise FoldingError("intersection numbers are non-negative")
    zeros = [x == 0 for x in k]
    if all(zeros):
        return Certificate("entry_bound", False, False, {}, ("Γ does not meet β",))
    if any(zeros):
        raise FoldingError("inconsistent intersection numbers: an irreducible Γ meets β in all classes or none")
    d0n, mn = Fraction(d0) ** N, Fraction(m) ** N
    for i in range(n):
        for j in range(n):
            bound = d0n * k[j] ** 2 / (mn * k[i] ** 2)
            if rows[i][j] > bound:
                return Certificate(
                    "entry_bound",
                    False,
                    True,
                    {"entry": [i, j], "value": rows[i][j], "bound": bound},
                    ("entry bound violated",),
                )
    v = [Fraction(1, x * x) for x in k]
    Mv = [sum((rows[i][j] * v[j] for j in range(n)), Fraction(0)) for i in range(n)]
    strict = all(Mv[i] < v[i] for i in range(n))
    data = {"N": N, "v": v, "Mv": Mv, "guaranteed": n * d0n < mn}
    notes = []
    if _single_cycle(rows):
        w = [Fraction(1, x) for x in k]
        Mw = [sum((rows[i][j] * w[j] for j in range(n)), Fraction(0)) for i in range(n)]
        data["cycle_v"] = w
        data["cycle_Mv"] = Mw
        data["cycle_ok"] = all(Mw[i] <= w[i] / mn for i in range(n))
        notes.append("single cycle")
    if not strict:
        notes.append("M v < v fails")
    return Certificate("entry_bound", strict, True, data, tuple(notes))


def synthetic_entry_matrix(k: Sequence[int], d0, m: int, N: int, rng: random.Random) -> list[list[Fraction]]:
    """Random matrix meeting the entry bounds exactly (for cross-checks)."""
    n = len(k)
    d0n, mn = Fraction(d0) ** N, Fraction(m) ** N
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            bound = d0n * k[j] ** 2 / (mn * k[i] ** 2)
            row.append(bound * Fraction(rng.randint(0, 8), 8))
        out.append(row)
    return out


def certify_plan(plan: FoldingPlan, universe: Optional[MapSpec] = None) -> list[Certificate]:
    """Every applicable certificate for a plan plus an exact obstruction scan.

    The scan covers the curve classes of ``universe`` when given, else
    those of the emitted spec (which knows only β).
    """
    from .multicurve import find_obstructions

    certs = [check_thm_no1(plan)]
    if plan.witness is not None:
        certs.append(check_thm_no2(plan))
    spec = universe
    if spec is None and plan.type != "C" and plan.feasible():
        spec = emit_map_spec(plan)
    if spec is not None:
        obs = find_obstructions(spec)
        certs.append(
            Certificate(
                "obstruction_found",
                bool(obs),
                True,
                {"multicurves": [list(g) for g in obs]},
                (f"scan over classes {', '.join(spec.essential)}",),
            )
        )
    return certs


# -- emission --------------------------------------------------------------------


def _orientation(i: int) -> int:
    # radial position i counts from 0, so child i has sign (−1)^i
    return 1 if i % 2 == 0 else -1


def emit_map_spec(plan: FoldingPlan) -> MapSpec:
    """MapSpec of the explicit folding construction for a type A or B plan."""
    if plan.type == "C":
        raise FoldingError("type C plans have no direct construction; emit plan.squared()")
    if not plan.feasible():
        raise FoldingError("infeasible plan")
    m, D, p = plan.m, plan.degree, plan.post_critical_count
    peripheral = tuple(f"x{i}" for i in range(p))
    pullback = {BETA: tuple(PullbackEntry(d, BETA) for d in plan.degrees)}
    for x in peripheral:
        pullback[x] = (PullbackEntry(1, x),) + (PullbackEntry(1, NULL),) * (D - 1)
    pullback[NULL] = (PullbackEntry(1, NULL),) * D
    slots: list = []
    for i, d in enumerate(plan.degrees):
        if i:
            slots.append(GAP)
        slots.append(Child(BETA, d, _orientation(i)))
    annular = {BETA: tuple(slots)}
    config = LevelConfig((("U", plan.split[0]), ("V", plan.split[1])), (ConfigEdge(BETA, "U", "V"),))

    # outer disk U_1 lands on U; V_1 and the gaps land where their bordering child sends β's ends
    def side_of_right_end(i: int) -> str:
        return "V" if _orientation(i) == 1 else "U"

    image = {"U": "U", "V": side_of_right_end(m - 1)}
    for g in range(m - 1):
        image[gap_id(BETA, g)] = side_of_right_end(g)
    pieces = {"U": [], "V": []}
    pieces[image["U"]].append(Piece("U", (BETA,), plan.split[0]))
    pieces[image["V"]].append(Piece("V", (BETA,), plan.split[1]))
    for g in range(m - 1):
        gid = gap_id(BETA, g)
        pieces[image[gid]].append(Piece(gid, (BETA, BETA), 0))
    spec = MapSpec(
        degree=D,
        post_critical_count=p,
        essential=(BETA,),
        peripheral=peripheral,
        pullback=pullback,
        annular=annular,
        config=config,
        substitution={v: tuple(ps) for v, ps in pieces.items()},
    )
    return require_valid(spec)


def airplane_fixture_spec() -> MapSpec:
    """The airplane folding plus the obstructing curve γ₀ around x0's partner points."""
    base = emit_map_spec(airplane_plan())
    pullback = dict(base.pullback)
    pullback["gamma0"] = (
        PullbackEntry(2, "gamma0"),
        PullbackEntry(2, "gamma0"),
        PullbackEntry(2, "x0"),
        PullbackEntry(2, NULL),
    )
    annular = dict(base.annular)
    annular["gamma0"] = (Child("gamma0", 2, 1), GAP, Child("gamma0", 2, -1))
    order = ("beta", "gamma0")
    spec = MapSpec(
        degree=base.degree,
        post_critical_count=base.post_critical_count,
        essential=order,
        peripheral=base.peripheral,
        pullback={k: pullback[k] for k in order + base.peripheral + (NULL,)},
        annular={k: annular[k] for k in order},
        config=base.config,
        substitution=base.substitution,
    )
    return require_valid(spec)


# -- airplane parameter ------------------------------------------------------------


def _airplane_poly(c: Fraction) -> Fraction:
    return (c * c + c) ** 2 + c


@dataclass(frozen=True)
class AirplaneParameter:
    lo: Fraction
    hi: Fraction
    value_lo: Fraction
    value_hi: Fraction
    ordering: str = "c < x₋₁ < x₀ < 0 < x₁ < c²+c < x₂"

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def sign_change(self) -> bool:
        return self.value_lo * self.value_hi <= 0

    def orbit_residual(self) -> float:
        """|Q_c³(0)| at the bracket midpoint, a check on the period-3 cycle."""
        c = float((self.lo + self.hi) / 2)
        z = 0.0
        for _ in range(3):
            z = z * z + c
        return abs(z)


def airplane_parameter(width=Fraction(1, 10**9)) -> AirplaneParameter:
    """Bisect (c²+c)²+c = 0 on [−2, −1] with exact rationals."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    lo, hi = Fraction(-2), Fraction(-1)
    flo = _airplane_poly(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = _airplane_poly(mid)
        if fm == 0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return AirplaneParameter(lo, hi, _airplane_poly(lo), _airplane_poly(hi))


# -- plan files ------------------------------------------------------------------

_PLAN_KEYS = (
    "type",
    "degrees",
    "polynomial_degrees",
    "post_critical_count",
    "split",
    "injective_tree_witness",
    "bounded_fatou",
    "fatou_touching",
    "recipe",
)


def plan_to_document(plan: FoldingPlan) -> dict:
    w = plan.witness
    return {
        "type": plan.type,
        "degrees": list(plan.degrees),
        "polynomial_degrees": list(plan.polynomial_degrees),
        "post_critical_count": plan.post_critical_count,
        "split": list(plan.split),
        "injective_tree_witness": None if w is None else {"declared": w.declared, "k": w.k},
        "bounded_fatou": plan.bounded_fatou,
        "fatou_touching": plan.fatou_touching,
        "recipe": plan.recipe,
        # derived values, ignored on input
        "m": plan.m,
        "degree": plan.degree,
        "lambda_beta": fmt(plan.lam),
        "d0": plan.d0 if plan.type != "C" else f"sqrt({plan.d0_squared})",
    }


def plan_to_text(plan: FoldingPlan) -> str:
    return json.dumps(plan_to_document(plan), indent=2, ensure_ascii=False) + "\n"


def parse_plan(text: str) -> FoldingPlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FoldingError(f"plan is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FoldingError("plan must be an object")
    derived = {"m", "degree", "lambda_beta", "d0"}
    unknown = set(doc) - set(_PLAN_KEYS) - derived
    if unknown:
        raise FoldingError(f"unknown plan keys {sorted(unknown)}")
    for key in ("type", "degrees", "polynomial_degrees", "post_critical_count"):
        if key not in doc:
            raise FoldingError(f"plan is missing {key!r}")
    w = doc.get("injective_tree_witness")
    witness = None
    if w is not None:
        witness = InjectiveTreeWitness(bool(w.get("declared", False)), w.get("k"))
    try:
        plan = FoldingPlan(
            doc["type"],
            tuple(int(x) for x in doc["degrees"]),
            tuple(int(x) for x in doc["polynomial_degrees"]),
            int(doc["post_critical_count"]),
            tuple(doc["split"]) if doc.get("split") is not None else None,
            witness,
            bool(doc.get("bounded_fatou", True)),
            doc.get("fatou_touching"),
            doc.get("recipe"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FoldingError):
            raise
        raise FoldingError(f"malformed plan: {exc}") from None
    if "lambda_beta" in doc and parse(str(doc["lambda_beta"])) != plan.lam:
        raise FoldingError("declared lambda_beta disagrees with the degrees")
    return plan


def load_plan(path) -> FoldingPlan:
    with open(path, encoding="utf-8") as fh:
        return parse_plan(fh.read())
