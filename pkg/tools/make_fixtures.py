"""Regenerate the shipped fixtures under src/cantordyn/fixtures."""

from __future__ import annotations

import json
from pathlib import Path

from cantordyn.folding import (
    InjectiveTreeWitness,
    airplane_fixture_spec,
    airplane_plan,
    emit_map_spec,
    plan_from_recipe,
    plan_to_text,
)
from cantordyn.spec_model import parse_map_spec, serialize_map_spec, validate

OUT = Path(__file__).resolve().parents[1] / "src" / "cantordyn" / "fixtures"


def entries(*pairs):
    return [{"degree": d, "image": i} for d, i in pairs]


def nulls(n):
    return entries(*[(1, "null")] * n)


def peripheral(xs, d):
    return {x: entries((1, x)) + nulls(d - 1) for x in xs}


def doc(degree, p, essential, pullback, annular, config=None, substitution=None):
    xs = [f"x{i}" for i in range(p)]
    pb = {k: entries(*v) for k, v in pullback.items()}
    pb.update(peripheral(xs, degree))
    pb["null"] = nulls(degree)
    return {
        "degree": degree,
        "post_critical_count": p,
        "classes": {"essential": essential, "peripheral": xs},
        "pullback": pb,
        "annular": annular,
        "config": config,
        "substitution": substitution,
    }


def child(t, d, o=1):
    return {"target": t, "degree": d, "orientation": o}


def piece(i, bnd, m):
    return {"id": i, "boundary": bnd, "marked": m}


def cfg(vertices, edges):
    return {
        "vertices": [{"id": v, "marked": m} for v, m in vertices],
        "edges": [{"class": c, "ends": [a, b]} for c, a, b in edges],
    }


SPECS = {
    # linear-model example: one class, two same-orientation children
    "two_children": doc(
        5, 4, ["alpha"],
        {"alpha": [(2, "alpha"), (3, "alpha")]},
        {"alpha": [child("alpha", 2), "gap", child("alpha", 3)]},
    ),
    # a single preimage homotopic to itself: not Cantor
    "mating_equator": doc(
        2, 4, ["eq"],
        {"eq": [(2, "eq")]},
        {"eq": [child("eq", 2)]},
        cfg([("U", 2), ("V", 2)], [("eq", "U", "V")]),
        {"U": [piece("U", ["eq"], 2)], "V": [piece("V", ["eq"], 2)]},
    ),
    # M_r = [[0, 2], [1, 0]]
    "two_cycle": doc(
        4, 5, ["a", "b"],
        {"a": [(4, "b")], "b": [(2, "a"), (2, "a")]},
        {"a": [child("b", 2), "gap", child("b", 2, -1)], "b": [child("a", 4, -1)]},
        cfg([("P", 2), ("Q", 1), ("R", 2)], [("a", "P", "Q"), ("b", "Q", "R")]),
        {
            "P": [piece("R", ["b"], 2)],
            "Q": [piece("P", ["a"], 2), piece("Q", ["a", "b"], 1)],
            "R": [piece("a/0", ["a", "a"], 0)],
        },
    ),
    # two nested curves, each folding onto itself
    "nested_two": doc(
        4, 5, ["a", "b"],
        {"a": [(2, "a"), (2, "a")], "b": [(2, "b"), (2, "b")]},
        {
            "a": [child("a", 2, -1), "gap", child("a", 2)],
            "b": [child("b", 2), "gap", child("b", 2, -1)],
        },
        cfg([("P", 2), ("Q", 1), ("R", 2)], [("a", "P", "Q"), ("b", "Q", "R")]),
        {
            "P": [piece("a/0", ["a", "a"], 0)],
            "Q": [piece("P", ["a"], 2), piece("Q", ["a", "b"], 1), piece("R", ["b"], 2)],
            "R": [piece("b/0", ["b", "b"], 0)],
        },
    ),
    # three arms of a star rotated: irreducible, λ(M_r) = 1
    "star": doc(
        3, 6, ["a", "b", "c"],
        {"a": [(3, "c")], "b": [(3, "a")], "c": [(3, "b")]},
        {"a": [child("b", 3)], "b": [child("c", 3)], "c": [child("a", 3)]},
        cfg(
            [("O", 0), ("A", 2), ("B", 2), ("C", 2)],
            [("a", "A", "O"), ("b", "B", "O"), ("c", "C", "O")],
        ),
        {
            "O": [piece("O", ["a", "b", "c"], 0)],
            "A": [piece("C", ["c"], 2)],
            "B": [piece("A", ["a"], 2)],
            "C": [piece("B", ["b"], 2)],
        },
    ),
    # fails validation: an annular child that lands on no curve
    "broken": doc(
        2, 4, ["eq"],
        {"eq": [(2, "eq")]},
        {"eq": [child("null", 2)]},
    ),
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    written = {}
    written["airplane_folding.spec"] = serialize_map_spec(airplane_fixture_spec())
    apply2 = plan_from_recipe("apply2", 2, 23, p=8)
    written["apply2_deg2.spec"] = serialize_map_spec(emit_map_spec(apply2))
    for name, d in SPECS.items():
        text = json.dumps(d, indent=2, ensure_ascii=False) + "\n"
        if name != "broken":
            spec = parse_map_spec(text)
            diag = validate(spec)
            assert diag.ok, (name, diag.format())
            text = serialize_map_spec(spec)
        written[f"{name}.spec"] = text
    written["airplane.plan"] = plan_to_text(airplane_plan())
    written["apply2_deg2.plan"] = plan_to_text(apply2)
    apply1 = plan_from_recipe("apply1", 2, 5)
    witnessed = type(apply1)(**{**apply1.__dict__, "witness": InjectiveTreeWitness(True, 2)})
    written["apply1_deg2_witness.plan"] = plan_to_text(witnessed)
    for fname, text in written.items():
        (OUT / fname).write_text(text, encoding="utf-8")
        print("wrote", fname)


if __name__ == "__main__":
    main()
