"""Hand-built specs shared by several test modules."""

import json

from cantordyn.spec_model import parse_map_spec


def make_spec(degree, p, essential, pullback, annular, config=None, substitution=None):
    xs = [f"x{i}" for i in range(p)]
    pb = {k: [{"degree": d, "image": i} for d, i in v] for k, v in pullback.items()}
    for x in xs:
        pb[x] = [{"degree": 1, "image": x}] + [{"degree": 1, "image": "null"}] * (degree - 1)
    pb["null"] = [{"degree": 1, "image": "null"}] * degree
    ann = {
        k: ["gap" if s == "gap" else {"target": s[0], "degree": s[1], "orientation": s[2] if len(s) > 2 else 1} for s in v]
        for k, v in annular.items()
    }
    doc = {
        "degree": degree,
        "post_critical_count": p,
        "classes": {"essential": list(essential), "peripheral": xs},
        "pullback": pb,
        "annular": ann,
        "config": config,
        "substitution": substitution,
    }
    return parse_map_spec(json.dumps(doc))


def chain_spec(pullbacks, degree=None, p=4):
    """Spec from {class: [(deg, image), ...]} with children derived by transposition."""
    essential = list(pullbacks)
    if degree is None:
        degree = max(sum(d for d, _ in v) for v in pullbacks.values())
    pb = {}
    for k, v in pullbacks.items():
        fill = degree - sum(d for d, _ in v)
        pb[k] = list(v) + [(1, "null")] * fill
    annular = {c: [] for c in essential}
    for target, entries in pullbacks.items():
        for d, img in entries:
            if img in annular:
                annular[img].append((target, d))
    slots = {}
    for c, kids in annular.items():
        out = []
        for i, k in enumerate(kids):
            if i:
                out.append("gap")
            out.append(k)
        slots[c] = out
    return make_spec(degree, p, essential, pb, slots)
