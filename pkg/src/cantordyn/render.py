"""Deterministic text emitters: CSV tables, SVG figures, DOT graphs, reports."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Iterable, Sequence

from ._rational import fmt
from .linear_model import IntervalSystem, RefinementLevel
from .tree_tower import DualTree, TreeTower


def _plain(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x, key=repr) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in seq]
    if hasattr(x, "__dataclass_fields__"):
        return {k: _plain(getattr(x, k)) for k in x.__dataclass_fields__}
    return x


def report_text(doc) -> str:
    """Structured text report: JSON with every rational written as p/q."""
    return json.dumps(_plain(doc), indent=2, ensure_ascii=False) + "\n"


def address_text(address: Sequence[int]) -> str:
    return ".".join(str(a) for a in address)


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, Fraction) else x for x in r])
    return buf.getvalue()


def intervals_csv(levels: Sequence[RefinementLevel]) -> str:
    rows = []
    for lv in levels:
        for iv in lv.intervals:
            rows.append((lv.depth, address_text(iv.address), iv.lo, iv.hi))
    return _csv(("depth", "address", "lo", "hi"), rows)


def kappa_csv(classes: Sequence[str], table: Sequence[Sequence[int]]) -> str:
    return _csv(("n",) + tuple(classes), ([n] + list(row) for n, row in enumerate(table)))


def metric_csv(tower: TreeTower) -> str:
    if tower.metric is None:
        return _csv(("level", "edge", "length"), [])
    rows = []
    for n, lengths in enumerate(tower.metric.lengths):
        for eid in sorted(lengths):
            rows.append((n, eid, lengths[eid]))
    return _csv(("level", "edge", "length"), rows)


def _num(x: Fraction) -> str:
    return f"{float(x):.6f}".rstrip("0").rstrip(".")


def intervals_svg(sys: IntervalSystem, levels: Sequence[RefinementLevel], width: int = 800) -> str:
    """Nested intervals, one row per depth, parents on the top row."""
    lo = min(a for a, _ in sys.parents)
    hi = max(b for _, b in sys.parents)
    span = hi - lo or Fraction(1)
    scale = Fraction(width - 20) / span
    row_h = 18
    rows = [[(a, b, sys.labels[i]) for i, (a, b) in enumerate(sys.parents)]]
    for lv in levels:
        rows.append([(iv.lo, iv.hi, address_text(iv.address)) for iv in lv.intervals])
    height = row_h * len(rows) + 20
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for r, items in enumerate(rows):
        y = 10 + r * row_h
        for a, b, label in items:
            x = 10 + (a - lo) * scale
            w = max((b - a) * scale, Fraction(1, 2))
            out.append(
                f'<rect x="{_num(x)}" y="{y}" width="{_num(w)}" height="{row_h - 6}" '
                f'fill="#4a7ab5" stroke="#1d3557" stroke-width="0.5"><title>{label}</title></rect>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _dot_id(x: str) -> str:
    return '"' + x.replace('"', '\\"') + '"'


def tree_dot(tree: DualTree, lengths: dict | None = None) -> str:
    """DOT graph of T_n with node ids equal to vertex addresses."""
    out = [f"graph T{tree.level} {{", "  node [fontsize=10];"]
    for vid in sorted(tree.vertices):
        v = tree.vertices[vid]
        shape = "box" if v.kind == "core" else "circle"
        label = f"{vid}\\nmarked={v.marked}" if v.kind == "core" else vid
        out.append(f"  {_dot_id(vid)} [shape={shape}, label={_dot_id(label)}];")
    for eid in sorted(tree.edges):
        e = tree.edges[eid]
        label = eid if lengths is None else f"{eid} ({fmt(lengths[eid])})"
        out.append(f"  {_dot_id(e.left)} -- {_dot_id(e.right)} [label={_dot_id(label)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def tree_svg(tree: DualTree, width: int = 800) -> str:
    """Layered drawing of a tree: breadth-first layers from the first vertex."""
    adj = tree.adjacency()
    order = sorted(tree.vertices)
    root = order[0]
    layer = {root: 0}
    queue = [root]
    for u in queue:
        for w in sorted(adj[u]):
            if w not in layer:
                layer[w] = layer[u] + 1
                queue.append(w)
    layers: dict[int, list[str]] = {}
    for v in queue:
        layers.setdefault(layer[v], []).append(v)
    depth = max(layers) + 1
    height = 60 * depth + 40
    pos = {}
    for d, vs in layers.items():
        for i, v in enumerate(vs):
            pos[v] = (width * (i + 1) / (len(vs) + 1), 30 + 60 * d)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for eid in sorted(tree.edges):
        e = tree.edges[eid]
        (x1, y1), (x2, y2) = pos[e.left], pos[e.right]
        out.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="#1d3557"><title>{eid}</title></line>'
        )
    for v in queue:
        x, y = pos[v]
        fill = "#e63946" if tree.vertices[v].kind == "core" else "#a8dadc"
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="{fill}"><title>{v}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
