"""Map-spec data model, its JSON text format, and the validator.

A map spec describes how curves pull back under a branched covering:
which classes the preimage curves fall into, in which radial order the
essential preimages sit inside the annulus of their class, and how the
complementary components of the level-0 curve family pull back.

File layout (all keys required, ``config``/``substitution`` may be null)::

    {
      "degree": 8,
      "post_critical_count": 5,
      "classes": {"essential": ["beta"], "peripheral": ["x0", ...]},
      "pullback": {"beta": [{"degree": 4, "image": "beta"}, ...], "null": [...]},
      "annular": {"beta": [{"target": "beta", "degree": 4, "orientation": 1},
                           "gap", {...}]},
      "config": {"vertices": [{"id": "U", "marked": 3}, ...],
                 "edges": [{"class": "beta", "ends": ["U", "V"]}]},
      "substitution": {"U": [{"id": "U", "boundary": ["beta"], "marked": 3},
                             {"id": "beta/1", "boundary": ["beta", "beta"],
                              "marked": 0}], ...}
    }

Piece ids in ``substitution`` are either level-0 vertex ids (the "core"
copy of that component one level up) or ``<class>/<g>``, the g-th gap
annulus between consecutive children of that class.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

NULL = "null"
GAP = "gap"

__all__ = [
    "NULL",
    "GAP",
    "PullbackEntry",
    "Child",
    "ConfigEdge",
    "LevelConfig",
    "Piece",
    "MapSpec",
    "Diagnostics",
    "SpecError",
    "SpecSyntaxError",
    "SpecSchemaError",
    "InvalidSpecError",
    "parse_map_spec",
    "serialize_map_spec",
    "load_map_spec",
    "validate",
    "require_valid",
    "restrict",
    "gap_id",
    "split_gap_id",
]


class SpecError(ValueError):
    """Base class for map-spec input problems."""


class SpecSyntaxError(SpecError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"syntax error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SpecSchemaError(SpecError):
    def __init__(self, path: str, message: str):
        super().__init__(f"schema error at {path}: {message}")
        self.path = path
        self.message = message


class InvalidSpecError(SpecError):
    """Raised by downstream operations when a spec carries validation errors."""

    def __init__(self, diagnostics: "Diagnostics"):
        lines = "; ".join(f"{loc}: {msg}" for loc, msg in diagnostics.errors[:5])
        super().__init__(f"map spec failed validation: {lines}")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class PullbackEntry:
    degree: int
    image: str


@dataclass(frozen=True)
class Child:
    target: str
    degree: int
    orientation: int = 1


@dataclass(frozen=True)
class ConfigEdge:
    cls: str
    left: str
    right: str


@dataclass(frozen=True)
class LevelConfig:
    vertices: tuple[tuple[str, int], ...]
    edges: tuple[ConfigEdge, ...]

    def marked(self, vertex: str) -> int:
        return dict(self.vertices)[vertex]

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(e.cls for e in self.edges)

    def edge(self, cls: str) -> ConfigEdge:
        for e in self.edges:
            if e.cls == cls:
                return e
        raise KeyError(cls)

    def incident(self, vertex: str) -> list[str]:
        return sorted(e.cls for e in self.edges if vertex in (e.left, e.right))


@dataclass(frozen=True)
class Piece:
    id: str
    boundary: tuple[str, ...]
    marked: int


Slot = Union[Child, str]


def gap_id(cls: str, index: int) -> str:
    return f"{cls}/{index}"


def split_gap_id(piece_id: str) -> Optional[tuple[str, int]]:
    cls, sep, idx = piece_id.rpartition("/")
    if not sep or not idx.isdigit():
        return None
    return cls, int(idx)


@dataclass(frozen=True, eq=False)
class MapSpec:
    """Immutable combinatorial description of a branched covering.

    ``pullback`` covers every essential and peripheral class plus ``null``;
    ``annular`` covers the essential classes.  ``config`` and
    ``substitution`` are optional: without them the spec still supports
    matrix analysis and the linear model, but not the tree tower.
    """

    degree: int
    post_critical_count: int
    essential: tuple[str, ...]
    peripheral: tuple[str, ...]
    pullback: Mapping[str, tuple[PullbackEntry, ...]]
    annular: Mapping[str, tuple[Slot, ...]]
    config: Optional[LevelConfig] = None
    substitution: Optional[Mapping[str, tuple[Piece, ...]]] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False, init=False)

    @property
    def curve_classes(self) -> tuple[str, ...]:
        return self.essential

    @property
    def peripheral_classes(self) -> tuple[str, ...]:
        return self.peripheral + (NULL,)

    def children(self, cls: str) -> tuple[Child, ...]:
        return tuple(s for s in self.annular[cls] if isinstance(s, Child))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MapSpec):
            return NotImplemented
        return serialize_map_spec(self) == serialize_map_spec(other)

    def __hash__(self) -> int:
        return id(self)


@dataclass
class Diagnostics:
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, location: str, message: str) -> None:
        self.errors.append((location, message))

    def warn(self, location: str, message: str) -> None:
        self.warnings.append((location, message))

    def format(self) -> str:
        out = [f"error   {loc}: {msg}" for loc, msg in self.errors]
        out += [f"warning {loc}: {msg}" for loc, msg in self.warnings]
        return "\n".join(out)


# --------------------------------------------------------------------------
# parsing

_TOP_KEYS = (
    "degree",
    "post_critical_count",
    "classes",
    "pullback",
    "annular",
    "config",
    "substitution",
)


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ValueError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _check_keys(obj, path: str, required: Sequence[str], optional: Sequence[str] = ()):
    if not isinstance(obj, dict):
        raise SpecSchemaError(path, "expected an object")
    allowed = set(required) | set(optional)
    for k in obj:
        if k not in allowed:
            raise SpecSchemaError(f"{path}.{k}", "unknown key")
    for k in required:
        if k not in obj:
            raise SpecSchemaError(f"{path}.{k}", "missing key")


def _int(obj, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SpecSchemaError(path, "expected an integer")
    if minimum is not None and obj < minimum:
        raise SpecSchemaError(path, f"must be >= {minimum}")
    return obj


def _str(obj, path: str) -> str:
    if not isinstance(obj, str) or not obj:
        raise SpecSchemaError(path, "expected a non-empty string")
    return obj


def _list(obj, path: str) -> list:
    if not isinstance(obj, list):
        raise SpecSchemaError(path, "expected a list")
    return obj


def parse_map_spec(text: str) -> MapSpec:
    """Parse the JSON map-spec format.

    Raises :class:`SpecSyntaxError` for malformed JSON and
    :class:`SpecSchemaError` (with a dotted field path) for structural
    problems, unknown keys, and pullback rules whose degrees do not add up
    to the global degree.
    """
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:  # duplicate keys
        raise SpecSchemaError("$", str(exc)) from None

    _check_keys(raw, "$", _TOP_KEYS)
    degree = _int(raw["degree"], "$.degree", 1)
    p = _int(raw["post_critical_count"], "$.post_critical_count", 0)

    classes = raw["classes"]
    _check_keys(classes, "$.classes", ("essential", "peripheral"))
    essential = tuple(
        _str(c, f"$.classes.essential[{i}]")
        for i, c in enumerate(_list(classes["essential"], "$.classes.essential"))
    )
    peripheral = tuple(
        _str(c, f"$.classes.peripheral[{i}]")
        for i, c in enumerate(_list(classes["peripheral"], "$.classes.peripheral"))
    )

    pb_raw = raw["pullback"]
    if not isinstance(pb_raw, dict):
        raise SpecSchemaError("$.pullback", "expected an object")
    pullback: dict[str, tuple[PullbackEntry, ...]] = {}
    for cls, entries in pb_raw.items():
        path = f"$.pullback.{cls}"
        parsed = []
        for i, e in enumerate(_list(entries, path)):
            _check_keys(e, f"{path}[{i}]", ("degree", "image"))
            parsed.append(
                PullbackEntry(
                    _int(e["degree"], f"{path}[{i}].degree", 1),
                    _str(e["image"], f"{path}[{i}].image"),
                )
            )
        total = sum(e.degree for e in parsed)
        if total != degree:
            raise SpecSchemaError(
                path, f"degree sum mismatch: local degrees add to {total}, expected {degree}"
            )
        pullback[cls] = tuple(parsed)

    an_raw = raw["annular"]
    if not isinstance(an_raw, dict):
        raise SpecSchemaError("$.annular", "expected an object")
    annular: dict[str, tuple[Slot, ...]] = {}
    for cls, slots in an_raw.items():
        path = f"$.annular.{cls}"
        parsed_slots: list[Slot] = []
        for i, s in enumerate(_list(slots, path)):
            if s == GAP:
                parsed_slots.append(GAP)
                continue
            _check_keys(s, f"{path}[{i}]", ("target", "degree"), ("orientation",))
            orient = _int(s.get("orientation", 1), f"{path}[{i}].orientation")
            if orient not in (1, -1):
                raise SpecSchemaError(f"{path}[{i}].orientation", "must be 1 or -1")
            parsed_slots.append(
                Child(
                    _str(s["target"], f"{path}[{i}].target"),
                    _int(s["degree"], f"{path}[{i}].degree", 1),
                    orient,
                )
            )
        annular[cls] = tuple(parsed_slots)

    config = None
    if raw["config"] is not None:
        c = raw["config"]
        _check_keys(c, "$.config", ("vertices", "edges"))
        verts = []
        for i, v in enumerate(_list(c["vertices"], "$.config.vertices")):
            _check_keys(v, f"$.config.vertices[{i}]", ("id", "marked"))
            verts.append(
                (
                    _str(v["id"], f"$.config.vertices[{i}].id"),
                    _int(v["marked"], f"$.config.vertices[{i}].marked", 0),
                )
            )
        edges = []
        for i, e in enumerate(_list(c["edges"], "$.config.edges")):
            _check_keys(e, f"$.config.edges[{i}]", ("class", "ends"))
            ends = _list(e["ends"], f"$.config.edges[{i}].ends")
            if len(ends) != 2:
                raise SpecSchemaError(f"$.config.edges[{i}].ends", "expected two vertex ids")
            edges.append(
                ConfigEdge(
                    _str(e["class"], f"$.config.edges[{i}].class"),
                    _str(ends[0], f"$.config.edges[{i}].ends[0]"),
                    _str(ends[1], f"$.config.edges[{i}].ends[1]"),
                )
            )
        config = LevelConfig(tuple(verts), tuple(edges))

    substitution = None
    if raw["substitution"] is not None:
        s_raw = raw["substitution"]
        if not isinstance(s_raw, dict):
            raise SpecSchemaError("$.substitution", "expected an object")
        substitution = {}
        for vert, pieces in s_raw.items():
            path = f"$.substitution.{vert}"
            out = []
            for i, pc in enumerate(_list(pieces, path)):
                _check_keys(pc, f"{path}[{i}]", ("id", "boundary", "marked"))
                out.append(
                    Piece(
                        _str(pc["id"], f"{path}[{i}].id"),
                        tuple(
                            _str(b, f"{path}[{i}].boundary[{j}]")
                            for j, b in enumerate(_list(pc["boundary"], f"{path}[{i}].boundary"))
                        ),
                        _int(pc["marked"], f"{path}[{i}].marked", 0),
                    )
                )
            substitution[vert] = tuple(out)

    return MapSpec(degree, p, essential, peripheral, pullback, annular, config, substitution)


def load_map_spec(path) -> MapSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_map_spec(fh.read())


# --------------------------------------------------------------------------
# serialization


def _pullback_order(spec: MapSpec) -> list[str]:
    keys = list(spec.essential) + list(spec.peripheral) + [NULL]
    keys += sorted(k for k in spec.pullback if k not in keys)
    return [k for k in keys if k in spec.pullback]


def to_document(spec: MapSpec) -> dict:
    doc: dict = {
        "degree": spec.degree,
        "post_critical_count": spec.post_critical_count,
        "classes": {"essential": list(spec.essential), "peripheral": list(spec.peripheral)},
        "pullback": {
            k: [{"degree": e.degree, "image": e.image} for e in spec.pullback[k]]
            for k in _pullback_order(spec)
        },
        "annular": {},
        "config": None,
        "substitution": None,
    }
    ann_keys = [k for k in spec.essential if k in spec.annular]
    ann_keys += sorted(k for k in spec.annular if k not in ann_keys)
    for k in ann_keys:
        doc["annular"][k] = [
            GAP
            if s == GAP
            else {"target": s.target, "degree": s.degree, "orientation": s.orientation}
            for s in spec.annular[k]
        ]
    if spec.config is not None:
        doc["config"] = {
            "vertices": [{"id": v, "marked": m} for v, m in spec.config.vertices],
            "edges": [{"class": e.cls, "ends": [e.left, e.right]} for e in spec.config.edges],
        }
    if spec.substitution is not None:
        order = list(spec.config.vertex_ids) if spec.config else []
        order += sorted(k for k in spec.substitution if k not in order)
        doc["substitution"] = {
            v: [
                {"id": pc.id, "boundary": list(pc.boundary), "marked": pc.marked}
                for pc in spec.substitution[v]
            ]
            for v in order
            if v in spec.substitution
        }
    return doc


def serialize_map_spec(spec: MapSpec) -> str:
    """Canonical, byte-stable text form (keys in schema order, 2-space indent)."""
    return json.dumps(to_document(spec), indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# validation


def _config_tree_problems(cfg: LevelConfig) -> list[str]:
    ids = cfg.vertex_ids
    problems = []
    if len(ids) < 2:
        problems.append("level-0 configuration needs at least 2 vertices")
    if len(set(ids)) != len(ids):
        problems.append("duplicate vertex id")
    if len(cfg.edges) != len(ids) - 1:
        problems.append(f"a tree on {len(ids)} vertices needs {len(ids) - 1} edges, got {len(cfg.edges)}")
    adj = defaultdict(list)
    for e in cfg.edges:
        if e.left not in ids or e.right not in ids:
            problems.append(f"edge {e.cls} references an unknown vertex")
            continue
        if e.left == e.right:
            problems.append(f"edge {e.cls} is a loop")
        adj[e.left].append(e.right)
        adj[e.right].append(e.left)
    if ids and not problems:
        seen = {ids[0]}
        queue = deque([ids[0]])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(ids):
            problems.append("level-0 configuration is not connected")
    return problems


def side_marked(cfg: LevelConfig, cls: str) -> tuple[int, int]:
    """Marked points on the (left, right) side of the edge of class ``cls``."""
    edge = cfg.edge(cls)
    adj = defaultdict(list)
    for e in cfg.edges:
        if e.cls == cls:
            continue
        adj[e.left].append(e.right)
        adj[e.right].append(e.left)
    marked = dict(cfg.vertices)

    def reach(start: str) -> int:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return sum(marked[v] for v in seen)

    return reach(edge.left), reach(edge.right)


def tower_children(spec: MapSpec, cls: str, gamma: Iterable[str]) -> tuple[Child, ...]:
    """Children of ``cls`` whose targets lie in ``gamma``, in radial order."""
    g = set(gamma)
    return tuple(c for c in spec.children(cls) if c.target in g)


def _transpose_children(spec: MapSpec) -> dict[str, Counter]:
    expected: dict[str, Counter] = {c: Counter() for c in spec.essential}
    ess = set(spec.essential)
    for src in spec.essential:
        for e in spec.pullback.get(src, ()):
            if e.image in ess:
                expected[e.image][(src, e.degree)] += 1
    return expected


def validate(spec: MapSpec) -> Diagnostics:
    """Check every structural invariant; never raises."""
    d = Diagnostics()
    ess, per = spec.essential, spec.peripheral
    all_ids = list(ess) + list(per)
    for cid, n in Counter(all_ids).items():
        if n > 1:
            d.error(f"classes.{cid}", "duplicate class id")
    for cid in all_ids:
        if cid in (NULL, GAP):
            d.error(f"classes.{cid}", f"'{cid}' is reserved")
        if "/" in cid or "." in cid:
            d.error(f"classes.{cid}", "class ids may not contain '/' or '.'")
    known = set(all_ids) | {NULL}
    ess_set = set(ess)

    if spec.degree < 1:
        d.error("degree", "degree must be positive")
    if len(per) != spec.post_critical_count:
        d.error(
            "classes.peripheral",
            f"expected one peripheral class per post-critical point ({spec.post_critical_count}), got {len(per)}",
        )
    if ess and spec.post_critical_count < 4:
        d.error("post_critical_count", "essential curve needs ≥2 points per side")

    # pullback rules
    for cls in sorted(known - set(spec.pullback)):
        d.error(f"pullback.{cls}", "missing pullback rule")
    for cls in spec.pullback:
        if cls not in known:
            d.error(f"pullback.{cls}", "rule for unknown class")
    for cls, entries in spec.pullback.items():
        loc = f"pullback.{cls}"
        for i, e in enumerate(entries):
            if e.degree < 1:
                d.error(f"{loc}[{i}]", "local degree must be ≥ 1")
            if e.image not in known:
                d.error(f"{loc}[{i}]", f"unknown image class {e.image!r}")
        total = sum(e.degree for e in entries)
        if total != spec.degree:
            d.error(loc, f"degree sum mismatch: {total} != {spec.degree}")
        if cls == NULL:
            if any(e.image != NULL or e.degree != 1 for e in entries):
                d.error(loc, "null must pull back to degree-1 null curves only")
        elif cls in per:
            if any(e.image in ess_set for e in entries):
                d.error(loc, "a peripheral curve cannot have essential preimages")

    # annular rules
    for cls in ess:
        if cls not in spec.annular:
            d.error(f"annular.{cls}", "missing annular rule")
    for cls in spec.annular:
        if cls not in ess_set:
            d.error(f"annular.{cls}", "annular rule for a non-essential class")
    expected = _transpose_children(spec)
    for cls, slots in spec.annular.items():
        loc = f"annular.{cls}"
        if not slots:
            d.error(loc, "annular rule needs at least one child")
            continue
        if not isinstance(slots[0], Child) or not isinstance(slots[-1], Child):
            d.error(loc, "first and last slots must be children (exactness)")
        for i, s in enumerate(slots):
            want_child = i % 2 == 0
            if want_child != isinstance(s, Child):
                d.error(f"{loc}[{i}]", "slots must alternate child, gap, child, ...")
                break
        for i, s in enumerate(slots):
            if not isinstance(s, Child):
                continue
            if s.target not in ess_set:
                d.error(f"{loc}[{i}]", "annular child must be essential")
            if s.orientation not in (1, -1):
                d.error(f"{loc}[{i}]", "orientation must be ±1")
        if cls in expected:
            got = Counter((c.target, c.degree) for c in spec.children(cls))
            if got != expected[cls]:
                d.error(
                    loc,
                    "children do not match the essential preimages homotopic to this class "
                    f"(expected {sorted(expected[cls].elements())}, got {sorted(got.elements())})",
                )

    if spec.config is not None:
        _validate_config(spec, d)
    elif spec.substitution is not None:
        d.error("substitution", "substitution rules need a level-0 configuration")
    return d


def _validate_config(spec: MapSpec, d: Diagnostics) -> None:
    cfg = spec.config
    problems = _config_tree_problems(cfg)
    for msg in problems:
        d.error("config", msg)
    if problems:
        return
    ess_set = set(spec.essential)
    classes = cfg.classes
    for cid, n in Counter(classes).items():
        if n > 1:
            d.error(f"config.edges.{cid}", "class appears on more than one edge")
    for c in classes:
        if c not in ess_set:
            d.error(f"config.edges.{c}", "edge class must be essential")
    if d.errors:
        return
    total = sum(m for _, m in cfg.vertices)
    if total != spec.post_critical_count:
        d.error("config.vertices", f"marked points add to {total}, expected {spec.post_critical_count}")
    for c in classes:
        left, right = side_marked(cfg, c)
        if left < 2 or right < 2:
            d.error(f"config.edges.{c}", "essential curve needs ≥2 points per side")
    for v, m in cfg.vertices:
        if len(cfg.incident(v)) == 2 and m == 0:
            d.error(f"config.vertices.{v}", "an unmarked annulus makes its two boundary curves homotopic")
    for c in classes:
        if not tower_children(spec, c, classes):
            d.error(f"annular.{c}", "no preimage of the configuration curves is homotopic to this class")
    if spec.substitution is None:
        d.error("substitution", "a level-0 configuration needs substitution rules")
        return
    if d.errors:
        return
    _validate_substitution(spec, d)


def _validate_substitution(spec: MapSpec, d: Diagnostics) -> None:
    cfg = spec.config
    sub = spec.substitution
    gamma = cfg.classes
    verts = cfg.vertex_ids
    for v in verts:
        if v not in sub:
            d.error(f"substitution.{v}", "missing substitution rule")
    for v in sub:
        if v not in verts:
            d.error(f"substitution.{v}", "rule for an unknown vertex")

    expected_pieces: dict[str, tuple[tuple[str, ...], int]] = {}
    for v, m in cfg.vertices:
        expected_pieces[v] = (tuple(cfg.incident(v)), m)
    for c in gamma:
        for g in range(len(tower_children(spec, c, gamma)) - 1):
            expected_pieces[gap_id(c, g)] = ((c, c), 0)

    image_of: dict[str, str] = {}
    for v, pieces in sub.items():
        for i, pc in enumerate(pieces):
            loc = f"substitution.{v}[{i}]"
            if pc.id in image_of:
                d.error(loc, f"piece {pc.id} listed twice")
                continue
            image_of[pc.id] = v
            if pc.id not in expected_pieces:
                d.error(loc, f"unknown piece {pc.id!r}")
                continue
            bnd, marked = expected_pieces[pc.id]
            if tuple(sorted(pc.boundary)) != tuple(sorted(bnd)):
                d.error(loc, f"boundary {list(pc.boundary)} should be {list(bnd)}")
            if pc.marked != marked:
                d.error(loc, f"marked count {pc.marked} should be {marked}")
    for v, pieces in sub.items():
        if len(pieces) > spec.degree:
            d.error(f"substitution.{v}", f"{len(pieces)} preimage components exceed the degree {spec.degree}")
    for pid in expected_pieces:
        if pid not in image_of:
            d.error("substitution", f"piece {pid} is not assigned to any component")
    if d.errors:
        return

    incident = {v: set(cfg.incident(v)) for v in verts}
    for c in gamma:
        kids = tower_children(spec, c, gamma)
        edge = cfg.edge(c)
        for i, ch in enumerate(kids):
            left = edge.left if i == 0 else gap_id(c, i - 1)
            right = edge.right if i == len(kids) - 1 else gap_id(c, i)
            tedge = cfg.edge(ch.target)
            want_left = tedge.left if ch.orientation == 1 else tedge.right
            want_right = tedge.right if ch.orientation == 1 else tedge.left
            for piece, want in ((left, want_left), (right, want_right)):
                got = image_of[piece]
                loc = f"substitution.{got}"
                if got != want:
                    d.error(
                        loc,
                        f"substitution inconsistent: piece {piece} borders child {i} of {c} "
                        f"(mapping onto {ch.target}) so it must lie over {want}, not {got}",
                    )
                elif ch.target not in incident[got]:
                    d.error(loc, f"boundary class {c} of {piece} has no matching pullback entry")


def require_valid(spec: MapSpec) -> MapSpec:
    """Raise :class:`InvalidSpecError` unless ``validate`` reports no errors."""
    ok = spec._cache.get("valid")
    if ok is None:
        diag = validate(spec)
        spec._cache["valid"] = diag
        ok = diag
    if ok.errors:
        raise InvalidSpecError(ok)
    return spec


def restrict(spec: MapSpec, keep: Sequence[str]) -> MapSpec:
    """Drop essential classes outside ``keep`` (which must be pullback-closed).

    Preimage entries pointing at dropped classes would make the result
    inconsistent, so they are rejected rather than rewritten.
    """
    keep_set = set(keep)
    unknown = keep_set - set(spec.essential)
    if unknown:
        raise KeyError(f"unknown classes {sorted(unknown)}")
    for c in keep:
        for e in spec.pullback[c]:
            if e.image in set(spec.essential) - keep_set:
                raise SpecError(f"class {c} has a preimage in dropped class {e.image}")
    essential = tuple(c for c in spec.essential if c in keep_set)
    dropped = set(spec.essential) - keep_set
    pullback = {k: v for k, v in spec.pullback.items() if k not in dropped}
    annular = {k: v for k, v in spec.annular.items() if k not in dropped}
    if spec.config is not None and dropped & set(spec.config.classes):
        raise SpecError("cannot drop a class used by the level-0 configuration")
    return MapSpec(
        spec.degree,
        spec.post_critical_count,
        essential,
        spec.peripheral,
        pullback,
        annular,
        spec.config,
        spec.substitution,
    )
