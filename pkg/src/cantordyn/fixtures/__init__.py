"""Shipped example specs and plans."""

from __future__ import annotations

from pathlib import Path

HERE = Path(__file__).resolve().parent

# fixtures that carry level-0 configuration and substitution rules
TOWER_FIXTURES = ("airplane_folding", "apply2_deg2", "mating_equator", "two_cycle", "nested_two", "star")
LINEAR_FIXTURES = TOWER_FIXTURES + ("two_children",)


def path(name: str) -> Path:
    """Path of a shipped fixture; ``name`` may omit the ``.spec`` suffix."""
    p = HERE / name
    if not p.suffix:
        p = p.with_suffix(".spec")
    if not p.exists():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return p


def names(suffix: str = ".spec") -> list[str]:
    return sorted(p.stem for p in HERE.glob(f"*{suffix}"))


def load(name: str):
    from ..spec_model import load_map_spec

    return load_map_spec(path(name))
