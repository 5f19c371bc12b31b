"""Small helpers for exact rationals in text output."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Number = Union[int, Fraction]


def fmt(x: Number) -> str:
    """Render a rational as ``p/q`` (or ``p`` when integral)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse(text: str) -> Fraction:
    return Fraction(text.strip())


def as_fraction(x) -> Fraction:
    """Accept ints, Fractions, decimal strings or ``p/q`` strings.

    Floats are converted through their decimal repr so that ``0.8``
    becomes ``4/5`` rather than a binary approximation.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")
