"""Exact Perron-root brackets for non-negative rational matrices.

The characteristic polynomial and Sturm root counting come from sympy's
exact polynomial arithmetic over QQ; the bisection that shrinks the
bracket and the comparison with 1 live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ._rational import fmt

_X = sympy.Symbol("x")

LESS, EQUAL, GREATER = "less", "equal", "greater"

Matrix = Sequence[Sequence[Fraction]]


@dataclass(frozen=True)
class EigenReport:
    """Rational bracket ``[lo, hi]`` of the spectral radius plus its exact
    comparison with 1."""

    lo: Fraction
    hi: Fraction
    vs_one: str

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def describe(self) -> str:
        if self.exact:
            return fmt(self.lo)
        return f"[{fmt(self.lo)}, {fmt(self.hi)}]"


def _q(x: Fraction):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _rat(x: Fraction) -> sympy.Rational:
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _frac(r) -> Fraction:
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def charpoly(M: Matrix) -> sympy.Poly:
    """Monic characteristic polynomial of ``M`` over QQ."""
    n = len(M)
    if n == 0:
        return sympy.Poly(1, _X, domain="QQ")
    dm = DomainMatrix([[_q(v) for v in row] for row in M], (n, n), QQ)
    coeffs = dm.charpoly()
    return sympy.Poly([QQ.to_sympy(c) for c in coeffs], _X, domain="QQ")


def _count(poly: sympy.Poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots in the closed interval [a, b]."""
    return int(poly.count_roots(_rat(a), _rat(b)))


def _rational_roots(poly: sympy.Poly) -> list[Fraction]:
    out = []
    for fac, _ in poly.factor_list()[1]:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            out.append(_frac(-b / a))
    return sorted(out)


def _upper_bound(M: Matrix) -> Fraction:
    # spectral radius of a non-negative matrix is at most its max row sum
    return max((sum((Fraction(v) for v in row), Fraction(0)) for row in M), default=Fraction(0))


class _Root:
    """Largest real root of a square-free polynomial, isolated in [lo, hi]."""

    def __init__(self, poly: sympy.Poly, upper: Fraction):
        self.poly = poly.sqf_part() if poly.degree() > 0 else poly
        self.upper = upper
        self.lo, self.hi = Fraction(0), upper
        rats = [r for r in _rational_roots(self.poly) if r >= 0]
        if rats and _count(self.poly, rats[-1], max(upper, rats[-1])) == 1:
            self.lo = self.hi = rats[-1]

    def bracket(self, width: Fraction) -> tuple[Fraction, Fraction]:
        lo, hi = self.lo, self.hi
        while hi - lo > width:
            mid = (lo + hi) / 2
            if _count(self.poly, mid, hi) > 0:
                lo = mid
            else:
                hi = mid
        return lo, hi


def _vs_one(poly: sympy.Poly, upper: Fraction) -> str:
    one = Fraction(1)
    at_one = poly.eval(1) == 0
    if upper > one:
        above = _count(poly, one, upper) - (1 if at_one else 0)
        if above > 0:
            return GREATER
    return EQUAL if at_one else LESS


def _key(M: Matrix) -> tuple:
    return tuple(tuple(Fraction(v) for v in row) for row in M)


@lru_cache(maxsize=4096)
def _root_for(M: tuple) -> _Root:
    return _Root(charpoly(M), _upper_bound(M))


def leading_eigenvalue(M: Matrix, width=Fraction(1, 10**6)) -> EigenReport:
    """Bracket the spectral radius of a non-negative matrix to ``width``.

    The comparison with 1 is decided from the sign pattern of the
    characteristic polynomial: the spectral radius exceeds 1 exactly when
    a real root lies in (1, R], and equals 1 when it does not and the
    polynomial vanishes at 1.  Here R is the largest row sum.
    """
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    key = _key(M)
    if any(len(row) != len(key) for row in key):
        raise ValueError("matrix must be square")
    if any(v < 0 for row in key for v in row):
        raise ValueError("matrix must be non-negative")
    if not key:
        return EigenReport(Fraction(0), Fraction(0), LESS)
    root = _root_for(key)
    lo, hi = root.bracket(width)
    return EigenReport(lo, hi, _vs_one(root.poly, root.upper))


def same_largest_root(full: Matrix, block: Matrix) -> bool:
    """Decide exactly whether the spectral radius of ``full`` is a root of
    the characteristic polynomial of ``block``.

    The spectral radius is isolated as the only root of the square-free
    characteristic polynomial of ``full`` inside a bracket; it is a root of
    the block polynomial iff their gcd has a root in that bracket.
    """
    root = _root_for(_key(full))
    lo, hi = root.lo, root.hi
    while _count(root.poly, lo, hi) > 1:
        lo, hi = _halve(root.poly, lo, hi)
    g = sympy.gcd(root.poly, charpoly(block))
    if g.degree() <= 0:
        return False
    return _count(g, lo, hi) > 0


def _halve(poly, lo, hi):
    mid = (lo + hi) / 2
    if _count(poly, mid, hi) > 0:
        return mid, hi
    return lo, mid


def float_spectral_radius(M: Matrix) -> float:
    """Floating-point spectral radius, used only as a test oracle."""
    import numpy as np

    A = np.array([[float(v) for v in row] for row in M], dtype=float)
    n = A.shape[0]
    if n == 0 or not A.any():
        return 0.0
    return float(max(abs(np.linalg.eigvals(A))))
