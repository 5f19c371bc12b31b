from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantordyn.eigen import (
    EQUAL,
    GREATER,
    LESS,
    charpoly,
    float_spectral_radius,
    leading_eigenvalue,
    same_largest_root,
)


def test_one_by_one_unit():
    rep = leading_eigenvalue([[1]])
    assert (rep.lo, rep.hi, rep.vs_one) == (1, 1, EQUAL)


def test_sqrt_two():
    rep = leading_eigenvalue([[0, 2], [1, 0]], Fraction(1, 10**9))
    assert rep.vs_one == GREATER
    assert rep.lo <= Fraction(14142135623, 10**10) and Fraction(14142135623, 10**10) <= rep.hi + Fraction(1, 10**9)
    assert rep.lo**2 <= 2 <= rep.hi**2


def test_zero_matrix():
    rep = leading_eigenvalue([[0, 0], [0, 0]])
    assert (rep.lo, rep.hi, rep.vs_one) == (0, 0, LESS)


def test_empty_matrix():
    assert leading_eigenvalue([]).vs_one == LESS


def test_half():
    rep = leading_eigenvalue([[Fraction(1, 2)]])
    assert rep.exact and rep.lo == Fraction(1, 2) and rep.vs_one == LESS


def test_rejects_negative_and_ragged():
    with pytest.raises(ValueError):
        leading_eigenvalue([[-1]])
    with pytest.raises(ValueError):
        leading_eigenvalue([[1, 2]])
    with pytest.raises(ValueError):
        leading_eigenvalue([[1]], 0)


def test_equal_decided_exactly_for_rational_matrix():
    # spectral radius exactly 1 with irrational other roots nowhere near
    M = [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]]
    assert leading_eigenvalue(M).vs_one == EQUAL


def test_charpoly_of_two_cycle():
    assert [int(c) for c in charpoly([[0, 2], [1, 0]]).all_coeffs()] == [1, 0, -2]


def test_same_largest_root():
    full = [[2, 0], [0, 1]]
    assert same_largest_root(full, [[2]])
    assert not same_largest_root(full, [[1]])


def test_float_oracle():
    assert float_spectral_radius([[0, 2], [1, 0]]) == pytest.approx(2**0.5)


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(matrices)
def test_bracket_contains_numeric_radius(M):
    rho = float_spectral_radius(M)
    rep = leading_eigenvalue(M, Fraction(1, 10**6))
    assert float(rep.lo) - 1e-7 <= rho <= float(rep.hi) + 1e-7
    assert rep.hi - rep.lo <= Fraction(1, 10**6)


@given(matrices)
def test_brackets_shrink_monotonically(M):
    widths = [Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10**6)]
    reps = [leading_eigenvalue(M, w) for w in widths]
    for a, b in zip(reps, reps[1:]):
        assert a.lo <= b.lo and b.hi <= a.hi


@given(matrices)
def test_power_iteration_estimate_inside_bracket(M):
    A = np.array(M, dtype=float)
    rep = leading_eigenvalue(M, Fraction(1, 10**6))
    # iterate I + A so the vector stays positive and periodic patterns settle
    v = np.ones(len(M))
    for _ in range(40):
        v = v + A @ v
        v /= v.max()
    ratios = (A @ v) / v
    # Collatz-Wielandt: min ratio <= radius <= max ratio for any positive v
    assert ratios.min() <= float(rep.hi) + 1e-6
    assert ratios.max() >= float(rep.lo) - 1e-6


@given(matrices)
def test_vs_one_matches_numeric(M):
    rho = float_spectral_radius(M)
    rep = leading_eigenvalue(M)
    if rho > 1 + 1e-9:
        assert rep.vs_one == GREATER
    elif rho < 1 - 1e-9:
        assert rep.vs_one == LESS
