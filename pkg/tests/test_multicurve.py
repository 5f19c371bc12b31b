import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from cantordyn import fixtures
from cantordyn.eigen import EQUAL, GREATER, LESS
from cantordyn.multicurve import (
    MulticurveError,
    analysis_report,
    cantor_conditions,
    check_perron_inequality,
    find_obstructions,
    irreducible_core,
    is_cantor,
    is_irreducible,
    is_prestable,
    is_stable,
    is_thurston_obstruction,
    kappa,
    kappa_table,
    kappa_vector,
    lambda_gamma,
    lambda_reduced,
    m_values,
    multicurve,
    pattern_is_irreducible,
    perron_certificate,
    reduced_eigen_check,
    reduced_matrix,
    stabilize,
    summary_line,
    transition_matrix,
)
from cantordyn.random_specs import random_spec

from helpers import chain_spec


def test_airplane_gamma0_matrix(airplane):
    assert transition_matrix(airplane, ["gamma0"]).rows() == [[1]]
    assert reduced_matrix(airplane, ["gamma0"]).rows() == [[2]]


def test_airplane_beta_matrix(airplane):
    assert transition_matrix(airplane, ["beta"]).rows() == [[Fraction(1, 2)]]


def test_single_preimage_matrix():
    spec = chain_spec({"g": [(3, "g")]})
    assert transition_matrix(spec, ["g"]).rows() == [[Fraction(1, 3)]]
    assert reduced_matrix(spec, ["g"]).rows() == [[1]]


def test_two_cycle_counts(two_cycle):
    assert reduced_matrix(two_cycle, ["a", "b"]).rows() == [[0, 2], [1, 0]]


def test_irreducibility():
    assert pattern_is_irreducible([[0, 2], [1, 0]])
    assert not pattern_is_irreducible([[1, 1], [0, 1]])
    assert not pattern_is_irreducible([[0]])


def test_airplane_flags(airplane):
    assert is_irreducible(airplane, ["gamma0"])
    assert is_prestable(airplane, ["gamma0"])
    assert is_stable(airplane, ["gamma0"])
    assert is_cantor(airplane, ["gamma0"])
    assert kappa(airplane, ["gamma0"], "gamma0", 3) == 8
    assert kappa_vector(airplane, ["gamma0"], 0) == [1]


def test_stability_definition():
    # pullback[g1] lists preimages of g1: one is homotopic to g2
    spec = chain_spec({"g1": [(1, "g1"), (1, "g2")], "g2": [(2, "g2")]})
    assert not is_stable(spec, ["g1"])
    assert is_stable(spec, ["g1", "g2"])


def test_not_prestable_when_no_preimage_inside():
    # the only preimage of g is homotopic to h
    spec = chain_spec({"g": [(2, "h")], "h": [(1, "g"), (1, "h")]})
    assert not is_prestable(spec, ["g"])
    assert is_prestable(spec, ["h"])


def test_single_preimage_chain_kappa_constant():
    spec = chain_spec({"g": [(2, "g")]})
    assert all(kappa(spec, ["g"], "g", n) == 1 for n in range(6))


def test_mating_equator_not_cantor():
    spec = fixtures.load("mating_equator")
    assert is_cantor(spec, ["eq"]) is False


def test_two_cycle_cantor(two_cycle):
    assert is_cantor(two_cycle, ["a", "b"])
    assert m_values(two_cycle, ["a", "b"]) == [1, 2]


def test_exact_cantor_needs_irreducible():
    spec = chain_spec({"g1": [(1, "g1"), (1, "g2")], "g2": [(2, "g2")]})
    with pytest.raises(MulticurveError):
        is_cantor(spec, ["g1", "g2"])
    report = is_cantor(spec, ["g1", "g2"], horizon=4)
    assert "horizon-limited" in report.describe()


def test_reduced_eigen_check(airplane, two_cycle):
    rep = reduced_eigen_check(airplane, ["gamma0"])
    assert rep.eigen.lo == rep.eigen.hi == 2 and rep.consistent
    one = reduced_eigen_check(fixtures.load("mating_equator"), ["eq"])
    assert one.eigen.vs_one == EQUAL and one.cantor is False and one.consistent
    cyc = reduced_eigen_check(two_cycle, ["a", "b"])
    assert cyc.cantor and cyc.eigen.lo**2 <= 2 <= cyc.eigen.hi**2


def test_stabilize_two_steps():
    spec = chain_spec({"g1": [(1, "g1"), (1, "g2")], "g2": [(2, "g2")]})
    assert stabilize(spec, ["g1"]).classes == ("g1", "g2")
    assert stabilize(spec, ["g1", "g2"]).classes == ("g1", "g2")


def test_stabilize_airplane(airplane):
    assert stabilize(airplane, ["gamma0"]).classes == ("gamma0",)


def test_irreducible_core_picks_dominant_block():
    # weights 1/2 and 3/2 on two disjoint self-loops
    spec = chain_spec({"a": [(2, "a"), (2, "null"), (2, "null")], "b": [(2, "b"), (2, "b"), (2, "b")]})
    assert transition_matrix(spec, ["a", "b"]).rows() == [[Fraction(1, 2), 0], [0, Fraction(3, 2)]]
    assert irreducible_core(spec, ["a", "b"]).classes == ("b",)
    assert irreducible_core(spec, ["b"]).classes == ("b",)


def test_irreducible_core_of_airplane(airplane):
    assert irreducible_core(airplane, ["gamma0"]).classes == ("gamma0",)


def test_obstruction_flags(airplane):
    assert is_thurston_obstruction(airplane, ["gamma0"])
    assert not is_thurston_obstruction(airplane, ["beta"])
    assert lambda_gamma(airplane, ["gamma0"]).vs_one == EQUAL
    assert [m.classes for m in find_obstructions(airplane)] == [("gamma0",)]


def test_unstable_never_obstruction():
    spec = chain_spec({"g1": [(1, "g1"), (1, "g1"), (1, "g2")], "g2": [(3, "g2")]})
    assert lambda_gamma(spec, ["g1"]).vs_one == GREATER
    assert not is_thurston_obstruction(spec, ["g1"])


def test_multicurve_input_forms(airplane):
    assert multicurve(airplane, "beta,gamma0").classes == ("beta", "gamma0")
    with pytest.raises(MulticurveError):
        multicurve(airplane, ["nope"])
    with pytest.raises(MulticurveError):
        multicurve(airplane, ["beta", "beta"])


def test_report_summary(airplane):
    assert summary_line(analysis_report(airplane, ["gamma0"])) == "OBSTRUCTION λ=1"
    assert summary_line(analysis_report(airplane, ["beta"])) == "λ=1/2, Cantor"
    assert summary_line(analysis_report(fixtures.load("mating_equator"), ["eq"])) == "λ=1/2, not Cantor"


def test_perron_certificates(airplane, two_cycle):
    cert = perron_certificate(reduced_matrix(airplane, ["gamma0"]).rows())
    assert cert.lam == Fraction(3, 2) and cert.v == (1,)
    assert check_perron_inequality([[0, 2], [1, 0]], [4, 3], Fraction(5, 4))
    cert2 = perron_certificate([[0, 2], [1, 0]])
    assert cert2.verify([[0, 2], [1, 0]]) and cert2.lam > 1
    with pytest.raises(MulticurveError):
        perron_certificate([[1]])


seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_entry_patterns_agree(seed):
    spec = random_spec(random.Random(seed))
    g = spec.essential
    A = transition_matrix(spec, g).rows()
    B = reduced_matrix(spec, g).rows()
    for i in range(len(g)):
        for j in range(len(g)):
            assert (A[i][j] == 0) == (B[i][j] == 0)
            assert A[i][j] <= B[i][j]


@given(seeds)
def test_kappa_recursion(seed):
    spec = random_spec(random.Random(seed))
    g = spec.essential
    m = m_values(spec, g)
    table = kappa_table(spec, g, 10)
    for n in range(10):
        assert sum(table[n + 1]) == sum(k * mm for k, mm in zip(table[n], m))


@given(seeds)
def test_cantor_equivalences(seed):
    spec = random_spec(random.Random(seed), irreducible=True)
    g = spec.essential
    conds = set(cantor_conditions(spec, g).values())
    assert len(conds) == 1
    assert conds.pop() == (lambda_reduced(spec, g).vs_one == GREATER)


@given(seeds)
def test_stabilize_properties(seed):
    spec = random_spec(random.Random(seed))
    rng = random.Random(seed + 1)
    start = [c for c in spec.essential if rng.random() < 0.5] or [spec.essential[0]]
    assume(is_prestable(spec, start))
    out = stabilize(spec, start)
    assert set(start) <= set(out.classes)
    assert is_stable(spec, out) and is_prestable(spec, out)
    assert stabilize(spec, out).classes == out.classes


@given(seeds)
def test_prestable_radius_at_least_one(seed):
    spec = random_spec(random.Random(seed))
    assert lambda_reduced(spec, spec.essential).vs_one in (EQUAL, GREATER)
