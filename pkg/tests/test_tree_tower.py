import dataclasses
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantordyn import fixtures
from cantordyn.multicurve import check_perron_inequality, is_cantor, kappa_table
from cantordyn.random_specs import random_spec
from cantordyn.spec_model import Piece
from cantordyn.tree_tower import (
    TowerError,
    classify_component,
    coding_point,
    decomposition_census,
    dual_tree_level0,
    edge_key,
    gap_key,
    inclusion,
    length_bound_check,
    pullback_tree,
    tower_build,
)


def test_keys():
    assert edge_key("a", ()) == "a"
    assert edge_key("a", (0, 2)) == "a.0.2"
    assert gap_key("a", (), 1) == "a/1"
    assert gap_key("a", (1,), 0) == "a.1/0"


def test_level0_shapes(airplane):
    t = dual_tree_level0(airplane)
    assert sorted(t.vertices) == ["U", "V"] and list(t.edges) == ["beta"]
    nested = dual_tree_level0(fixtures.load("nested_two"))
    assert len(nested.vertices) == 3 and nested.is_tree()
    star = dual_tree_level0(fixtures.load("star"))
    assert len(star.vertices) == 4
    assert star.degree_of("O") == 3
    assert star.marked_total() == 6


def test_airplane_first_pullback(airplane):
    t0 = dual_tree_level0(airplane)
    t1, tau = pullback_tree(airplane, t0)
    assert sorted(t1.vertices) == ["U", "V", "beta/0"]
    assert sorted(t1.edges) == ["beta.0", "beta.1"]
    assert tau.edges == {"beta.0": ("beta", 1), "beta.1": ("beta", -1)}
    assert tau.degree == 2
    assert inclusion(airplane, t0, t1).edges == {"beta": ("beta.0", "beta.1")}
    assert t1.marked_total() == airplane.post_critical_count


def test_gamma_must_match_configuration(airplane):
    with pytest.raises(TowerError):
        tower_build(airplane, ["gamma0"], depth=1)


def test_inconsistent_substitution_rejected(airplane):
    sub = dict(airplane.substitution)
    # move the gap piece under the wrong level-0 vertex
    sub["U"] = sub["U"] + sub["V"]
    sub["V"] = ()
    bad = dataclasses.replace(airplane, substitution=sub)
    with pytest.raises(Exception, match="substitution inconsistent"):
        tower_build(bad, depth=2)


def test_airplane_tower(airplane):
    t = tower_build(airplane, depth=5)
    assert t.edge_counts() == [1, 2, 4, 8, 16, 32]
    assert t.degree == 2
    assert set(t.totals()) == {F(2)}
    assert t.metric.slope_cap == 3
    rep = length_bound_check(t)
    assert rep.factor == 3 and rep.ok


def test_apply2_tower(apply2_spec):
    t = tower_build(apply2_spec, depth=3)
    assert t.edge_counts() == [1, 4, 16, 64]
    assert t.degree == 4
    rep = length_bound_check(t, slope_cap=8)
    assert rep.factor == 2 and rep.ok
    with pytest.raises(TowerError):
        length_bound_check(t, slope_cap=4)


def test_perron_metric_examples(two_cycle):
    assert check_perron_inequality([[0, 2], [1, 0]], [4, 3], F(5, 4))
    assert not check_perron_inequality([[0, 2], [1, 0]], [1, 1], F(3, 2))
    t = tower_build(two_cycle, depth=4)
    m = t.metric
    assert all(mv > m.lam * v for mv, v in zip(m.Mv, m.v))
    assert m.lam > 1
    nested = tower_build(fixtures.load("nested_two"), depth=3).metric
    assert nested.v == (1, 1) and nested.Mv == (2, 2)


def test_non_cantor_has_no_metric():
    spec = fixtures.load("mating_equator")
    assert tower_build(spec, depth=2).metric is None
    with pytest.raises(TowerError):
        tower_build(spec, depth=2, slope_cap=2)


def test_star_rotation_counts_constant():
    t = tower_build(fixtures.load("star"), depth=3, with_metric=False)
    assert t.edge_counts() == [3, 3, 3, 3]


def test_coding_point(airplane):
    t = tower_build(airplane, depth=3)
    steps = coding_point(airplane, t, ("beta", [0, 1, 1]))
    assert [s.element for s in steps] == ["beta", "beta.0", "beta.0.1", "beta.0.1.1"]
    assert [s.length for s in steps] == [2, 1, F(1, 2), F(1, 4)]
    assert all(s.length <= s.bound for s in steps)
    assert [s.level for s in coding_point(airplane, t, "beta/0")] == [1, 2, 3]
    with pytest.raises(TowerError):
        coding_point(airplane, t, ("beta", [5]))
    with pytest.raises(TowerError):
        coding_point(airplane, t, "nowhere")


def test_classify_component():
    assert classify_component(1, 1) == "disk"
    assert classify_component(1, 0) == "trivial"
    assert classify_component(2, 0) == "annular"
    assert classify_component(3, 0) == "complex"
    assert classify_component(1, 2) == "complex"


def test_airplane_census(airplane):
    rep = decomposition_census(airplane, depth=3)
    assert rep.complex_counts == [2, 2, 2, 2]
    lv = rep.levels[2]
    assert {(p.vertex, p.preperiod, p.period) for p in lv.periodic} == {("U", 0, 1), ("V", 1, 1)}
    assert [l.annular for l in rep.levels] == [0, 1, 3, 7]


seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_random_towers(seed):
    spec = random_spec(random.Random(seed), max_classes=4, max_children=3)
    t = tower_build(spec, depth=3, with_metric=False)
    table = kappa_table(spec, spec.essential, 3)
    assert t.edge_counts() == [sum(row) for row in table]
    assert t.degree <= spec.degree
    for tree in t.trees:
        assert tree.is_tree()
        assert tree.marked_total() == spec.post_critical_count
    for tau in t.taus:
        assert max(tau.fiber_sizes()) <= spec.degree


@given(seeds)
def test_random_metrics(seed):
    spec = random_spec(random.Random(seed), max_classes=3, max_children=3, irreducible=True)
    if not is_cantor(spec, spec.essential):
        return
    t = tower_build(spec, depth=3)
    assert t.metric is not None
    rep = length_bound_check(t)
    assert rep.ok
