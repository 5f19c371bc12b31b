import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantordyn import fixtures
from cantordyn.linear_model import (
    PERIODIC,
    PREPERIODIC,
    WANDERING,
    IntervalSystem,
    Itinerary,
    LinearChild,
    LinearModelError,
    annular_condition_check,
    classify,
    expansion_report,
    from_annular_rules,
    itinerary_of,
    omega_limit_approx,
    periodic_point,
    point_of,
    refine,
    thue_morse,
)
from cantordyn.multicurve import is_cantor
from cantordyn.random_specs import random_spec

from helpers import chain_spec


@pytest.fixture(scope="module")
def sys2(two_children):
    return from_annular_rules(two_children, ["alpha"])


def spans(level):
    return [(iv.lo, iv.hi) for iv in level.intervals]


def test_two_children_layout(sys2):
    assert sys2.parents == ((F(0), F(1)),)
    assert [(c.lo, c.hi) for c in sys2.children] == [(0, F(2, 5)), (F(3, 5), 1)]
    assert [sys2.slope(j) for j in range(2)] == [F(5, 2), F(5, 2)]


def test_two_children_level_two(sys2):
    assert spans(refine(sys2, 2)) == [
        (0, F(4, 25)),
        (F(6, 25), F(2, 5)),
        (F(3, 5), F(19, 25)),
        (F(21, 25), 1),
    ]
    assert [iv.address for iv in refine(sys2, 2).intervals] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_two_children_expansion(sys2):
    rep = expansion_report(sys2, 40)
    assert rep.l1 == F(2, 5)
    assert rep.first_k == 2
    assert rep.L[2] == F(4, 25)
    assert not rep.horizon_exceeded


def test_itineraries_of_points(sys2):
    assert itinerary_of(sys2, 0, 5).word == (0,) * 5
    assert itinerary_of(sys2, 1, 5).word == (1,) * 5
    assert itinerary_of(sys2, F(6, 25), 4).word == (0, 1, 0, 0)
    gap = itinerary_of(sys2, F(1, 2), 3)
    assert gap.escaped and gap.escaped_at == 0
    assert itinerary_of(sys2, 5, 2).escaped


def test_period_two_point(sys2):
    x = periodic_point(sys2, (0, 1))
    assert x == F(2, 7)
    assert sys2.sigma(1, sys2.sigma(0, x)) == x
    assert itinerary_of(sys2, x, 6).word == (0, 1) * 3


def test_point_of_nesting(sys2):
    it = Itinerary((), (0, 1))
    boxes = [point_of(sys2, it, k) for k in range(1, 12)]
    for (a, b), (c, d) in zip(boxes, boxes[1:]):
        assert a <= c < d <= b
    assert all(a <= F(2, 7) <= b for a, b in boxes)


def test_classify(sys2):
    assert classify(sys2, Itinerary((), (0,))) == PERIODIC
    assert classify(sys2, Itinerary((0,), (0,))) == PERIODIC
    assert classify(sys2, Itinerary((1,), (0,))) == PREPERIODIC
    assert classify(sys2, Itinerary((0, 1), (0, 1))) == PERIODIC
    assert classify(sys2, thue_morse()) == WANDERING
    with pytest.raises(ValueError):
        classify(sys2, Itinerary(generator=lambda k: 0))
    with pytest.raises(ValueError):
        classify(sys2, Itinerary(generator=lambda k: 0, wandering=True))
    with pytest.raises(LinearModelError):
        classify(sys2, Itinerary((), (5,)))


def test_omega_of_periodic(sys2):
    rep = omega_limit_approx(sys2, Itinerary((1, 1), (0, 1)), 64, 2)
    assert rep.addresses == ((0, 1), (1, 0))
    assert omega_limit_approx(sys2, Itinerary((), (0,)), 64, 3).count == 1


def test_thue_morse_prefix():
    assert thue_morse().prefix(8) == (0, 1, 1, 0, 1, 0, 0, 1)


def test_two_class_cycle(two_cycle):
    sys = from_annular_rules(two_cycle, ["a", "b"])
    assert len(sys.parents) == 2
    rep = expansion_report(sys, 40)
    assert rep.first_k is not None


def test_not_cantor_stays_at_full_length():
    spec = fixtures.load("mating_equator")
    sys = from_annular_rules(spec, ["eq"])
    rep = expansion_report(sys, 10)
    assert rep.horizon_exceeded
    assert set(rep.L) == {F(1)}


def test_bad_systems():
    half = F(1, 2)
    with pytest.raises(LinearModelError, match="exactness"):
        IntervalSystem(((F(0), F(1)),), (LinearChild(0, F(0), half, 0),))
    with pytest.raises(LinearModelError, match="positive gap"):
        IntervalSystem(((F(0), F(1)),), (LinearChild(0, F(0), half, 0), LinearChild(0, half, F(1), 0)))
    with pytest.raises(LinearModelError):
        from_annular_rules(fixtures.load("two_children"), ["alpha"], shrink=1)


def test_annular_condition():
    assert annular_condition_check(fixtures.load("two_children"), ["alpha"]).ok
    eq = annular_condition_check(fixtures.load("mating_equator"), ["eq"])
    assert not eq.branching_reachable
    loop = chain_spec({"g": [(1, "g"), (1, "g"), (1, "h")], "h": [(1, "h")]})
    rep = annular_condition_check(loop, ["g", "h"])
    assert rep.branching_reachable and not rep.degree_one_acyclic


seeds = st.integers(0, 2**32 - 1)


def _cantor_system(seed):
    spec = random_spec(random.Random(seed), irreducible=True, max_classes=3, max_children=3)
    if not is_cantor(spec, spec.essential):
        return None
    return from_annular_rules(spec, spec.essential)


@given(seeds)
def test_levels_nest_and_keep_endpoints(seed):
    sys = _cantor_system(seed)
    if sys is None:
        return
    prev = refine(sys, 1)
    ends = set(x for p in sys.parents for x in p)
    assert ends <= prev.endpoints()
    for k in (2, 3):
        cur = refine(sys, k)
        assert prev.endpoints() <= cur.endpoints()
        for iv in cur.intervals:
            parent = [p for p in prev.intervals if p.address == iv.address[:-1]]
            assert len(parent) == 1 and parent[0].lo <= iv.lo < iv.hi <= parent[0].hi
        for a, b in zip(cur.intervals, cur.intervals[1:]):
            assert a.hi < b.lo
        prev = cur


@given(seeds)
def test_max_lengths_decrease(seed):
    sys = _cantor_system(seed)
    if sys is None:
        return
    L = expansion_report(sys, 12).L
    assert all(b <= a for a, b in zip(L, L[1:]))
    assert max(iv.length for iv in refine(sys, 3).intervals) == L[3]
