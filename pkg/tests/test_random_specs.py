import random

from hypothesis import given, strategies as st

from cantordyn.eigen import EQUAL
from cantordyn.multicurve import is_cantor, is_irreducible, is_prestable, lambda_reduced
from cantordyn.random_specs import (
    MAX_DEGREE,
    default_seed,
    irreducible_corpus,
    prestable_corpus,
    random_spec,
    star_rotation_spec,
)
from cantordyn.spec_model import parse_map_spec, serialize_map_spec, validate

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_random_spec_is_valid(seed):
    spec = random_spec(random.Random(seed))
    assert validate(spec).ok
    assert 2 <= spec.degree <= MAX_DEGREE
    assert is_prestable(spec, spec.essential)
    assert parse_map_spec(serialize_map_spec(spec)) == spec


@given(seeds)
def test_irreducible_flag(seed):
    spec = random_spec(random.Random(seed), irreducible=True)
    assert is_irreducible(spec, spec.essential)


@given(seeds)
def test_star_rotations_are_not_cantor(seed):
    spec = star_rotation_spec(random.Random(seed))
    assert is_irreducible(spec, spec.essential)
    assert not is_cantor(spec, spec.essential)
    assert lambda_reduced(spec, spec.essential).vs_one == EQUAL


def test_corpora_are_reproducible(monkeypatch):
    a = [serialize_map_spec(s) for s in irreducible_corpus(10, seed=7)]
    b = [serialize_map_spec(s) for s in irreducible_corpus(10, seed=7)]
    assert a == b
    monkeypatch.setenv("CANTORDYN_SEED", "7")
    assert default_seed() == 7
    assert [serialize_map_spec(s) for s in irreducible_corpus(10)] == a
    assert len(list(prestable_corpus(5, seed=1))) == 5
