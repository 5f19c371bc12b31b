import json

import pytest
from hypothesis import given, strategies as st

from cantordyn import fixtures
from cantordyn.random_specs import random_spec
from cantordyn.spec_model import (
    InvalidSpecError,
    SpecSchemaError,
    SpecSyntaxError,
    parse_map_spec,
    require_valid,
    restrict,
    serialize_map_spec,
    validate,
)

from helpers import make_spec


def test_airplane_fixture_fields(airplane):
    assert airplane.degree == 8
    assert "beta" in airplane.essential
    kids = airplane.children("beta")
    assert [c.degree for c in kids] == [4, 4]
    assert all(c.target == "beta" for c in kids)


def test_airplane_has_no_errors(airplane):
    assert validate(airplane).errors == []


def test_minimal_identity_like_spec_is_valid():
    spec = make_spec(3, 4, ["g"], {"g": [(3, "g")]}, {"g": [("g", 3)]})
    assert validate(spec).ok


def test_degree_sum_mismatch_is_a_schema_error():
    text = fixtures.path("mating_equator").read_text()
    doc = json.loads(text)
    doc["pullback"]["eq"] = [{"degree": 1, "image": "eq"}]
    with pytest.raises(SpecSchemaError) as err:
        parse_map_spec(json.dumps(doc))
    assert "degree sum mismatch" in str(err.value)
    assert err.value.path == "$.pullback.eq"


def test_syntax_error_reports_position():
    with pytest.raises(SpecSyntaxError) as err:
        parse_map_spec('{\n  "degree": 2,\n  oops\n}')
    assert err.value.line == 3


def test_unknown_keys_rejected():
    doc = json.loads(fixtures.path("mating_equator").read_text())
    doc["colour"] = "blue"
    with pytest.raises(SpecSchemaError):
        parse_map_spec(json.dumps(doc))


def test_duplicate_keys_rejected():
    text = fixtures.path("mating_equator").read_text().replace('"degree": 2,', '"degree": 2,\n  "degree": 2,', 1)
    with pytest.raises(SpecSchemaError):
        parse_map_spec(text)


def test_null_annular_child_is_reported():
    diag = validate(fixtures.load("broken"))
    assert any("annular child must be essential" in m for _, m in diag.errors)


def test_three_marked_points_admit_no_essential_curve():
    spec = make_spec(2, 3, ["g"], {"g": [(2, "g")]}, {"g": [("g", 2)]})
    msgs = [m for _, m in validate(spec).errors]
    assert any("essential curve needs ≥2 points per side" in m for m in msgs)


def test_invalid_spec_rejected_downstream():
    from cantordyn.multicurve import transition_matrix

    with pytest.raises(InvalidSpecError):
        transition_matrix(fixtures.load("broken"), ["eq"])


def test_children_must_match_pullback_transpose():
    spec = make_spec(4, 4, ["g"], {"g": [(2, "g"), (2, "g")]}, {"g": [("g", 2)]})
    assert not validate(spec).ok


def test_orientation_defaults_to_plus_one():
    doc = json.loads(fixtures.path("mating_equator").read_text())
    del doc["annular"]["eq"][0]["orientation"]
    assert parse_map_spec(json.dumps(doc)).children("eq")[0].orientation == 1


def test_inconsistent_substitution_is_reported(two_cycle):
    doc = json.loads(serialize_map_spec(two_cycle))
    sub = doc["substitution"]
    sub["P"], sub["R"] = sub["R"], sub["P"]
    diag = validate(parse_map_spec(json.dumps(doc)))
    assert any("substitution inconsistent" in m for _, m in diag.errors)


def test_too_many_preimage_components():
    from dataclasses import replace

    spec = fixtures.load("nested_two")
    validate(spec)
    pieces = [pc for ps in spec.substitution.values() for pc in ps]
    crowded = replace(spec, substitution={"P": (), "Q": tuple(pieces), "R": ()})
    msgs = [m for _, m in validate(crowded).errors]
    assert any("exceed the degree" in m for m in msgs)


def test_restrict_drops_classes(airplane):
    small = restrict(airplane, ["beta"])
    assert small.essential == ("beta",)
    assert validate(small).ok


def test_restrict_refuses_to_orphan_preimages(two_cycle):
    with pytest.raises(Exception):
        restrict(two_cycle, ["a"])


def test_validate_is_deterministic(airplane):
    assert validate(airplane) == validate(airplane)


@pytest.mark.parametrize("name", fixtures.names())
def test_fixture_round_trip(name):
    text = fixtures.path(name).read_text()
    assert serialize_map_spec(parse_map_spec(text)) == text


@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    import random

    spec = random_spec(random.Random(seed))
    text = serialize_map_spec(spec)
    again = parse_map_spec(text)
    assert again == spec
    assert serialize_map_spec(again) == text


@given(st.integers(0, 2**32 - 1))
def test_valid_specs_have_children_at_both_ends(seed):
    import random

    spec = require_valid(random_spec(random.Random(seed)))
    for c in spec.essential:
        slots = spec.annular[c]
        assert slots and slots[0] != "gap" and slots[-1] != "gap"
