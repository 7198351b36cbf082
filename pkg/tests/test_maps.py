from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from painleve4d import catalog, lattice
from painleve4d.dsl import parse_map
from painleve4d.errors import ConstantImage, DegenerateSubstitution, RegistryMismatch, UnknownKey, ValidationError
from painleve4d.maps import compose, compose_word, identity_map, inverse_of, iterate, map_diff, map_equal, specialize, symbolic_degree_tables

FIRST_MAP = """
map a2a2 {
  vars: q1, p1, q2, p2;
  params: a, b;
  q1' = -p2 - q2 + a/q2 + b;
  p1' = q2;
  q2' = -p1 - q1 + a/q1 + b;
  p2' = q1;
}
"""

SECOND_MAP = """
map a5 {
  vars: q1, p1, q2, p2;
  params: a, b1, b2;
  q1' = -q1 - p2 + a*q2^1/q2^2 + b1;
  p1' = q2;
  q2' = -q2 - p1 + a/q1 + b2;
  p2' = q1;
}
"""


def test_dsl_text_equals_registry():
    assert map_equal(parse_map(FIRST_MAP), catalog.get_map("a2a2"))
    assert map_equal(parse_map(SECOND_MAP), catalog.get_map("a5"))


def test_identity_and_constant_image():
    m = parse_map("map id { vars: q1, p1, q2, p2; q1' = q1; p1' = p1; q2' = q2; p2' = p2; }")
    assert map_equal(m, identity_map(m.registry))
    with pytest.raises(ConstantImage):
        parse_map("map c { vars: q1, p1, q2, p2; q1' = 3; }")


@pytest.mark.parametrize("case", catalog.CASES)
def test_inverse_and_identity(case):
    f = catalog.get_map(case)
    ident = catalog.identity(case)
    assert map_equal(compose(f, ident), f)
    assert map_equal(compose(ident, f), f)
    assert map_equal(compose(f, inverse_of(f)), ident)
    assert map_equal(compose(inverse_of(f), f), ident)


def test_maps_differ():
    f, g = catalog.get_map("a2a2"), catalog.get_map("a5")
    with pytest.raises(RegistryMismatch):
        map_equal(f, g)
    g2 = catalog.get_map("a2a2.inverse")
    assert not map_equal(f, g2)
    assert len(map_diff(f, g2)) == 4


@pytest.mark.parametrize("key", [k for c in catalog.CASES for k in catalog.GENERATORS[c]])
def test_generators_are_involutions(key):
    g = catalog.get_map(key)
    both = compose(g, g)
    assert map_equal(both, catalog.identity(key.split(".")[0], autonomous=False))


@settings(max_examples=15)
@given(st.sampled_from(catalog.CASES), st.data())
def test_composition_is_associative(case, data):
    gens = catalog.GENERATORS[case]
    f, g, h = (catalog.get_map(data.draw(st.sampled_from(gens))) for _ in range(3))
    assert map_equal(compose(compose(f, g), h), compose(f, compose(g, h)))


def test_compose_word_order():
    w = catalog.PHI_WORDS["a5"]
    m = compose_word([catalog.get_map(k) for k in w])
    assert map_equal(m, catalog.get_map("a5.na"))


def test_iterate_symbolic_point_is_the_map():
    f = catalog.get_map("a5")
    assert iterate(f, 1) == f.images


def test_iterate_hand_value():
    # direct substitution into the printed formulas: -1-1+1+1, q2, -1-1+1+1, q1
    f = catalog.get_map("a2a2")
    got = iterate(f, 1, point=[1, 1, 1, 1], params={"a": 1, "b": 1})
    assert [g.constant_value() for g in got] == [0, 1, 0, 1]


def test_iterate_reports_failing_step():
    f = catalog.get_map("a2a2")
    # the first step sends q2 to 0 from here, so the second step divides by it
    with pytest.raises(DegenerateSubstitution) as exc:
        iterate(f, 3, point=[1, 1, 1, 1], params={"a": 1, "b": 1})
    assert exc.value.step == 2


def test_iterate_non_autonomous_parameters_evolve():
    f = catalog.get_map("a2a2.na")
    one = iterate(f, 1)
    two = iterate(f, 2)
    assert one != two
    assert any(f.changed_params())


@pytest.mark.parametrize("case", catalog.CASES)
def test_specialize_to_autonomous_preset(case):
    auto = catalog.get_map(case)
    vals = _preset_values(case, auto.registry)
    assert map_equal(specialize(catalog.get_map(f"{case}.na"), vals, auto.registry), auto)


def test_specialize_rejects_unpreserved_family():
    na = catalog.get_map("a5.na")
    with pytest.raises(ValidationError):
        specialize(na, {"a0": 1, "a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": 0}, na.registry)


def _preset_values(case, registry):
    from painleve4d.dsl import parse_expression

    return {k: parse_expression(v, registry) for k, v in catalog.PRESETS[case].items()}


def test_unknown_key():
    with pytest.raises(UnknownKey):
        catalog.get_map("a7")


@pytest.mark.parametrize("case", catalog.CASES)
def test_degree_tables_agree_with_lattice_small(case):
    sym = symbolic_degree_tables(catalog.get_map(case), 3)
    act = lattice.builtin_action(case)
    assert sym == [lattice.degree_table(act, n) for n in (1, 2, 3)]
