import numpy as np
import pytest
from hypothesis import given, strategies as st

from golden import CREMONA_A, CREMONA_B, GOLDEN_ACTIONS, matrix_from_display
from painleve4d import lattice
from painleve4d.errors import NotPermuted, UnknownKey
from painleve4d.lattice import D, J, E_sum, builtin_action, divisor_dot_divisor, pairing, to_curve

CASES = ("a2a2", "a5")


@pytest.mark.parametrize("case", CASES)
def test_push_forward_matches_printed_display(case):
    gold = matrix_from_display(GOLDEN_ACTIONS[case])
    assert (builtin_action(case).A == gold).all()


@pytest.mark.parametrize("case", CASES)
def test_isometry_and_unimodular(case):
    act = builtin_action(case)
    assert act.is_isometry()
    assert abs(act.det()) == 1
    assert (act.A.T.dot(J).dot(act.B) == J).all()
    back = act.pull_back()
    assert (back.A.dot(act.A) == np.identity(20, dtype=object)).all()


def test_cremona_fixture():
    act = lattice.cremona_action()
    assert (act.A == np.array(CREMONA_A, dtype=object)).all()
    assert (act.B == np.array(CREMONA_B, dtype=object)).all()
    assert (act.A.dot(act.A) == np.identity(5, dtype=object)).all()
    assert act.is_isometry(lattice.intersection_form(1, 4))


def test_pairing_conventions():
    assert pairing(D("Hq1"), to_curve(D("Hp1"))) == 0
    assert divisor_dot_divisor(D("E3"), D("E3")) == -1
    assert divisor_dot_divisor(D("Hq1 + Hp1"), D("Hq1 + Hp1")) == 2
    assert D("2Hq1 - E1 - E2") == 2 * D("Hq1") - E_sum(1, 2)


@pytest.mark.parametrize("case", CASES)
def test_jordan_form(case):
    js = lattice.jordan_signature(builtin_action(case))
    assert js.all_cyclotomic and js.spectral_radius_one
    assert js.single_3x3_at_one()


def test_jordan_a2a2_has_nontrivial_block_at_minus_one():
    # a second non-trivial block sits at eigenvalue -1 (see the ledger)
    js = lattice.jordan_signature(builtin_action("a2a2"))
    assert not js.only_nontrivial_is_3x3_at_one()
    assert js.block_count() == 16
    assert js.nontrivial_blocks().get(2) == [3]


def test_jordan_a5_only_3x3_at_one():
    assert lattice.jordan_signature(builtin_action("a5")).only_nontrivial_is_3x3_at_one()


@pytest.mark.parametrize("case", CASES)
def test_anticanonical_components_permuted(case):
    perm = lattice.anticanonical_check(case, builtin_action(case))
    assert sorted(perm) == list(range(1, len(perm) + 1))
    assert lattice.canonical_class(case).consistent


def test_non_permuting_action_is_reported():
    act = lattice.LatticeAction.from_divisor_matrix(lattice.matrix_from_rules({**{b: b for b in lattice.BASIS}, "E1": "Hq1 - E1"}), "push_forward", "x")
    with pytest.raises(NotPermuted):
        lattice.anticanonical_check("a2a2", act)


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_degree_prediction_consistency(case, n):
    act = builtin_action(case)
    tab = lattice.degree_table(act, n)
    names = ("q1", "p1", "q2", "p2")
    for i, image in enumerate(names):
        for j, var in enumerate(names):
            assert tab[i][j] == lattice.degree_predict(act, n, var, image)


def test_first_degree_table_matches_formulas():
    # q1' = (-q2^2 - q2 p2 + b q2 + a)/q2, p1' = q2, and symmetrically
    assert lattice.degree_table(builtin_action("a2a2"), 1) == [[0, 0, 2, 1], [0, 0, 1, 0], [2, 1, 0, 0], [1, 0, 0, 0]]


vec20 = st.lists(st.integers(-3, 3), min_size=20, max_size=20)


@given(st.sampled_from(CASES), vec20, vec20)
def test_action_preserves_divisor_curve_pairing(case, dv, cv):
    act = builtin_action(case)
    d = lattice.DivisorClass(np.array(dv, dtype=object))
    c = lattice.CurveClass(np.array(cv, dtype=object))
    assert pairing(act(d), act(c)) == pairing(d, c)


def test_effective_catalogue():
    assert lattice.is_effective(D("Hq1 - E1"), "a2a2")
    assert not lattice.is_effective(D("-E1"), "a2a2")


def test_unknown_case():
    with pytest.raises(UnknownKey):
        builtin_action("b3")
