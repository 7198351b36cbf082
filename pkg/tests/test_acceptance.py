"""The eight acceptance criteria, each at its stated tolerance and time budget."""

import numpy as np
import pytest

from acceptance_log import criterion
from golden import CREMONA_A, CREMONA_B, GOLDEN_ACTIONS, matrix_from_display
from painleve4d import catalog, flows, invariants, lattice, laurent, weyl
from painleve4d.lattice import D, J
from painleve4d.maps import compose, map_equal, symbolic_degree_tables

CASES = ("a2a2", "a5")
# order of the finite part of the lattice action: A^L is unipotent
FINITE_ORDER = {"a2a2": 6, "a5": 12}


def test_criterion_1_lattice_fidelity():
    with criterion(1, "lattice actions match the printed displays; isometry; Cremona fixture", budget=1.0):
        for case in CASES:
            act = lattice.builtin_action(case)
            assert (act.A == matrix_from_display(GOLDEN_ACTIONS[case])).all(), case
            assert (act.A.T.dot(J).dot(act.B) == J).all(), case
        cr = lattice.cremona_action()
        assert (cr.A == np.array(CREMONA_A, dtype=object)).all()
        assert (cr.B == np.array(CREMONA_B, dtype=object)).all()
        assert (cr.A.dot(cr.A) == np.identity(5, dtype=object)).all()


def _second_differences(seq, stride=1):
    return [seq[k + 2 * stride] - 2 * seq[k + stride] + seq[k] for k in range(len(seq) - 2 * stride)]


@pytest.mark.slow
def test_criterion_2_degree_growth():
    with criterion(2, "symbolic degrees equal lattice predictions", budget=120.0) as note:
        for case in CASES:
            act = lattice.builtin_action(case)
            sym = symbolic_degree_tables(catalog.get_map(case), 5)
            assert sym == [lattice.degree_table(act, n) for n in range(1, 6)], case
            tables = {n: lattice.degree_table(act, n) for n in range(1, 51)}
            L = FINITE_ORDER[case]
            total = [sum(map(sum, tables[n])) for n in range(1, 51)]
            # exactly quadratic along every residue class mod L, for n >= 3
            for i in range(4):
                for j in range(4):
                    seq = [tables[n][i][j] for n in range(3, 51)]
                    d = _second_differences(seq, L)
                    assert all(d[k] == d[k + L] for k in range(len(d) - L)), (case, i, j)
            d_total = _second_differences(total[2:], L)
            assert len(set(d_total)) == 1 and d_total[0] > 0, case
            # step-one second differences of the total degree repeat with period 3
            d1 = _second_differences(total[2:])
            assert all(d1[k] == d1[k + 3] for k in range(len(d1) - 3)) and sum(d1[:3]) > 0
        note["text"] = ("quadratic on every residue class mod L; step-one second differences "
                        "are periodic, not constant (see the ledger)")


def test_criterion_2_literal_constant_second_difference_clause():
    """The literal 'constant second differences for n >= 3' does not hold for any
    natural degree sequence; pinned so a change in the lattice data is noticed."""
    for case in CASES:
        act = lattice.builtin_action(case)
        total = [sum(map(sum, lattice.degree_table(act, n))) for n in range(3, 51)]
        assert len(set(_second_differences(total))) > 1


def test_criterion_3_confinement():
    with criterion(3, "every singularity pattern reproduced, labels consistent with the inclusion chains", budget=30.0) as note:
        checks = [laurent.check_pattern(p) for c in CASES for p in laurent.PATTERNS[c]]
        bad = [f"{c.pattern.case}:{c.pattern.seed}" for c in checks if not c.ok]
        assert not bad, bad
        verdicts = {(c.pattern.case, c.pattern.seed): c.report.verdict_text for c in checks}
        assert verdicts[("a2a2", "q1=eps")] == "confined(4)"
        assert verdicts[("a5", "q1=eps")] == "confined(4)"
        assert verdicts[("a2a2", "q1=1/eps")] == "cyclic(6)"
        assert verdicts[("a5", "q2=1/eps")] == "cyclic(3)"
        assert verdicts[("a5", "p1=1/eps,q2=1/eps")] == "cyclic(1)"
        assert len(laurent.PATTERNS["a2a2"][4].orders) == 7
        assert len(laurent.PATTERNS["a5"][3].orders) == 4
        for case in CASES:
            labels = {lab for c in checks if c.pattern.case == case for lab in c.report.labels() if lab}
            assert labels == set(range(1, 17)), case
        for case in CASES:
            assert laurent.verify_inclusions(case).ok
        note["text"] = f"{len(checks)} patterns"


def test_criterion_4_exact_identities():
    with criterion(4, "bracket, symplecticity, Lax compatibility, invariance") as note:
        for case in CASES:
            I1, I2 = invariants.conserved_quantities(case)
            assert invariants.poisson_bracket(I1.polynomial, I2.polynomial).is_zero()
            s = invariants.check_symplectic(catalog.get_map(case))
            assert s.volume_preserving and s.ok
        assert invariants.is_zero_matrix(invariants.lax_residual())
        assert invariants.check_invariance(catalog.get_map("a5"), invariants.conserved_quantities("a5"), "fixed").ok
        outcome = invariants.invariance_outcome("a2a2")
        # golden: the first mapping exchanges the two quantities exactly
        assert outcome == "swapped"
        note["text"] = "a2a2 outcome: I1 and I2 exchanged"


def test_criterion_5_weyl():
    with criterion(5, "involutions, Coxeter relations, decompositions, translations", budget=300.0):
        for case in CASES:
            ident = catalog.identity(case, autonomous=False)
            for key in catalog.GENERATORS[case]:
                g = catalog.get_map(key)
                assert map_equal(compose(g, g), ident), key
            rep = weyl.check_coxeter_relations(case)
            assert rep.ok, rep.first_failure
            assert weyl.check_phi_decomposition(case).ok
            tr = weyl.check_translation(case)
            assert tr.ok and tr.shifts == weyl.EXPECTED_SHIFTS[case]


def test_criterion_6_twin_roots():
    with criterion(6, "twin root systems satisfy (a) and (b); non-effective images flagged"):
        a, b = weyl.twin_root_check("a2a2"), weyl.twin_root_check("a5")
        assert a.ok and b.ok
        assert ("w_alpha1", "E16", "Hq1 - E15") in a.non_effective
        assert ("w_alpha2_1", "E8", "Hq2 - E7") in b.non_effective
        assert not lattice.is_effective(D("Hq1 - E15"), "a2a2")
        assert not lattice.is_effective(D("Hq2 - E7"), "a5")


def test_criterion_7_flows():
    with criterion(7, "conservation, 4th order, commuting flows, symbolic structure", budget=60.0) as note:
        params = {"a2a2": {"a": 0.7, "b": 0.3}, "a5": {"a": 0.7, "b1": 0.3, "b2": -0.4}}
        worst, orders = 0.0, []
        for case in CASES:
            start = flows.FlowState(0.0, (0.3, 0.2, -0.25, 0.4), params[case])
            for name in ("I1", "I2"):
                tr = flows.integrate(flows.hamiltonian_system(case, name), start, 1.0, 1e-3)
                worst = max(worst, tr.drift("I1"), tr.drift("I2"))
                conv = flows.drift_convergence(flows.hamiltonian_system(case, name), start, 1.0, (0.1, 0.05, 0.025))
                orders.extend(conv.observed_order(name))
            d = flows.commute_check(flows.hamiltonian_system(case, "I1"), flows.hamiltonian_system(case, "I2"), start, 0.1, 1e-3)
            assert d < 1e-6
        assert worst < 1e-8
        assert all(3.5 < o < 4.5 for o in orders), orders
        assert flows.noumi_yamada_check().ok
        assert flows.chart_regularity_check().ok
        note["text"] = f"max drift {worst:.1e}; observed orders {min(orders):.2f}..{max(orders):.2f}"


def test_criterion_8_charts():
    with criterion(8, "32 chart round trips; U4 to U8 transfer and divisor image"):
        trips = invariants.chart_round_trips()
        assert len(trips) == 32 and all(a and b for a, b in trips.values())
        r = invariants.u4_to_u8_check()
        assert r.matches and r.divisor_ok
