import math
import random
from fractions import Fraction

import pytest
from painleve4d import flows
from painleve4d.errors import ValidationError
from painleve4d.flows import FlowState

POINT = (0.3, 0.2, -0.25, 0.4)
PARAMS = {"a2a2": {"a": 0.7, "b": 0.3}, "a5": {"a": 0.7, "b1": 0.3, "b2": -0.4}}


def _start(case):
    return FlowState(0.0, POINT, PARAMS[case])


@pytest.mark.parametrize("case", ["a2a2", "a5"])
@pytest.mark.parametrize("name", ["I1", "I2"])
def test_rk4_conserves_quantities(case, name):
    tr = flows.integrate(flows.hamiltonian_system(case, name), _start(case), 1.0, 1e-3)
    assert not tr.singular
    assert tr.drift("I1") < 1e-8
    assert tr.drift("I2") < 1e-8


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_fourth_order_convergence(case):
    sys_ = flows.hamiltonian_system(case, "I1")
    # the a2a2 I1 flow leaves (q2, p2), hence I2, exactly fixed
    rep = flows.drift_convergence(sys_, _start(case), 1.0, (0.1, 0.05, 0.025))
    for name in ("I1", "I2"):
        if max(rep.drifts[name]) < 1e-13:
            continue
        for order in rep.observed_order(name):
            assert 3.5 < order < 4.5


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_flows_commute(case):
    d = flows.commute_check(flows.hamiltonian_system(case, "I1"), flows.hamiltonian_system(case, "I2"), _start(case), 0.1, 1e-3)
    assert d < 1e-6


def test_non_commuting_flows_detected():
    d = flows.commute_check(flows.hamiltonian_system("a5", "I1"), flows.custom_system("a5", "q1*p2"), _start("a5"), 0.1, 1e-3)
    assert d > 1e-4


def test_singular_locus_stops_integration():
    # q1 moves with unit speed from -0.05; the midpoint stage of the step from t=0.04 lands on q1 = 0
    sys_ = flows.custom_system("a5", "p1 + 1/q1")
    tr = flows.integrate(sys_, FlowState(0.0, (-0.05, 0.0, 0.1, 0.1), PARAMS["a5"]), 1.0, 1e-2, monitors={})
    assert tr.singular
    assert tr.message.startswith("t=0.04")
    assert len(tr.times) == 5
    assert all(math.isfinite(v) for st_ in tr.states for v in st_)


def test_step_validation():
    sys_ = flows.hamiltonian_system("a2a2", "I1")
    with pytest.raises(ValidationError):
        flows.integrate(sys_, _start("a2a2"), 1.0, 0.3)
    with pytest.raises(ValidationError):
        flows.integrate(sys_, _start("a2a2"), 1.0, -1e-3)
    with pytest.raises(ValidationError):
        FlowState(0.0, (math.nan, 0, 0, 0), {})


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_symbolic_gradient_matches_finite_differences(case):
    sys_ = flows.hamiltonian_system(case, "I1")
    H = sys_.hamiltonian
    names = list(H.registry.names)
    Hf = H.to_callable(names)
    field = sys_.vector_field()
    rng = random.Random(11)
    worst = 0.0
    for _ in range(100):
        pt = {n: Fraction(rng.randint(-400, 400), rng.randint(50, 200)) for n in names}
        x = [float(pt[n]) for n in names]
        exact = [float(c.evaluate(pt)) for c in field]

        def d(var):
            i = names.index(var)
            h = 1e-6 * max(1.0, abs(x[i]))
            up, dn = list(x), list(x)
            up[i] += h
            dn[i] -= h
            return (Hf(*up) - Hf(*dn)) / (2 * h)

        approx = [d("p1"), -d("q1"), d("p2"), -d("q2")]
        for e, a in zip(exact, approx):
            worst = max(worst, abs(e - a) / max(1.0, abs(e)))
    assert worst < 1e-5


def test_decoupled_non_autonomous_flows():
    f1 = flows.hamiltonian_system("a2a2", "I1NA").vector_field()
    f2 = flows.hamiltonian_system("a2a2", "I2NA").vector_field()
    assert f1[2].is_zero() and f1[3].is_zero()
    assert f2[0].is_zero() and f2[1].is_zero()


def test_noumi_yamada_form():
    r = flows.noumi_yamada_check()
    assert r.ok and r.sum_consistent
    assert all(x.is_zero() for x in r.residuals)


def test_noumi_yamada_needs_cross_term():
    r = flows.noumi_yamada_check(drop_cross_term=True)
    assert not r.ok
    assert all(not x.is_zero() for x in r.residuals)


def test_chart_regularity():
    r = flows.chart_regularity_check()
    assert r.ok
    assert all(x.is_constant() for x in r.leftovers)


def test_chart_regularity_needs_parameter_rates():
    r = flows.chart_regularity_check(include_param_rates=False)
    assert not r.ok


def test_chart_regularity_autonomous():
    assert flows.chart_regularity_check(autonomous=True).ok


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_each_quantity_is_constant_along_the_other_flow(case):
    s1, s2 = flows.hamiltonian_system(case, "I1"), flows.hamiltonian_system(case, "I2")
    assert s1.time_derivative(s2.hamiltonian).is_zero()
    assert s2.time_derivative(s1.hamiltonian).is_zero()
