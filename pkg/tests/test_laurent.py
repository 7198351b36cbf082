import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from painleve4d import catalog, laurent
from painleve4d.dsl import parse_map
from painleve4d.errors import DivisionByZeroSeries, ValidationError, WindowExhausted
from painleve4d.laurent import LaurentSeries as LS, SeedSpec

DOM = laurent.make_domain("symbolic", (), ("c1", "c2"), random.Random(0))
JET = laurent.make_domain("jet", ("a",), ("c1", "c2"), random.Random(5))

series = st.builds(
    lambda v, cs: LS(DOM, v, [Fraction(c) for c in cs], None, 6),
    st.integers(-2, 2),
    st.lists(st.integers(-5, 5), min_size=1, max_size=4),
)


def _unit(draw_coeffs):
    return LS(DOM, 0, [1] + draw_coeffs, None, 6)


@given(series, series, series)
def test_ring_laws_within_window(a, b, c):
    # truncated series agree up to their common precision
    assert (a + b - (b + a)).known_zero()
    assert (a * b - b * a).known_zero()
    assert ((a + b) * c - (a * c + b * c)).known_zero()
    assert ((a * b) * c - a * (b * c)).known_zero()


@given(series, st.lists(st.integers(-5, 5), max_size=3))
def test_division_inverts_multiplication(a, tail):
    u = _unit([Fraction(t) for t in tail])
    q = (a * u) / u
    assert q.valuation == a.valuation or a.known_zero()
    for k in range(q.valuation, q.prec if q.prec is not None else q.valuation + 3):
        assert q.coefficient(k) == (a.coefficient(k) if k >= a.valuation else 0)


def test_geometric_series():
    inv = LS(DOM, 0, [1, -1], None, 5).inverse()
    assert [inv.coefficient(k) for k in range(5)] == [1] * 5
    assert inv.prec == 5
    with pytest.raises(WindowExhausted):
        inv.coefficient(5)


def test_symbolic_coefficients():
    c1, c2 = DOM.symbol("c1"), DOM.symbol("c2")
    s = LS(DOM, -1, [c1, c2])
    p = s * s
    assert p.valuation == -2
    assert p.coefficient(-2) == DOM.wrap(c1**2)
    assert p.coefficient(-1) == DOM.wrap(2 * c1 * c2)


def test_division_by_zero_series():
    with pytest.raises(DivisionByZeroSeries):
        LS(DOM, 0, [1]) / LS(DOM, 0, [])


def test_cancellation_exhausts_window():
    a = LS(DOM, 0, [1, 1], 2)
    b = LS(DOM, 0, [1, 1, 5], None, 6)
    d = a - b
    assert d.known_zero() and not d.is_zero()
    with pytest.raises(WindowExhausted):
        d.inverse()
    with pytest.raises(WindowExhausted):
        d.order()


def test_jet_gradient_matches_exact_derivative():
    c1, c2, a = JET.symbol("c1"), JET.symbol("c2"), JET.symbol("a")
    f = (c1 * c1 * c2 + a) / (c2 + 3)
    g1, g2 = JET.gradient(f)
    v1, v2, va = (Fraction(JET.symbol(n).v) for n in ("c1", "c2", "a"))
    assert g1 == Fraction(2 * v1 * v2) / (v2 + 3)
    assert g2 == Fraction(v1 * v1 * (v2 + 3) - (v1 * v1 * v2 + va)) / (v2 + 3) ** 2
    assert JET.depends(a * 2) == set()
    assert JET.depends(f) == {"c1", "c2"}


def test_evaluate_map_on_series():
    f = catalog.get_map("a2a2")
    dom, consts, s = laurent.build_seed(SeedSpec.parse("q1=eps"), f.params, 6, mode="symbolic")
    vals = dict(zip(catalog.PHASE, s))
    vals.update({p: LS.constant(dom, dom.symbol(p), 6) for p in f.params})
    img = [laurent.evaluate_rf(e, vals, dom, 6) for e in f.images]
    assert [x.order() for x in img] == [0, 0, -1, 1]


@pytest.mark.parametrize("text", ["q1", "q9=eps", "q1=eps^x", "q1=0*eps", "q1=2"])
def test_seed_errors(text):
    with pytest.raises(ValidationError):
        SeedSpec.parse(text)


def test_seed_forms():
    s = SeedSpec.parse("q2=eps^-1, p2=2*eps")
    assert s.entries == (None, None, (-1, None), (1, Fraction(2)))
    assert SeedSpec.parse("q1=1/eps^2").entries[0] == (-2, None)


ALL_PATTERNS = [p for c in catalog.CASES for p in laurent.PATTERNS[c]]


@pytest.mark.parametrize("pattern", ALL_PATTERNS, ids=[f"{p.case}:{p.seed}" for p in ALL_PATTERNS])
def test_pattern(pattern):
    chk = laurent.check_pattern(pattern)
    assert chk.orders_ok, chk.report.orders()
    assert chk.dims_ok, chk.report.dims()
    assert chk.labels_ok, chk.report.labels()
    assert chk.verdict_ok, chk.report.verdict_text
    assert chk.chains_ok


@pytest.mark.parametrize("case", catalog.CASES)
def test_jacobian_valuations_cancel_over_confined_orbit(case):
    rep = laurent.push_orbit(case, "q1=eps")
    vals = [s.jacobian_valuation for s in rep.steps]
    assert vals[:4] == [2, 2, -2, -2]
    assert sum(v for v in vals if v is not None) == 0


def test_recovered_constants():
    rep = laurent.push_orbit("a2a2", "q1=eps")
    assert len(rep.recovered_constants) == 4
    assert not rep.notes


def test_non_integrable_map_does_not_confine():
    m = parse_map(
        "map bad { vars: q1, p1, q2, p2; params: a, b; q1' = -p2 - q2 + a/q2^2 + b; p1' = q2;"
        " q2' = -p1 - q1 + a/q1^2 + b; p2' = q1; }"
    )
    rep = laurent.push_orbit(m, "q1=eps", max_steps=8)
    assert rep.verdict_text == "open(8)"


@pytest.mark.parametrize("seed", ["q1=eps", "q1=1/eps,p1=eps"])
def test_jet_and_symbolic_agree(seed):
    kw = dict(max_steps=2, window=5, case="a2a2", jacobian=False)
    jet = laurent.push_orbit("a2a2", seed, mode="jet", **kw)
    sym = laurent.push_orbit("a2a2", seed, mode="symbolic", **kw)
    assert jet.orders() == sym.orders()
    assert jet.dims() == sym.dims()
    assert jet.labels() == sym.labels()
    assert [s.centres for s in jet.steps] == [s.centres for s in sym.steps]
    assert [s.depends() for s in jet.steps] == [s.depends() for s in sym.steps]


def test_reports_are_deterministic():
    a = laurent.push_orbit("a5", "q2=1/eps,p2=eps", rng_seed=3).dumps()
    b = laurent.push_orbit("a5", "q2=1/eps,p2=eps", rng_seed=3).dumps()
    assert a == b


@pytest.mark.parametrize("case", catalog.CASES)
def test_inclusion_chains(case):
    assert laurent.verify_inclusions(case).ok


@pytest.mark.parametrize("case,index", [("a2a2", 2), ("a2a2", 10), ("a5", 6), ("a5", 14)])
def test_perturbed_centre_breaks_chain(case, index):
    rep = laurent.verify_inclusions(case, laurent.perturb_centre(case, index))
    assert not rep.ok
    assert f"broken after C{index - 1}" in rep.first_failure


def test_perturbing_non_step_row_is_rejected():
    with pytest.raises(ValidationError):
        laurent.perturb_centre("a5", 3)


def test_case_with_non_autonomous_map_is_rejected():
    with pytest.raises(ValidationError):
        laurent.push_orbit("a2a2.na", "q1=eps", case="a2a2")


@pytest.mark.slow
@pytest.mark.parametrize("pattern", laurent.PATTERNS["a5"][:4], ids=lambda p: p.seed)
def test_symbolic_mode_reproduces_first_steps(pattern):
    rep = laurent.push_orbit("a5", pattern.seed, max_steps=2, window=5, case="a5", mode="symbolic", jacobian=False)
    n = len(rep.steps)
    assert tuple(rep.orders()) == pattern.orders[:n]
    assert tuple(rep.labels()) == pattern.labels[:n]
