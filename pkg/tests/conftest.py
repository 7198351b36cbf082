from fractions import Fraction

from hypothesis import settings, strategies as st

from painleve4d.algebra import Polynomial, VariableRegistry

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

XYZ = VariableRegistry(["x", "y", "z"])

small_fracs = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 7))


@st.composite
def polys(draw, registry=XYZ, max_terms=4, max_deg=2):
    n = len(registry)
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, max_deg)] * n), small_fracs, max_size=max_terms))
    return Polynomial(registry, terms).as_rational()


@st.composite
def nonzero_polys(draw, registry=XYZ):
    p = draw(polys(registry))
    return p if p else registry.one() + registry.var(registry.names[0])


@st.composite
def rational_functions(draw, registry=XYZ):
    return draw(polys(registry)) / draw(nonzero_polys(registry))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import summary_lines

    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
