"""Hamiltonian flows of the conserved quantities: exact vector fields,
a fixed-step RK4 integrator, and symbolic structure checks of the
non-autonomous systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import catalog, charts
from .algebra import PHASE, RationalFunction, VariableRegistry
from .dsl import parse_expression
from .errors import SingularLocus, UnknownKey, ValidationError
from .invariants import conserved_quantities, conserved_quantity

SINGULAR_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class HamiltonianSystem:
    case: str
    name: str
    hamiltonian: RationalFunction
    param_rates: Mapping[str, RationalFunction] = field(default_factory=dict)  # db/dt, in parameters only
    autonomous: bool = True

    @property
    def registry(self) -> VariableRegistry:
        return self.hamiltonian.registry

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(n for n in self.registry.names if n not in PHASE)

    def vector_field(self) -> tuple[RationalFunction, ...]:
        """(dq1, dp1, dq2, dp2)/dt = (H_p1, -H_q1, H_p2, -H_q2)."""
        H = self.hamiltonian
        return (H.diff("p1"), -H.diff("q1"), H.diff("p2"), -H.diff("q2"))

    def time_derivative(self, F: RationalFunction) -> RationalFunction:
        """dF/dt along the flow, parameter evolution included."""
        out = F.registry.zero()
        for v, X in zip(PHASE, self.vector_field()):
            out = out + F.diff(v) * X
        for p, rate in self.param_rates.items():
            out = out + F.diff(p) * rate
        return out


def lambdas(case: str) -> dict[str, RationalFunction]:
    reg = catalog.registry(case, False)
    if case == "a2a2":
        return {j: parse_expression(f"a0_{j} + a1_{j} + a2_{j}", reg) for j in ("1", "2")}
    if case == "a5":
        return {"": parse_expression("a0 + a1 + a2 + a3 + a4 + a5", reg)}
    raise UnknownKey(f"unknown case {case!r}")


def hamiltonian_system(case: str, name: str = "I1", autonomous: bool | None = None) -> HamiltonianSystem:
    """``I1``/``I2`` (autonomous) or ``I1NA``/``I2NA`` with their parameter evolution."""
    if autonomous is None:
        autonomous = not name.endswith("NA")
    q = conserved_quantity(case, name, autonomous)
    if autonomous:
        return HamiltonianSystem(case, name, q.polynomial, {}, True)
    reg = q.registry
    lam = lambdas(case)
    if case == "a2a2":
        i = name[1]
        rates = {f"b_{j}": (lam[j] if j == i else reg.zero()) for j in ("1", "2")}
    else:
        half = reg.const(Fraction(1, 2)) * lam[""]
        rates = {b: half * reg.var(b) for b in ("b1", "b2")}
    return HamiltonianSystem(case, name, q.polynomial, rates, False)


def custom_system(case: str, hamiltonian: str | RationalFunction, name: str = "H") -> HamiltonianSystem:
    """Autonomous system of an arbitrary Hamiltonian on the case's phase space."""
    reg = catalog.registry(case, True)
    H = parse_expression(hamiltonian, reg) if isinstance(hamiltonian, str) else hamiltonian
    return HamiltonianSystem(case, name, H, {}, True)


@dataclass
class FlowState:
    t: float
    phase: tuple[float, float, float, float]
    params: dict[str, float]

    def __post_init__(self):
        if len(self.phase) != 4:
            raise ValidationError("phase state needs four coordinates")
        if not all(math.isfinite(x) for x in self.phase) or not all(math.isfinite(x) for x in self.params.values()):
            raise ValidationError("flow state must be finite")


class _Compiled:
    """Float evaluators of the field, its denominators and the parameter rates."""

    def __init__(self, sys: HamiltonianSystem):
        order = list(PHASE) + list(sys.params)
        self.order = order
        self.field = [e.to_callable(order) for e in sys.vector_field()]
        self.dens = [e.den.as_rational().to_callable(order) for e in sys.vector_field() if not e.den.is_constant()]
        self.rates = {p: r.to_callable(order) for p, r in sys.param_rates.items()}
        self.moving = [p for p, r in sys.param_rates.items() if not r.is_zero()]

    def __call__(self, x: Sequence[float], params: Mapping[str, float]):
        args = list(x) + [params[p] for p in self.order[4:]]
        for d in self.dens:
            if abs(d(*args)) < SINGULAR_THRESHOLD:
                raise SingularLocus(f"vector field denominator vanishes at {tuple(x)}")
        return [g(*args) for g in self.field], {p: self.rates[p](*args) for p in self.moving}


_COMPILED: dict[int, _Compiled] = {}


def _compiled(sys: HamiltonianSystem) -> _Compiled:
    key = id(sys)
    if key not in _COMPILED or _COMPILED[key].order[4:] != list(sys.params):
        _COMPILED[key] = _Compiled(sys)
    return _COMPILED[key]


def hamiltonian_vector_field(sys: HamiltonianSystem, state: FlowState):
    """Phase velocity and parameter derivatives at ``state``."""
    missing = set(sys.params) - set(state.params)
    if missing:
        raise ValidationError(f"state lacks parameter values for {sorted(missing)}")
    return _compiled(sys)(state.phase, state.params)


@dataclass
class Trajectory:
    times: list[float]
    states: list[tuple[float, ...]]
    params: list[dict[str, float]]
    monitors: dict[str, list[float]]
    singular: bool = False
    message: str = ""

    def drift(self, name: str) -> float:
        vals = self.monitors[name]
        return max(abs(v - vals[0]) for v in vals)

    def final(self) -> FlowState:
        return FlowState(self.times[-1], self.states[-1], dict(self.params[-1]))

    def rows(self) -> list[tuple[float, ...]]:
        names = list(self.monitors)
        return [(t, *x, *(self.monitors[n][i] for n in names)) for i, (t, x) in enumerate(zip(self.times, self.states))]


def default_monitors(sys: HamiltonianSystem) -> dict[str, Callable]:
    """The autonomous I1, I2 as float functions of (phase, params)."""
    if not sys.autonomous:
        return {}
    out = {}
    for q in conserved_quantities(sys.case):
        out[q.name] = q.polynomial.to_callable(list(PHASE) + list(catalog.AUTO_PARAMS[sys.case]))
    return out


def integrate(sys: HamiltonianSystem, initial: FlowState, t_end: float, step: float, monitors: Mapping[str, Callable] | None = None) -> Trajectory:
    """Classical RK4 with a fixed step; stops with ``singular=True`` at a catalogued singular locus."""
    if step <= 0:
        raise ValidationError("step must be positive")
    if t_end < initial.t:
        raise ValidationError("t_end precedes the initial time")
    comp = _compiled(sys)
    mons = default_monitors(sys) if monitors is None else dict(monitors)
    pnames = list(sys.params)

    def mon_values(x, p):
        args = list(x) + [p[n] for n in pnames]
        return {k: m(*args) for k, m in mons.items()}

    x = list(initial.phase)
    p = dict(initial.params)
    t = initial.t
    traj = Trajectory([t], [tuple(x)], [dict(p)], {k: [v] for k, v in mon_values(x, p).items()})
    n = int(round((t_end - initial.t) / step))
    if abs(initial.t + n * step - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValidationError("t_end - t0 must be a whole number of steps")

    def shifted(x0, p0, k, h):
        return [a + h * b for a, b in zip(x0, k[0])], {q: p0[q] + h * k[1].get(q, 0.0) for q in p0}

    for i in range(n):
        try:
            k1 = comp(x, p)
            x2, p2 = shifted(x, p, k1, step / 2)
            k2 = comp(x2, p2)
            x3, p3 = shifted(x, p, k2, step / 2)
            k3 = comp(x3, p3)
            x4, p4 = shifted(x, p, k3, step)
            k4 = comp(x4, p4)
        except SingularLocus as exc:
            traj.singular, traj.message = True, f"t={t:.6g}: {exc}"
            break
        x = [a + step / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1[0], k2[0], k3[0], k4[0])]
        for q in comp.moving:
            p[q] = p[q] + step / 6 * (k1[1][q] + 2 * k2[1][q] + 2 * k3[1][q] + k4[1][q])
        t = initial.t + (i + 1) * step
        if not all(math.isfinite(v) for v in x):
            traj.singular, traj.message = True, f"t={t:.6g}: trajectory left the finite chart"
            break
        traj.times.append(t)
        traj.states.append(tuple(x))
        traj.params.append(dict(p))
        for k, v in mon_values(x, p).items():
            traj.monitors[k].append(v)
    return traj


def flow_map(sys: HamiltonianSystem, state: FlowState, t: float, step: float) -> FlowState:
    """Time-t map of the flow (t may be 0)."""
    if t == 0:
        return state
    n = max(1, int(math.ceil(abs(t) / step - 1e-9)))
    traj = integrate(sys, state, state.t + t, t / n, monitors={})
    if traj.singular:
        raise SingularLocus(traj.message)
    return traj.final()


def commute_check(sys1: HamiltonianSystem, sys2: HamiltonianSystem, initial: FlowState, t: float, step: float) -> float:
    """Sup-norm distance between the two orders of composing the time-t flows."""
    if not (sys1.autonomous and sys2.autonomous) or sys1.case != sys2.case:
        raise ValidationError("commute_check needs two autonomous systems of one case")
    a = flow_map(sys2, flow_map(sys1, initial, t, step), t, step)
    b = flow_map(sys1, flow_map(sys2, initial, t, step), t, step)
    return max(abs(x - y) for x, y in zip(a.phase, b.phase))


@dataclass
class ConvergenceReport:
    steps: tuple[float, ...]
    drifts: dict[str, tuple[float, ...]]

    def ratios(self, name: str) -> tuple[float, ...]:
        d = self.drifts[name]
        return tuple(d[i] / d[i + 1] if d[i + 1] else math.inf for i in range(len(d) - 1))

    def observed_order(self, name: str) -> tuple[float, ...]:
        return tuple(math.log2(r) if r > 0 and math.isfinite(r) else math.inf for r in self.ratios(name))


def drift_convergence(sys: HamiltonianSystem, initial: FlowState, t_end: float, steps: Sequence[float]) -> ConvergenceReport:
    """Monitor drift at each step size; halving a 4th-order step should divide it by about 16."""
    drifts: dict[str, list[float]] = {}
    for h in steps:
        tr = integrate(sys, initial, t_end, h)
        if tr.singular:
            raise SingularLocus(tr.message)
        for k in tr.monitors:
            drifts.setdefault(k, []).append(tr.drift(k))
    return ConvergenceReport(tuple(steps), {k: tuple(v) for k, v in drifts.items()})


# ---------------------------------------------------------------- the A5 system in f-variables

_NY_F = ("b1 - q1 - p2", "q2", "p2", "b2 - q2 - p1", "q1", "p1")


def _ny_rhs(i: int, f: Sequence[RationalFunction], a: Sequence[RationalFunction]) -> RationalFunction:
    F = lambda k: f[(i + k) % 6]
    A = lambda k: a[(i + k) % 6]
    quad = -F(1) * F(2) - F(1) * F(4) - F(3) * F(4) + F(2) * F(3) + F(2) * F(5) + F(4) * F(5)
    half = Fraction(1, 2)
    alt = A(0) + A(2) + A(4) - A(1) - A(3) - A(5)
    return F(0) * quad - alt * half * F(0) + A(0) * (F(0) + F(2) + F(4))


@dataclass
class NoumiYamadaReport:
    residuals: tuple[RationalFunction, ...]
    sum_consistent: bool  # d(sum f)/dt = lambda/2 * sum f, summing the six right-hand sides

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals) and self.sum_consistent

    def at(self, point: Mapping[str, object]) -> tuple[Fraction, ...]:
        """Residual values at an exact point (phase variables and parameters)."""
        return tuple(r.evaluate(point) for r in self.residuals)


def noumi_yamada_check(drop_cross_term: bool = False) -> NoumiYamadaReport:
    """The I2NA flow with db_j/dt = lambda b_j / 2 in the variables f0..f5.

    Each residual is df_i/dt along the flow minus the cyclic right-hand side.
    """
    sys = hamiltonian_system("a5", "I2NA")
    if drop_cross_term:
        reg = sys.registry
        sys = HamiltonianSystem(sys.case, "I2NA-no-cross", sys.hamiltonian + parse_expression("2*q1*p1*q2*p2", reg), sys.param_rates, False)
    reg = sys.registry
    f = [parse_expression(t, reg) for t in _NY_F]
    a = [reg.var(f"a{i}") for i in range(6)]
    res = tuple(sys.time_derivative(f[i]) - _ny_rhs(i, f, a) for i in range(6))
    total = sum((_ny_rhs(i, f, a) for i in range(6)), reg.zero())
    lam = lambdas("a5")[""]
    sum_ok = total == reg.const(Fraction(1, 2)) * lam * sum(f, reg.zero())
    return NoumiYamadaReport(res, sum_ok)


# ---------------------------------------------------------------- regularity in a blow-up chart


@dataclass
class ChartRegularityReport:
    case: str
    index: int
    field: tuple[RationalFunction, ...]
    allowed: RationalFunction
    leftovers: tuple[RationalFunction, ...]  # denominator parts not made of the allowed factor

    @property
    def ok(self) -> bool:
        return all(l.is_constant() for l in self.leftovers)


def _strip_factor(den, g):
    """Divide the polynomial ``den`` by ``g`` as often as possible."""
    while True:
        q, r = den.div(g)
        if r or den.is_ground:
            return den
        den = q


def chart_field(case: str, index: int, sys: HamiltonianSystem, include_param_rates: bool = True) -> tuple[RationalFunction, ...]:
    """Vector field of ``sys`` in the coordinates of chart U_index.

    Chart coordinates depend on the parameters (b1 through v3 = (q1 + p2 - b1)/u2
    and so on), so moving parameters contribute through the chain rule;
    ``include_param_rates=False`` drops that term."""
    ch = charts.chart(case, index, sys.autonomous)
    if ch.base != sys.registry:
        raise ValidationError("system and chart use different parameters")
    back = dict(zip(PHASE, ch.backward))
    X = sys.vector_field()
    out = []
    for F in ch.forward:
        d = sys.registry.zero()
        for v, x in zip(PHASE, X):
            d = d + F.diff(v) * x
        if include_param_rates:
            for p, rate in sys.param_rates.items():
                d = d + F.diff(p) * rate
        out.append(d.substitute(back, ch.registry))
    return tuple(out)


U4_ALLOWED = "v2*u4 - 1"


def chart_regularity_check(case: str = "a5", index: int = 4, include_param_rates: bool = True, autonomous: bool = False) -> ChartRegularityReport:
    """In U4 of the A5 case the field is f_i / (2(v2 u4 - 1)^k) with polynomial f_i."""
    if (case, index) != ("a5", 4):
        raise ValidationError("the catalogued regularity check is the A5 chart U4")
    sys = hamiltonian_system("a5", "I1" if autonomous else "I2NA")
    fld = chart_field(case, index, sys, include_param_rates)
    reg = charts.chart(case, index, autonomous).registry
    g = parse_expression(U4_ALLOWED, reg)
    gp = g._f.numer
    left = tuple(RationalFunction(reg, reg.field(_strip_factor(e._f.denom, gp))) for e in fld)
    return ChartRegularityReport(case, index, fld, g, left)
