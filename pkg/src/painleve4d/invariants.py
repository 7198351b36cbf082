"""Conserved quantities, the symplectic structure, the Lax pair and
chart-level spot checks, all as exact rational-function identities."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from . import catalog, charts
from .algebra import PHASE, RationalFunction, VariableRegistry
from .dsl import parse_expression
from .errors import UnknownKey, ValidationError
from .maps import BirationalMap
from .matrices import det, mat_mul, mat_sub, rank, transpose

CANONICAL_PAIRS = (("q1", "p1"), ("q2", "p2"))

_HIV = "{q}*{p}*({q} + {p} - {b}) - {a1}*{q} + {a2}*{p}"
_HV = "({p})*({q})*({p} + {t})*({q} - {s}) + ({al})*({t})*({q}) + ({be})*({s})*({p}) + ({ga})*({p})*({q})"
_GAMMA = "(a0 + a2 + a4 - a1 - a3 - a5)/2"

_SOURCES: dict[tuple[str, bool], dict[str, str]] = {
    ("a2a2", True): {
        "I1": "q1*p1*(q1 + p1 - b) - a*(q1 + p1)",
        "I2": "q2*p2*(q2 + p2 - b) - a*(q2 + p2)",
    },
    ("a5", True): {
        "I1": "(q1*p1 - q2*p2)^2 + b1*b2*(q1*p1 + q2*p2) + b1*(a*(p1 + q2) - q1*p1^2 - q2^2*p2)"
              " + b2*(a*(q1 + p2) - q1^2*p1 - q2*p2^2)",
        "I2": "(a*(q1 + p2) + q1*p2*(b2 - q2 - p1))*(a*(q2 + p1) + q2*p1*(b1 - q1 - p2))",
    },
    ("a2a2", False): {
        "I1NA": _HIV.format(q="q1", p="p1", b="b_1", a1="a1_1", a2="a2_1"),
        "I2NA": _HIV.format(q="q2", p="p2", b="b_2", a1="a1_2", a2="a2_2"),
    },
    ("a5", False): {
        "I2NA": _HV.format(q="q1", p="p1", al="a5", be="a4", ga=f"-{_GAMMA}", s="b1", t="-b2")
                + " + " + _HV.format(q="q2", p="p2", al="a2", be="a1", ga=_GAMMA, s="b2", t="-b1")
                + " - 2*q1*p1*q2*p2",
    },
}


@dataclass(frozen=True, eq=False)
class ConservedQuantity:
    name: str
    polynomial: RationalFunction
    case: str

    def __post_init__(self):
        if not self.polynomial.is_polynomial():
            raise ValidationError(f"{self.name} is not a polynomial")
        for v in PHASE:
            if v in self.polynomial.registry and self.polynomial.degree(v) > 2:
                raise ValidationError(f"{self.name} has degree {self.polynomial.degree(v)} in {v}; at most 2 allowed")

    @property
    def registry(self) -> VariableRegistry:
        return self.polynomial.registry

    def multidegree(self) -> tuple[int, ...]:
        return tuple(self.polynomial.degree(v) for v in PHASE)

    def __str__(self):
        return f"{self.name} = {self.polynomial}"


def quantity_names(case: str, autonomous: bool = True) -> tuple[str, ...]:
    if (case, autonomous) not in _SOURCES:
        raise UnknownKey(f"unknown case {case!r}")
    return tuple(_SOURCES[(case, autonomous)])


@lru_cache(maxsize=None)
def conserved_quantity(case: str, name: str, autonomous: bool | None = None) -> ConservedQuantity:
    """``I1``/``I2`` of the autonomous map, or the Hamiltonians ``I1NA``/``I2NA``."""
    if autonomous is None:
        autonomous = not name.endswith("NA")
    table = _SOURCES.get((case, autonomous))
    if table is None:
        raise UnknownKey(f"unknown case {case!r}")
    if name not in table:
        raise UnknownKey(f"{case} has no quantity {name!r}; known: {', '.join(table)}")
    reg = catalog.registry(case, autonomous)
    return ConservedQuantity(name, parse_expression(table[name], reg), case)


def conserved_quantities(case: str) -> tuple[ConservedQuantity, ConservedQuantity]:
    return conserved_quantity(case, "I1"), conserved_quantity(case, "I2")


def specialise(I: ConservedQuantity) -> RationalFunction:
    """The non-autonomous quantity at the case preset."""
    auto = catalog.registry(I.case, True)
    if I.registry == auto:
        return I.polynomial
    spec = {k: parse_expression(v, auto) for k, v in catalog.PRESETS[I.case].items()}
    return I.polynomial.substitute(spec, auto)


def perturb_quantity(I: ConservedQuantity, delta=1) -> ConservedQuantity:
    """``I`` with the coefficient of one of its monomials shifted by ``delta``."""
    reg = I.registry
    monom = max(I.polynomial._f.numer.terms())[0]
    term = reg.const(Fraction(delta))
    for name, e in zip(reg.names, monom):
        if e:
            term = term * reg.var(name) ** e
    return ConservedQuantity(I.name + "~", I.polynomial + term, I.case)


def pullback(F: RationalFunction, f: BirationalMap) -> RationalFunction:
    """F o f, parameters included."""
    return F.substitute(f.bindings(), f.registry)


@dataclass
class InvarianceResult:
    mode: str
    ok: bool
    residuals: dict[str, RationalFunction] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_invariance(f: BirationalMap, I, mode: str = "fixed") -> InvarianceResult:
    """fixed: I o f = I for each quantity; swapped: I1 o f = I2 and I2 o f = I1.

    ``I`` is a quantity or a pair; residuals are kept only where they are nonzero.
    """
    if mode not in ("fixed", "swapped"):
        raise ValidationError(f"mode must be 'fixed' or 'swapped', not {mode!r}")
    qs = (I,) if isinstance(I, ConservedQuantity) else tuple(I)
    if mode == "swapped" and len(qs) != 2:
        raise ValidationError("swapped mode needs the pair (I1, I2)")
    targets = qs if mode == "fixed" else (qs[1], qs[0])
    res = {}
    for q, t in zip(qs, targets):
        if q.registry != f.registry:
            raise ValidationError(f"{q.name} and {f.name} live on different registries")
        r = pullback(q.polynomial, f) - t.polynomial
        if not r.is_zero():
            res[q.name] = r
    return InvarianceResult(mode, not res, res)


def check_symmetric_invariance(f: BirationalMap, I1: ConservedQuantity, I2: ConservedQuantity) -> InvarianceResult:
    """(I1 + I2) o f = I1 + I2 and (I1 I2) o f = I1 I2."""
    res = {}
    for name, F in (("I1+I2", I1.polynomial + I2.polynomial), ("I1*I2", I1.polynomial * I2.polynomial)):
        r = pullback(F, f) - F
        if not r.is_zero():
            res[name] = r
    return InvarianceResult("symmetric", not res, res)


def invariance_outcome(case: str) -> str:
    """Strongest statement about I1, I2 that the autonomous map certifies."""
    f = catalog.get_map(case)
    I1, I2 = conserved_quantities(case)
    if check_invariance(f, (I1, I2), "fixed"):
        return "fixed"
    if check_invariance(f, (I1, I2), "swapped"):
        return "swapped"
    if check_symmetric_invariance(f, I1, I2):
        return "symmetric"
    return "none"


# ---------------------------------------------------------------- Poisson and symplectic structure


def poisson_bracket(F: RationalFunction, G: RationalFunction, pairs: Sequence[tuple[str, str]] = CANONICAL_PAIRS) -> RationalFunction:
    if F.registry != G.registry:
        raise ValidationError("bracket of functions on different registries")
    out = F.registry.zero()
    for q, p in pairs:
        out = out + F.diff(q) * G.diff(p) - F.diff(p) * G.diff(q)
    return out


def jacobian(f: BirationalMap, variables: Sequence[str] = PHASE) -> list[list[RationalFunction]]:
    imgs = [f.image(v) for v in variables]
    return [[e.diff(v) for v in variables] for e in imgs]


def omega(registry: VariableRegistry) -> list[list[RationalFunction]]:
    """Matrix of dq1^dp1 + dq2^dp2 in the order q1, p1, q2, p2."""
    z, o = registry.zero(), registry.one()
    return [[z, o, z, z], [-o, z, z, z], [z, z, z, o], [z, z, -o, z]]


@dataclass
class SymplecticResult:
    ok: bool
    determinant: RationalFunction
    residual: list[list[RationalFunction]]

    @property
    def volume_preserving(self) -> bool:
        return self.determinant == self.determinant.registry.one()

    def __bool__(self):
        return self.ok


def check_symplectic(f: BirationalMap) -> SymplecticResult:
    """J^T Omega J = Omega for the Jacobian J of f, exactly."""
    if tuple(f.phase) != PHASE:
        raise ValidationError("symplectic check expects the phase order q1, p1, q2, p2")
    J = jacobian(f)
    W = omega(f.registry)
    R = mat_sub(mat_mul(mat_mul(transpose(J), W), J), W)
    ok = all(x.is_zero() for row in R for x in row)
    return SymplecticResult(ok, det(J), R)


# ---------------------------------------------------------------- Lax pair (first case only)

LAX_VARS = ("y1", "y2", "uy1", "uy2", "a", "b", "h")
# y1 = q1, y2 = q2, underlined y1 = p2, underlined y2 = p1
LAX_TO_PHASE = {"y1": "q1", "y2": "q2", "uy1": "p2", "uy2": "p1"}

_L_TEXT = (
    ("0", "y1", "1", "0", "0", "0"),
    ("h", "-a", "b - y1 - uy2", "0", "0", "0"),
    ("h*uy2", "h", "-a", "0", "0", "0"),
    ("0", "0", "0", "0", "y2", "1"),
    ("0", "0", "0", "h", "-a", "b - y2 - uy1"),
    ("0", "0", "0", "h*uy1", "h", "-a"),
)
_M_TEXT = (
    ("0", "0", "0", "a/y2", "1", "0"),
    ("0", "0", "0", "0", "0", "1"),
    ("0", "0", "0", "h", "0", "0"),
    ("a/y1", "1", "0", "0", "0", "0"),
    ("0", "0", "1", "0", "0", "0"),
    ("h", "0", "0", "0", "0", "0"),
)
# forward shift in the y-variables (the first mapping)
_BAR = {"y1": "-uy1 - y2 + a/y2 + b", "y2": "-uy2 - y1 + a/y1 + b", "uy1": "y1", "uy2": "y2"}


@lru_cache(maxsize=None)
def lax_registry() -> VariableRegistry:
    return VariableRegistry(LAX_VARS, {"h": "spectral"})


@dataclass(frozen=True, eq=False)
class LaxPair:
    L: tuple[tuple[RationalFunction, ...], ...]
    M: tuple[tuple[RationalFunction, ...], ...]

    @property
    def registry(self) -> VariableRegistry:
        return self.L[0][0].registry


def lax_pair(m_overrides: Mapping[str, str] | None = None) -> LaxPair:
    """L and M as printed; ``m_overrides`` substitutes symbols inside M only (negative controls)."""
    reg = lax_registry()
    L = tuple(tuple(parse_expression(e, reg) for e in row) for row in _L_TEXT)
    M = tuple(tuple(parse_expression(e, reg) for e in row) for row in _M_TEXT)
    if m_overrides:
        sub = {k: parse_expression(v, reg) for k, v in m_overrides.items()}
        M = tuple(tuple(e.substitute(sub, reg) for e in row) for row in M)
    return LaxPair(L, M)


def lax_shift(F: RationalFunction) -> RationalFunction:
    reg = lax_registry()
    return F.substitute({k: parse_expression(v, reg) for k, v in _BAR.items()}, reg)


def lax_residual(pair: LaxPair | None = None) -> list[list[RationalFunction]]:
    """L-bar M - M L with the mapping substituted into L."""
    pair = pair or lax_pair()
    Lbar = [[lax_shift(e) for e in row] for row in pair.L]
    return mat_sub(mat_mul(Lbar, [list(r) for r in pair.M]), mat_mul([list(r) for r in pair.M], [list(r) for r in pair.L]))


def is_zero_matrix(R) -> bool:
    return all(x.is_zero() for row in R for x in row)


@lru_cache(maxsize=None)
def lax_characteristic_coefficients() -> dict[tuple[int, int], RationalFunction]:
    """Coefficients of det(x - L), keyed by (power of x, power of h), in the y-variables."""
    reg = lax_registry()
    xreg = reg.extend(("x",), {"x": "spectral"})
    L = [[e.substitute({}, xreg) for e in row] for row in lax_pair().L]
    x = xreg.var("x")
    A = [[(x if i == j else xreg.zero()) - L[i][j] for j in range(6)] for i in range(6)]
    d = det(A)
    xi, hi = xreg.index("x"), xreg.index("h")
    out: dict[tuple[int, int], dict] = {}
    for monom, c in d._f.numer.terms():
        rest = tuple(0 if i == hi else e for i, e in enumerate(monom) if i != xi)
        out.setdefault((monom[xi], monom[hi]), {})[rest] = c
    res = {k: RationalFunction(reg, reg.field(reg.ring(terms))) for k, terms in out.items()}
    return dict(sorted(res.items()))


def to_lax_variables(F: RationalFunction) -> RationalFunction:
    """A quantity of the first case rewritten in y1, y2 and their preimages."""
    reg = lax_registry()
    inv = {v: k for k, v in LAX_TO_PHASE.items()}
    return F.substitute({q: reg.var(inv[q]) for q in PHASE}, reg)


# where the spectral curve carries I1 + I2 and I1 I2 (found by expansion)
LAX_GOLDEN = {(0, 3): ("I1+I2", -1), (0, 2): ("I1*I2", 1)}


@dataclass
class LaxSpectralReport:
    matches: dict[tuple[int, int], bool]
    all_invariant: bool

    @property
    def ok(self) -> bool:
        return all(self.matches.values()) and self.all_invariant


def lax_spectral_check() -> LaxSpectralReport:
    """Golden coefficient locations reproduce I1 + I2 and I1 I2; every coefficient is shift invariant."""
    I1, I2 = (to_lax_variables(q.polynomial) for q in conserved_quantities("a2a2"))
    named = {"I1+I2": I1 + I2, "I1*I2": I1 * I2}
    coeffs = lax_characteristic_coefficients()
    matches = {k: coeffs.get(k) == named[n] * sign for k, (n, sign) in LAX_GOLDEN.items()}
    invariant = all(lax_shift(c) == c for c in coeffs.values())
    return LaxSpectralReport(matches, invariant)


# ---------------------------------------------------------------- chart spot checks


def chart_round_trips(cases: Sequence[str] = catalog.CASES, autonomous: bool = False) -> dict[tuple[str, int], tuple[bool, bool]]:
    return {(c, i): charts.chart(c, i, autonomous).round_trip() for c in cases for i in range(1, 17)}


# the U4 -> U8 transfer of the second mapping as displayed (a0 = 0, a4 = a)
U4_TO_U8_TEXT = ("-v4", "u4", "a/q1 + (b2 + v2 - b2*u4*v2)/(1 - u4*v2)", "q1")


@dataclass
class TransferReport:
    images: tuple[RationalFunction, ...]
    expected: tuple[RationalFunction, ...]
    matches: bool
    exceptional_vanishes: bool  # the image of E_src lies in E_dst
    image_rank: int  # rank of the remaining coordinates restricted to E_src

    @property
    def divisor_ok(self) -> bool:
        return self.exceptional_vanishes and self.image_rank == 3

    @property
    def ok(self) -> bool:
        return self.matches and self.divisor_ok


def divisor_image(case: str, src: int, dst: int, f: BirationalMap | None = None, rng_seed: int = 0) -> tuple[bool, int]:
    """Does f send E_src into E_dst, and is the image 3-dimensional?"""
    imgs = charts.chart_transfer(case, src, dst, f)
    a, b = charts.chart(case, src, True), charts.chart(case, dst, True)
    u = a.exceptional
    reg = a.registry
    on_e = [e.substitute({u: reg.zero()}, reg) for e in imgs]
    k = b.coords.index(b.exceptional)
    vanishes = on_e[k].is_zero()
    others = [e for j, e in enumerate(on_e) if j != k]
    free = [c for c in a.coords if c != u]
    jac = [[e.diff(c) for c in free] for e in others]
    rng = random.Random(rng_seed)
    pt = {n: Fraction(rng.randint(-50, 50) or 3, rng.randint(1, 9)) for n in reg.names}
    pt[u] = Fraction(0)
    return vanishes, rank([[x.evaluate(pt) for x in row] for row in jac])


def u4_to_u8_check() -> TransferReport:
    imgs = charts.chart_transfer("a5", 4, 8)
    reg = charts.chart("a5", 4, True).registry
    expected = tuple(parse_expression(t, reg) for t in U4_TO_U8_TEXT)
    vanishes, r = divisor_image("a5", 4, 8)
    return TransferReport(imgs, expected, imgs == expected, vanishes, r)


# ---------------------------------------------------------------- anticanonical linear systems


@dataclass
class PencilMember:
    case: str
    coefficients: tuple
    polynomial: RationalFunction
    multidegree: tuple[int, ...]
    degenerate: bool  # a constant, so not a divisor

    @property
    def in_anticanonical_class(self) -> bool:
        """Coordinate degrees fit in (2,2,2,2), the degree of -K on (P^1)^4 in each factor."""
        return not self.degenerate and all(d <= 2 for d in self.multidegree)

    def describe(self) -> str:
        if self.degenerate:
            return f"{self.case} member {self.coefficients}: constant, not a divisor"
        return f"{self.case} member {self.coefficients}: {self.polynomial} = 0, multidegree {self.multidegree}"


def anticanonical_pencil(case: str, coefficients: Sequence) -> PencilMember:
    """Member of the anticanonical linear system.

    a2a2: coefficients ((alpha0, alpha1), (beta0, beta1)) give
    (alpha0 + alpha1 I1)(beta0 + beta1 I2); a5: (alpha0, alpha1, alpha2)
    give alpha0 + alpha1 I1 + alpha2 I2.
    """
    I1, I2 = (q.polynomial for q in conserved_quantities(case))
    reg = I1.registry
    if case == "a2a2":
        (a0, a1), (b0, b1) = coefficients
        if (a0, a1) == (0, 0) or (b0, b1) == (0, 0):
            raise ValidationError("projective coefficients cannot all vanish")
        F = (reg.const(Fraction(a0)) + reg.const(Fraction(a1)) * I1) * (reg.const(Fraction(b0)) + reg.const(Fraction(b1)) * I2)
        coeffs = (tuple(coefficients[0]), tuple(coefficients[1]))
    elif case == "a5":
        a0, a1, a2 = coefficients
        if (a0, a1, a2) == (0, 0, 0):
            raise ValidationError("projective coefficients cannot all vanish")
        F = reg.const(Fraction(a0)) + reg.const(Fraction(a1)) * I1 + reg.const(Fraction(a2)) * I2
        coeffs = tuple(coefficients)
    else:
        raise UnknownKey(f"unknown case {case!r}")
    md = tuple(F.degree(v) for v in PHASE)
    return PencilMember(case, coeffs, F, md, F.free_symbols().isdisjoint(PHASE))


def pencil_preserved(case: str, coefficients: Sequence) -> bool:
    """The autonomous map sends the member's zero set to a member of the same system."""
    m = anticanonical_pencil(case, coefficients)
    f = catalog.get_map(case)
    img = pullback(m.polynomial, f)
    if case == "a5":
        return img == m.polynomial
    (a0, a1), (b0, b1) = m.coefficients
    swapped = anticanonical_pencil(case, ((b0, b1), (a0, a1))).polynomial
    return img == swapped
