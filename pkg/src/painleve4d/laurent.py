"""Truncated Laurent series in eps and the singularity-confinement scanner.

A series stores its valuation, a list of coefficients and the absolute
order up to which it is known; ``prec=None`` marks an exact finite series.
Products and quotients keep at most ``window`` coefficients.

Coefficients live in a pluggable domain.  :class:`JetDomain` (the default)
specialises parameters and generic constants c1, c2, ... to random exact
rationals and carries the first derivatives in the constants along, which
is all the scanner needs: zero tests, ranks and which constants survive.
:class:`SymbolicDomain` keeps exact rational functions and is meant for
short orbits and for cross-checking the jets.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from gmpy2 import mpq

from . import catalog, charts
from .algebra import PHASE, RationalFunction, VariableRegistry
from .errors import DegenerateSubstitution, DivisionByZeroSeries, ValidationError, WindowExhausted
from .maps import BirationalMap
from .matrices import det, rank

DEFAULT_WINDOW = 8
MODES = ("jet", "symbolic")

# ---------------------------------------------------------------- coefficient domains

_ZERO = mpq(0)
_ONE = mpq(1)


class Jet:
    """Value and gradient (None when zero) with respect to the generic constants."""

    __slots__ = ("v", "g")

    def __init__(self, v, g=None):
        self.v = v
        self.g = g

    def __bool__(self):
        return bool(self.v) or (self.g is not None and any(self.g))

    def _lift(self, o):
        return o if isinstance(o, Jet) else Jet(mpq(o))

    def __add__(self, o):
        o = self._lift(o)
        if self.g is None:
            g = o.g
        elif o.g is None:
            g = self.g
        else:
            g = tuple(x + y for x, y in zip(self.g, o.g))
        return Jet(self.v + o.v, g)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, None if self.g is None else tuple(-x for x in self.g))

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        a, b = self.v, o.v
        if self.g is None:
            g = None if o.g is None or not a else tuple(a * y for y in o.g)
        elif o.g is None:
            g = tuple(b * x for x in self.g) if b else None
        else:
            g = tuple(b * x + a * y for x, y in zip(self.g, o.g))
        return Jet(a * b, g)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if not o.v:
            raise DegenerateSubstitution("division by a coefficient vanishing at the sample point")
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def inverse(self):
        if not self.v:
            raise DegenerateSubstitution("division by a coefficient vanishing at the sample point")
        r = 1 / self.v
        return Jet(r, None if self.g is None else tuple(-x * r * r for x in self.g))

    def __pow__(self, n: int):
        out = Jet(_ONE)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other) if isinstance(other, (int, Fraction)) else other
        if not isinstance(other, Jet):
            return NotImplemented
        return not (self - other)

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"Jet({self.v}, {self.g})"


def _fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class JetDomain:
    def __init__(self, params: Sequence[str], consts: Sequence[str], rng: random.Random, values: Mapping[str, object] | None = None):
        self.params = tuple(params)
        self.consts = tuple(consts)
        self._sym: dict[str, Jet] = {}
        values = values or {}
        n = len(self.consts)
        for p in self.params:
            self._sym[p] = Jet(mpq(values[p]) if p in values else _sample(rng))
        for i, c in enumerate(self.consts):
            self._sym[c] = Jet(_sample(rng), tuple(_ONE if j == i else _ZERO for j in range(n)))
        self.zero = Jet(_ZERO)
        self.one = Jet(_ONE)

    def __contains__(self, name):
        return name in self._sym

    def symbol(self, name: str) -> Jet:
        return self._sym[name]

    def coerce(self, x) -> Jet:
        if isinstance(x, Jet):
            return x
        if isinstance(x, RationalFunction):
            return _rf_via_domain(x, self)
        return Jet(mpq(x))

    from_qq = coerce

    def gradient(self, c: Jet) -> list[Fraction]:
        if c.g is None:
            return [Fraction(0)] * len(self.consts)
        return [_fraction(x) for x in c.g]

    def depends(self, c: Jet) -> set[str]:
        return set() if c.g is None else {k for k, x in zip(self.consts, c.g) if x}

    def wrap(self, c):
        return c

    def show(self, c: Jet) -> str:
        dep = sorted(self.depends(c), key=lambda s: int(s[1:]))
        return f"{c.v}" + (f"[{','.join(dep)}]" if dep else "")


class SymbolicDomain:
    def __init__(self, params: Sequence[str], consts: Sequence[str], rng: random.Random, values: Mapping[str, object] | None = None):
        self.params = tuple(params)
        self.consts = tuple(consts)
        self.registry = VariableRegistry(self.params + self.consts)
        self._field = self.registry.field
        self.zero = self._field.zero
        self.one = self._field.one
        self._point = {n: Fraction(rng.randint(-97, 97) or 1, rng.randint(1, 13)) for n in self.registry.names}
        self._fixed = {p: self.registry.const(Fraction(v))._f for p, v in (values or {}).items()}

    def __contains__(self, name):
        return name in self.registry

    def symbol(self, name: str):
        if name in self._fixed:
            return self._fixed[name]
        return self._field.gens[self.registry.index(name)]

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return self.registry.coerce(x)._f
        if isinstance(x, RationalFunction):
            return x.substitute({}, self.registry)._f
        return x

    def from_qq(self, c):
        return self._field(c)

    def gradient(self, c) -> list[Fraction]:
        rf = RationalFunction(self.registry, c)
        return [rf.diff(k).evaluate(self._point) for k in self.consts]

    def depends(self, c) -> set[str]:
        return RationalFunction(self.registry, c).free_symbols() & set(self.consts)

    def wrap(self, c) -> RationalFunction:
        return RationalFunction(self.registry, c)

    def show(self, c) -> str:
        return str(self.wrap(c))


def _sample(rng: random.Random):
    return mpq(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**4))


def make_domain(mode: str, params, consts, rng, values=None):
    if mode == "jet":
        return JetDomain(params, consts, rng, values)
    if mode == "symbolic":
        return SymbolicDomain(params, consts, rng, values)
    raise ValidationError(f"unknown coefficient mode {mode!r}; use one of {', '.join(MODES)}")


def _rf_via_domain(f: RationalFunction, dom):
    num = _poly_in(f._f.numer, f.registry.names, dom)
    return num / _poly_in(f._f.denom, f.registry.names, dom)


def _poly_in(p, names, dom):
    total = dom.zero
    for monom, c in p.terms():
        term = dom.from_qq(c)
        for i, e in enumerate(monom):
            if e:
                term = term * dom.symbol(names[i]) ** e
        total = total + term
    return total


# ---------------------------------------------------------------- series


class LaurentSeries:
    __slots__ = ("domain", "valuation", "_c", "prec", "window")

    def __init__(self, domain, valuation: int, coeffs, prec: int | None = None, window: int = DEFAULT_WINDOW):
        self.domain = domain
        self.window = window
        raw = [domain.coerce(c) if isinstance(c, (int, Fraction, RationalFunction)) else c for c in coeffs]
        k = 0
        while k < len(raw) and not raw[k]:
            k += 1
        raw = raw[k:]
        valuation += k
        if prec is None:
            while raw and not raw[-1]:
                raw.pop()
        if len(raw) > window:
            raw = raw[:window]
            prec = valuation + window if prec is None else min(prec, valuation + window)
        if not raw:
            valuation = 0 if prec is None else prec
        self.valuation = valuation
        self._c = raw
        self.prec = prec

    # constructors
    @classmethod
    def monomial(cls, domain, coeff, k: int, window: int = DEFAULT_WINDOW) -> "LaurentSeries":
        return cls(domain, k, [domain.coerce(coeff)], None, window)

    @classmethod
    def constant(cls, domain, coeff, window: int = DEFAULT_WINDOW) -> "LaurentSeries":
        return cls.monomial(domain, coeff, 0, window)

    # inspection
    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return not self._c and self.exact

    def known_zero(self) -> bool:
        """No nonzero term within the window (possibly an O(eps^prec) remainder)."""
        return not self._c

    @property
    def coefficients(self) -> list:
        return [self.domain.wrap(c) for c in self._c]

    def coefficient(self, k: int):
        """Coefficient of eps^k; raises WindowExhausted beyond the known range."""
        if self.prec is not None and k >= self.prec:
            raise WindowExhausted(f"coefficient of eps^{k} lies beyond the truncation order {self.prec}")
        i = k - self.valuation
        if 0 <= i < len(self._c):
            return self.domain.wrap(self._c[i])
        return self.domain.wrap(self.domain.zero)

    def _lead_raw(self):
        if not self._c:
            if self.exact:
                return self.domain.zero
            raise WindowExhausted(f"all terms cancelled below eps^{self.prec}")
        return self._c[0]

    def leading(self):
        return self.domain.wrap(self._lead_raw())

    def order(self) -> int:
        if not self._c and not self.exact:
            raise WindowExhausted(f"all terms cancelled below eps^{self.prec}")
        return self.valuation

    def relative_precision(self) -> int | None:
        return None if self.exact else self.prec - self.valuation

    def vanishes(self) -> bool:
        """Tends to 0 as eps -> 0 (positive order, or nothing left in the window)."""
        return not self._c or self.valuation > 0

    # arithmetic
    def _lift(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.domain is not self.domain:
                raise ValidationError("series over different coefficient domains")
            return other
        return LaurentSeries.constant(self.domain, other, self.window)

    def __add__(self, other):
        b = self._lift(other)
        if self.is_zero():
            return b
        if b.is_zero():
            return self
        precs = [p for p in (self.prec, b.prec) if p is not None]
        prec = min(precs) if precs else None
        v = min(self.valuation, b.valuation)
        end = max(self.valuation + len(self._c), b.valuation + len(b._c))
        if prec is not None:
            end = min(end, prec)
        out = [self.domain.zero] * max(end - v, 0)
        for s in (self, b):
            for i, c in enumerate(s._c):
                k = s.valuation + i - v
                if k < len(out):
                    out[k] = out[k] + c
        return LaurentSeries(self.domain, v, out, prec, min(self.window, b.window))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.domain, self.valuation, [-c for c in self._c], self.prec, self.window)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        b = self._lift(other)
        w = min(self.window, b.window)
        if self.is_zero() or b.is_zero():
            return LaurentSeries(self.domain, 0, [], None, w)
        ra, rb = self.relative_precision(), b.relative_precision()
        if ra == 0 or rb == 0:
            raise WindowExhausted("multiplying a series with no known terms")
        v = self.valuation + b.valuation
        rel = [r for r in (ra, rb) if r is not None]
        if rel:
            n = min(min(rel), w)
            prec = v + n
        else:
            n = len(self._c) + len(b._c) - 1
            prec = None
            if n > w:
                n, prec = w, v + w
        out = [self.domain.zero] * n
        for i, x in enumerate(self._c[:n]):
            for j, y in enumerate(b._c[: n - i]):
                out[i + j] = out[i + j] + x * y
        return LaurentSeries(self.domain, v, out, prec, w)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if self.is_zero():
            raise DivisionByZeroSeries("division by the zero series")
        if not self._c:
            raise WindowExhausted(f"divisor has no known nonzero term below eps^{self.prec}")
        b = self._c
        if len(b) == 1 and self.exact:
            return LaurentSeries(self.domain, -self.valuation, [self.domain.one / b[0]], None, self.window)
        n = self.window if self.exact else min(self.relative_precision(), self.window)
        inv0 = self.domain.one / b[0]
        d = [inv0]
        for k in range(1, n):
            s = self.domain.zero
            for j in range(1, min(k, len(b) - 1) + 1):
                s = s + b[j] * d[k - j]
            d.append(-s * inv0)
        return LaurentSeries(self.domain, -self.valuation, d, -self.valuation + n, self.window)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = LaurentSeries.constant(self.domain, 1, self.window)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        if (self.valuation, self.prec, len(self._c)) != (other.valuation, other.prec, len(other._c)):
            return False
        return all(not (x - y) for x, y in zip(self._c, other._c))

    __hash__ = None

    def __str__(self):
        if not self._c:
            return "0" if self.exact else f"O(eps^{self.prec})"
        parts = []
        for i, c in enumerate(self._c):
            k = self.valuation + i
            if not c:
                continue
            mono = "" if k == 0 else ("eps" if k == 1 else f"eps^{k}")
            parts.append(f"({self.domain.show(c)})" + (f"*{mono}" if mono else ""))
        if not self.exact:
            parts.append(f"O(eps^{self.prec})")
        return " + ".join(parts)

    __repr__ = __str__


def series_arith(a: LaurentSeries, b: LaurentSeries, op: str) -> LaurentSeries:
    ops = {"add": lambda: a + b, "sub": lambda: a - b, "mul": lambda: a * b, "div": lambda: a / b}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    return ops[op]()


def evaluate_rf(f: RationalFunction, values: Mapping[str, LaurentSeries], domain, window: int = DEFAULT_WINDOW) -> LaurentSeries:
    """Substitute series for some symbols of ``f``; the rest must be symbols of the domain."""
    names = f.registry.names
    conv = []
    for n in names:
        if n in values:
            conv.append(None)
        elif n in domain:
            conv.append(domain.symbol(n))
        else:
            raise ValidationError(f"symbol {n!r} is neither bound to a series nor a coefficient")
    cache: dict[tuple[int, int], LaurentSeries] = {}

    def power(i: int, e: int) -> LaurentSeries:
        key = (i, e)
        if key not in cache:
            cache[key] = values[names[i]] if e == 1 else power(i, e - 1) * values[names[i]]
        return cache[key]

    def poly(p) -> LaurentSeries:
        total = LaurentSeries(domain, 0, [], None, window)
        for monom, c in p.terms():
            coeff = domain.from_qq(c)
            term = None
            for i, e in enumerate(monom):
                if not e:
                    continue
                if conv[i] is None:
                    term = power(i, e) if term is None else term * power(i, e)
                else:
                    coeff = coeff * conv[i] ** e
            s = LaurentSeries(domain, 0, [coeff], None, window)
            total = total + (s if term is None else term * s)
        return total

    num = poly(f._f.numer)
    den = poly(f._f.denom)
    return num / den


# ---------------------------------------------------------------- seeds

_SEED_TOKEN = re.compile(r"^(?:(?P<coef>-?\d+(?:/\d+)?)\*)?(?:(?P<inv>1/)?eps(?:\^(?P<exp>-?\d+))?)$")


@dataclass(frozen=True)
class SeedSpec:
    """Per phase variable: ``None`` (generic) or a leading exponent with an optional fixed coefficient."""

    entries: tuple  # 4 items: None | (k, Fraction|None)
    depth: int = 1  # fresh lower-order terms per singular coordinate
    text: str = ""

    def __post_init__(self):
        if len(self.entries) != 4:
            raise ValidationError("a seed needs four entries")
        if all(e is None or e[0] == 0 for e in self.entries):
            raise ValidationError("seed has no singular coordinate; the orbit is trivially regular")

    @classmethod
    def parse(cls, text: str, depth: int = 1) -> "SeedSpec":
        """``"q1=eps"``, ``"q1=1/eps,p1=1/eps"``, ``"q2=eps^-1, p2=2*eps"``; unnamed coordinates are generic."""
        entries = {v: None for v in PHASE}
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise ValidationError(f"seed entry {part!r} is not of the form var=value")
            var, val = (s.strip() for s in part.split("=", 1))
            if var not in entries:
                raise ValidationError(f"unknown phase variable {var!r} in seed")
            m = _SEED_TOKEN.match(val.replace(" ", ""))
            if not m:
                raise ValidationError(f"cannot read seed value {val!r}; use eps, 1/eps, eps^k, or r*eps^k")
            k = int(m.group("exp") or 1)
            if m.group("inv"):
                k = -k
            coef = Fraction(m.group("coef")) if m.group("coef") else None
            if coef == 0:
                raise ValidationError(f"leading coefficient of {var} must be nonzero")
            entries[var] = (k, coef)
        return cls(tuple(entries[v] for v in PHASE), depth, text)

    def describe(self) -> str:
        out = []
        for v, e in zip(PHASE, self.entries):
            if e is None:
                continue
            k, c = e
            out.append(f"{v}={'' if c is None else f'{c}*'}eps^{k}")
        return ",".join(out)


def _seed_plan(seed: SeedSpec):
    plan, count = [], 0
    for e in seed.entries:
        if e is None or e[0] == 0:
            plan.append((0, None, 1, 0))
            count += 1
        else:
            k, c = e
            fresh = 0 if c is not None else 1
            plan.append((k, c, fresh, seed.depth))
            count += fresh + seed.depth
    return plan, tuple(f"c{i}" for i in range(1, count + 1))


def build_seed(seed: SeedSpec, params: Sequence[str], window: int, mode: str = "jet", rng: random.Random | None = None, values=None):
    """Coefficient domain, generic constants and the four seed series.

    A generic coordinate is a fresh constant; a singular one is
    ``eps^k (c + c' eps + ...)`` with ``depth`` fresh lower-order terms.
    """
    plan, consts = _seed_plan(seed)
    dom = make_domain(mode, params, consts, rng or random.Random(0), values)
    it = iter(consts)
    series = []
    for k, c, lead_fresh, extra in plan:
        coeffs = [dom.symbol(next(it)) if lead_fresh else dom.coerce(c)]
        coeffs += [dom.symbol(next(it)) for _ in range(extra)]
        series.append(LaurentSeries(dom, k, coeffs, None, window))
    return dom, consts, tuple(series)


# ---------------------------------------------------------------- orbit analysis


@dataclass
class OrbitStep:
    series: tuple[LaurentSeries, ...]
    leading_orders: tuple[int, ...]
    component_dimension: int
    blowup_label: int | None
    centres: tuple[int, ...] = ()
    jacobian_valuation: int | None = None  # of the map applied to this step, in local coords

    def leading_coefficients(self) -> tuple:
        return tuple(s.leading() for s in self.series)

    def depends(self) -> tuple[frozenset, ...]:
        """Generic constants each leading coefficient depends on."""
        return tuple(frozenset(s.domain.depends(s._lead_raw())) for s in self.series)

    def as_dict(self) -> dict:
        return {"orders": list(self.leading_orders), "dim": self.component_dimension, "label": self.blowup_label}


@dataclass
class ConfinementReport:
    seed: str
    case: str | None
    steps: list[OrbitStep]
    verdict: str  # "confined", "cyclic" or "open"
    length: int
    recovered_constants: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    mode: str = "jet"

    @property
    def verdict_text(self) -> str:
        return f"{self.verdict}({self.length})"

    def orders(self) -> list[tuple[int, ...]]:
        return [s.leading_orders for s in self.steps]

    def dims(self) -> list[int]:
        return [s.component_dimension for s in self.steps]

    def labels(self) -> list[int | None]:
        return [s.blowup_label for s in self.steps]

    def to_json(self) -> dict:
        return {"seed": self.seed, "steps": [s.as_dict() for s in self.steps], "verdict": self.verdict_text}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _gradient_rank(raws: Sequence, dom) -> int:
    rows = [dom.gradient(c) for c in raws]
    rows = [r for r in rows if any(r)]
    return rank(rows) if rows else 0


def component_dimension(series: Sequence[LaurentSeries]) -> int:
    """Rank, in the generic constants, of the limits of the coordinates that stay finite and nonzero."""
    finite = [s._lead_raw() for s in series if s.order() == 0]
    return _gradient_rank(finite, series[0].domain) if finite else 0


@dataclass(frozen=True)
class _Centre:
    equations: tuple[RationalFunction, RationalFunction]  # in parent chart coords
    forward: tuple[RationalFunction, ...]  # chart coords in parent coords
    coords: tuple[str, ...]


def centre_table(case: str, data: dict | None = None) -> dict[int, _Centre]:
    if data is None:
        return _default_table(case)
    return _table_from(case, data)


@lru_cache(maxsize=None)
def _default_table(case: str) -> dict[int, _Centre]:
    return _table_from(case, None)


def _table_from(case, data):
    out = {}
    for i in range(1, 17):
        c = charts.chart(case, i, True) if data is None else charts.build_chart(case, i, True, data)
        out[i] = _Centre(c.centre_local, c.forward_local, c.coords)
    return out


def centres_containing(series: Sequence[LaurentSeries], case: str, table=None, params: Mapping[str, LaurentSeries] | None = None) -> tuple[int, ...]:
    """Indices of centres C_i whose two equations both tend to 0 along the family.

    Each chain is walked in local coordinates: the family is lifted to U_k
    only once it is known to lie in C_k, and the walk stops at the first
    centre it misses.
    """
    table = table or centre_table(case)
    window = series[0].window
    dom = series[0].domain
    base = dict(zip(PHASE, series))
    if params:
        base.update(params)
    hit = []
    for chain in charts.CHAINS:
        vals = base
        for pos, i in enumerate(chain):
            ctr = table[i]
            try:
                inside = all(evaluate_rf(e, vals, dom, window).vanishes() for e in ctr.equations)
            except (DivisionByZeroSeries, WindowExhausted, DegenerateSubstitution):
                inside = False
            if not inside:
                break
            hit.append(i)
            if pos + 1 < len(chain):
                try:
                    lifted = {c: evaluate_rf(e, vals, dom, window) for c, e in zip(ctr.coords, ctr.forward)}
                except (DivisionByZeroSeries, WindowExhausted, DegenerateSubstitution):
                    break
                if params:
                    lifted.update(params)
                vals = lifted
    return tuple(hit)


def label_from_hits(hits: Sequence[int]) -> int | None:
    """Deepest centre of the first chain that the family enters."""
    for chain in charts.CHAINS:
        inside = [i for i in chain if i in hits]
        if inside:
            return max(inside)
    return None


def match_center(step: OrbitStep | Sequence[LaurentSeries], case: str, table=None) -> int | None:
    """Deepest catalogued centre containing the family, or None."""
    if isinstance(step, OrbitStep):
        return label_from_hits(step.centres) if step.centres else label_from_hits(centres_containing(step.series, case, table))
    return label_from_hits(centres_containing(step, case, table))


@lru_cache(maxsize=None)
def _jacobian_det(f: BirationalMap) -> RationalFunction:
    jac = [[e.diff(v) for v in f.phase] for e in f.images]
    return det(jac)


def _signature(step: OrbitStep) -> tuple:
    return (step.leading_orders, step.component_dimension, step.blowup_label, tuple(bool(d) for d in step.depends()))


def _detect_case(f: BirationalMap) -> str | None:
    for c in catalog.CASES:
        if catalog.registry(c).names == f.registry.names:
            return c
    return None


def push_orbit(
    f: BirationalMap | str,
    seed: SeedSpec | str,
    max_steps: int = 12,
    window: int = DEFAULT_WINDOW,
    case: str | None = None,
    params: Mapping[str, object] | None = None,
    rng_seed: int = 0,
    mode: str = "jet",
    jacobian: bool = True,
) -> ConfinementReport:
    """Iterate ``f`` on a singular seed family and classify the orbit.

    confined(n): step n+1 is a generic point, so the family re-emerges as a
    hypersurface at step n; cyclic(n): step n repeats the seed's pattern
    (orders, dimension, label and which leading terms are free);
    open(max_steps) otherwise.  Centre labels need ``case`` (detected for
    the autonomous catalogue maps).
    """
    if window < 4:
        raise ValidationError("window must be at least 4")
    if max_steps < 1:
        raise ValidationError("max_steps must be positive")
    if isinstance(f, str):
        f = catalog.get_map(f)
    if isinstance(seed, str):
        seed = SeedSpec.parse(seed)
    case = case or _detect_case(f)
    if case is not None and tuple(f.params) != catalog.AUTO_PARAMS[case]:
        raise ValidationError(f"centre labels for {case} need the autonomous parameters {catalog.AUTO_PARAMS[case]}")
    rng = random.Random(rng_seed)
    fixed = {p: Fraction(params[p]) for p in f.params if params and p in params}
    dom, consts, xs = build_seed(seed, f.params, window, mode, rng, fixed)
    pvals = {p: LaurentSeries.constant(dom, dom.symbol(p), window) for p in f.params}
    jd = _jacobian_det(f) if jacobian else None
    table = centre_table(case) if case else None

    def analyse(series, pv):
        orders = tuple(s.order() for s in series)
        hits = centres_containing(series, case, table, pv) if case else ()
        return OrbitStep(tuple(series), orders, component_dimension(series), label_from_hits(hits), hits)

    steps = [analyse(xs, pvals)]
    first = _signature(steps[0])
    verdict, length = "open", max_steps
    for n in range(1, max_steps + 1):
        vals = dict(zip(f.phase, xs))
        vals.update(pvals)
        try:
            new = tuple(evaluate_rf(e, vals, dom, window) for e in f.images)
            for s in new:
                s.order()
        except WindowExhausted as exc:
            raise WindowExhausted(f"step {n}: {exc}; enlarge the window") from None
        if jd is not None:
            djac = evaluate_rf(jd, vals, dom, window)
            jv = None if djac.known_zero() else djac.order()
            if jv is not None:
                jv += sum(-2 * s.order() for s in new if s.order() < 0) + sum(2 * s.order() for s in xs if s.order() < 0)
            steps[-1].jacobian_valuation = jv
        xs = new
        pvals = {p: evaluate_rf(f.param_update[p], vals, dom, window) for p in f.params}
        step = analyse(xs, pvals)
        if all(o == 0 for o in step.leading_orders):
            verdict, length = "confined", n - 1
            break
        steps.append(step)
        if _signature(step) == first:
            verdict, length = "cyclic", n
            break
    rep = ConfinementReport(seed.text or seed.describe(), case, steps, verdict, length, mode=mode)
    if verdict == "confined":
        final = steps[-1]
        rep.recovered_constants = sorted(set().union(*final.depends()), key=lambda s: int(s[1:]))
        seed_rank = _gradient_rank([s._lead_raw() for s in steps[0].series], dom)
        final_rank = _gradient_rank([s._lead_raw() for s in final.series], dom)
        if final_rank < seed_rank:
            rep.notes.append(f"final step carries {final_rank} independent constants, seed {seed_rank}")
    return rep


# ---------------------------------------------------------------- the catalogued patterns


@dataclass(frozen=True)
class Pattern:
    case: str
    name: str
    seed: str
    orders: tuple[tuple[int, ...], ...]
    dims: tuple[int, ...]
    labels: tuple[int | None, ...]
    verdict: str
    derived: bool = False  # expectation obtained by a symmetry rather than printed


def _swap_pattern(p: Pattern) -> Pattern:
    """(q1, p1) <-> (q2, p2) counterpart of an A5 pattern; centres shift by 8."""
    sw = {"q1": "q2", "p1": "p2", "q2": "q1", "p2": "p1"}
    seed = ",".join(f"{sw[v]}={val}" for v, val in (e.split("=") for e in p.seed.split(",")))
    return Pattern(
        p.case, p.name + "'", seed,
        tuple((o[2], o[3], o[0], o[1]) for o in p.orders),
        p.dims,
        tuple(None if lab is None else (lab + 8 - 1) % 16 + 1 for lab in p.labels),
        p.verdict, True,
    )


_A5_PATTERNS = (
    Pattern("a5", "q1=0 hypersurface", "q1=eps",
            ((1, 0, 0, 0), (0, 0, -1, 1), (0, -1, -1, 0), (1, -1, 0, 0), (0, 0, 0, 1)),
            (3, 2, 1, 2, 3), (None, 6, 4, 8, None), "confined(4)"),
    Pattern("a5", "q2=infinity hypersurface", "q2=1/eps",
            ((0, 0, -1, 0), (0, -1, -1, 0), (0, -1, 0, 0), (0, 0, -1, 0)),
            (3, 2, 3, 3), (None, 2, None, None), "cyclic(3)"),
    Pattern("a5", "centre C1 family", "p1=1/eps,q2=1/eps",
            ((0, -1, -1, 0), (0, -1, -1, 0)), (2, 2), (1, 1), "cyclic(1)"),
    Pattern("a5", "centre C5 family", "q2=1/eps,p2=eps",
            ((0, 0, -1, 1), (0, -1, -1, 0), (1, -1, 0, 0), (0, 0, -1, 1)),
            (2, 1, 2, 2), (5, 3, 7, 5), "cyclic(3)"),
)

PATTERNS: dict[str, tuple[Pattern, ...]] = {
    "a2a2": (
        Pattern("a2a2", "q1=0 hypersurface", "q1=eps",
                ((1, 0, 0, 0), (0, 0, -1, 1), (-1, -1, 0, 0), (0, 0, 1, -1), (0, 1, 0, 0)),
                (3, 2, 2, 2, 3), (None, 14, 4, 16, None), "confined(4)"),
        Pattern("a2a2", "q2=0 hypersurface", "q2=eps",
                ((0, 0, 1, 0), (-1, 1, 0, 0), (0, 0, -1, -1), (1, -1, 0, 0), (0, 0, 0, 1)),
                (3, 2, 2, 2, 3), (None, 6, 12, 8, None), "confined(4)"),
        Pattern("a2a2", "q1=infinity hypersurface", "q1=1/eps",
                ((-1, 0, 0, 0), (0, 0, -1, -1), (0, -1, 0, 0), (0, 0, -1, 0), (-1, -1, 0, 0), (0, 0, 0, -1), (-1, 0, 0, 0)),
                (3, 2, 3, 3, 2, 3, 3), (None, 10, None, None, 2, None, None), "cyclic(6)"),
        Pattern("a2a2", "centre C1 family", "q1=1/eps,p1=1/eps",
                ((-1, -1, 0, 0), (0, 0, -1, -1), (-1, -1, 0, 0)), (2, 2, 2), (1, 9, 1), "cyclic(2)"),
        Pattern("a2a2", "centre C5 family", "q1=1/eps,p1=eps",
                ((-1, 1, 0, 0), (0, 0, -1, -1), (1, -1, 0, 0), (0, 0, -1, 1), (-1, -1, 0, 0), (0, 0, 1, -1), (-1, 1, 0, 0)),
                (2, 2, 2, 2, 2, 2, 2), (5, 11, 7, 13, 3, 15, 5), "cyclic(6)"),
    ),
    "a5": _A5_PATTERNS + tuple(_swap_pattern(p) for p in _A5_PATTERNS),
}


@lru_cache(maxsize=None)
def scan_pattern(case: str, seed: str, window: int = DEFAULT_WINDOW, max_steps: int = 12, mode: str = "jet") -> ConfinementReport:
    return push_orbit(case, seed, max_steps=max_steps, window=window, case=case, mode=mode)


@dataclass
class PatternCheck:
    pattern: Pattern
    report: ConfinementReport
    orders_ok: bool
    dims_ok: bool
    labels_ok: bool
    verdict_ok: bool
    chains_ok: bool  # every labelled step lies in all shallower centres of its chain

    @property
    def ok(self) -> bool:
        return self.orders_ok and self.dims_ok and self.labels_ok and self.verdict_ok and self.chains_ok


def _chain_consistent(step: OrbitStep) -> bool:
    if step.blowup_label is None:
        return True
    chain = next(c for c in charts.CHAINS if step.blowup_label in c)
    need = chain[: chain.index(step.blowup_label) + 1]
    return all(i in step.centres for i in need)


def check_pattern(p: Pattern, window: int = DEFAULT_WINDOW) -> PatternCheck:
    rep = scan_pattern(p.case, p.seed, window)
    return PatternCheck(
        p, rep,
        tuple(rep.orders()) == p.orders,
        tuple(rep.dims()) == p.dims,
        tuple(rep.labels()) == p.labels,
        rep.verdict_text == p.verdict,
        all(_chain_consistent(s) for s in rep.steps),
    )


# ---------------------------------------------------------------- inclusion relations


@dataclass
class InclusionReport:
    case: str
    ok: bool
    first_failure: str = ""


def perturb_centre(case: str, index: int, delta: str = "1") -> dict:
    """Copy of the chart catalogue with ``delta`` added to the second equation of C_index."""
    data = dict(charts.CHART_DATA[case])
    data[index] = charts.shift_row(data[index], delta)
    return data


def verify_inclusions(case: str, data: dict | None = None) -> InclusionReport:
    """Chains C1>C2>C3>C4, C5>C6, ... hold in the charts and are realised by the orbit families.

    Structurally each C_{k+1} must sit in E_k inside U_k; dynamically the
    deepest centre of each chain must be reached by a catalogued pattern
    step that also lies in every shallower centre of the chain.
    """
    ok, msg = charts.check_inclusion_structure(case, data)
    if not ok:
        return InclusionReport(case, False, msg)
    table = centre_table(case, data)
    families = []
    for p in PATTERNS[case]:
        families.extend(s.series for s in scan_pattern(case, p.seed).steps)
    for chain in charts.CHAINS:
        realised = False
        for series in families:
            hits = centres_containing(series, case, table)
            if all(i in hits for i in chain):
                realised = True
                break
        if not realised:
            deepest = [i for i in chain if any(i in centres_containing(s, case, table) for s in families)]
            got = max(deepest) if deepest else None
            return InclusionReport(case, False, f"chain {'>'.join(f'C{i}' for i in chain)} broken after C{got}" if got else f"no family reaches C{chain[0]}")
    return InclusionReport(case, True)
