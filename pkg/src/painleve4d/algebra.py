"""Exact rational functions over QQ on a fixed, ordered set of symbols.

Arithmetic is delegated to sympy's sparse ``PolyRing``/``FracField``
(gmpy2-backed when available); this module adds the registry bookkeeping,
canonical equality, substitution across registries and printing.

Canonical form: numerator and denominator have integer coefficients with
no common polynomial or integer factor, and the leading coefficient of the
denominator (graded lex over registry order) is positive.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex

from .errors import DegenerateSubstitution, DivisionByZero, RegistryMismatch

Number = Union[int, Fraction]

PHASE = ("q1", "p1", "q2", "p2")
KINDS = ("phase", "parameter", "generic", "series", "spectral", "time")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _default_kind(name: str) -> str:
    if name in PHASE:
        return "phase"
    if name in ("eps", "ε"):
        return "series"
    if name == "h":
        return "spectral"
    if name == "t":
        return "time"
    if re.fullmatch(r"c\d+", name):
        return "generic"
    return "parameter"


def to_qq(value):
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    raise TypeError(f"not an exact scalar: {value!r}")


def from_qq(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class VariableRegistry:
    """Ordered symbol table; the order fixes the monomial order."""

    _fields: dict[tuple[str, ...], FracField] = {}

    def __init__(self, names: Iterable[str], kinds: Mapping[str, str] | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names}")
        for n in names:
            if not _IDENT.match(n):
                raise ValueError(f"invalid symbol name {n!r}")
        kinds = dict(kinds or {})
        for n in kinds:
            if n not in names:
                raise ValueError(f"kind given for unknown symbol {n!r}")
        self.names = names
        self.kinds = {n: kinds.get(n, _default_kind(n)) for n in names}
        for k in self.kinds.values():
            if k not in KINDS:
                raise ValueError(f"unknown symbol kind {k!r}")
        self._index = {n: i for i, n in enumerate(names)}
        fld = VariableRegistry._fields.get(names)
        if fld is None:
            fld = FracField([sympy.Symbol(n) for n in names], QQ, grlex)
            VariableRegistry._fields[names] = fld
        self.field = fld
        self.ring = fld.ring

    def __eq__(self, other):
        return isinstance(other, VariableRegistry) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableRegistry({', '.join(self.names)})"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RegistryMismatch(f"symbol {name!r} not in {self!r}") from None

    def of_kind(self, kind: str) -> tuple[str, ...]:
        return tuple(n for n in self.names if self.kinds[n] == kind)

    def extend(self, names: Iterable[str], kinds: Mapping[str, str] | None = None) -> "VariableRegistry":
        extra = [n for n in names if n not in self._index]
        merged = dict(self.kinds)
        merged.update(kinds or {})
        return VariableRegistry(self.names + tuple(extra), {n: merged.get(n, _default_kind(n)) for n in self.names + tuple(extra)})

    def var(self, name: str) -> "RationalFunction":
        return RationalFunction(self, self.field.gens[self.index(name)])

    def vars(self, *names: str) -> tuple["RationalFunction", ...]:
        return tuple(self.var(n) for n in names)

    def poly(self, name: str) -> "Polynomial":
        return Polynomial._wrap(self, self.ring.gens[self.index(name)])

    def const(self, value: Number) -> "RationalFunction":
        return RationalFunction(self, self.field.ground_new(to_qq(value)))

    def zero(self) -> "RationalFunction":
        return RationalFunction(self, self.field.zero)

    def one(self) -> "RationalFunction":
        return RationalFunction(self, self.field.one)

    def coerce(self, value) -> "RationalFunction":
        """Bring an int, Fraction, Polynomial or RationalFunction into this registry."""
        if isinstance(value, RationalFunction):
            if value.registry == self:
                return value
            return value.substitute({}, target=self)
        if isinstance(value, Polynomial):
            return self.coerce(value.as_rational())
        return self.const(value)


def _check(a, b):
    if a.registry != b.registry:
        raise RegistryMismatch(f"{a.registry!r} vs {b.registry!r}")


def _format_coeff_term(c: Fraction, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}*{mono}"


def _format_poly(registry: VariableRegistry, p) -> str:
    if not p:
        return "0"
    pieces = []
    for exps, c in p.terms():
        mono = "*".join(
            registry.names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
        )
        pieces.append(_format_coeff_term(from_qq(c), mono))
    out = pieces[0]
    for s in pieces[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


class Polynomial:
    """Sparse polynomial with rational coefficients."""

    __slots__ = ("registry", "_p")

    def __init__(self, registry: VariableRegistry, terms: Mapping[tuple[int, ...], Number] | None = None):
        self.registry = registry
        ring = registry.ring
        p = ring.zero
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != len(registry) or any((not isinstance(e, int)) or e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {registry!r}")
            if c:
                p += ring({exps: to_qq(c)})
        self._p = p

    @classmethod
    def _wrap(cls, registry, p) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.registry = registry
        obj._p = p
        return obj

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {m: from_qq(c) for m, c in self._p.terms()}

    def _lift(self, other):
        if isinstance(other, Polynomial):
            _check(self, other)
            return other._p
        return self.registry.ring.ground_new(to_qq(other))

    def __add__(self, other):
        return Polynomial._wrap(self.registry, self._p + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial._wrap(self.registry, self._p - self._lift(other))

    def __rsub__(self, other):
        return Polynomial._wrap(self.registry, self._lift(other) - self._p)

    def __mul__(self, other):
        return Polynomial._wrap(self.registry, self._p * self._lift(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial._wrap(self.registry, -self._p)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        return Polynomial._wrap(self.registry, self._p**n)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.registry == other.registry and self._p == other._p
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._p == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.registry.names, tuple(sorted(self._p.items()))))

    def __bool__(self):
        return bool(self._p)

    def is_constant(self) -> bool:
        return self._p.is_ground

    def degree(self, v: str) -> int:
        if not self._p:
            return 0
        return self._p.degree(self.registry.index(v))

    def total_degree(self) -> int:
        return max((sum(m) for m in self._p.keys()), default=0)

    def diff(self, v: str) -> "Polynomial":
        return Polynomial._wrap(self.registry, self._p.diff(self.registry.ring.gens[self.registry.index(v)]))

    def as_rational(self) -> "RationalFunction":
        return RationalFunction(self.registry, self.registry.field.new(self._p))

    def __str__(self):
        return _format_poly(self.registry, self._p)

    def __repr__(self):
        return f"Polynomial({self})"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    _check(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial op {op!r}")


class RationalFunction:
    """Reduced quotient num/den in canonical form; immutable."""

    __slots__ = ("registry", "_f")

    def __init__(self, registry: VariableRegistry, frac):
        self.registry = registry
        self._f = frac

    @property
    def num(self) -> Polynomial:
        return Polynomial._wrap(self.registry, self._f.numer)

    @property
    def den(self) -> Polynomial:
        return Polynomial._wrap(self.registry, self._f.denom)

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            _check(self, other)
            return other._f
        if isinstance(other, Polynomial):
            _check(self, other)
            return self.registry.field.new(other._p)
        return self.registry.field.ground_new(to_qq(other))

    def __add__(self, other):
        return RationalFunction(self.registry, self._f + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RationalFunction(self.registry, self._f - self._lift(other))

    def __rsub__(self, other):
        return RationalFunction(self.registry, self._lift(other) - self._f)

    def __mul__(self, other):
        return RationalFunction(self.registry, self._f * self._lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        d = self._lift(other)
        if not d:
            raise DivisionByZero("division by the zero rational function")
        return RationalFunction(self.registry, self._f / d)

    def __rtruediv__(self, other):
        if not self._f:
            raise DivisionByZero("division by the zero rational function")
        return RationalFunction(self.registry, self._lift(other) / self._f)

    def __neg__(self):
        return RationalFunction(self.registry, -self._f)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            if not self._f:
                raise DivisionByZero("negative power of zero")
            return RationalFunction(self.registry, self._f**n)
        return RationalFunction(self.registry, self._f**n)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.registry == other.registry and self._f == other._f
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._f == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.registry.names, tuple(sorted(self._f.numer.items())), tuple(sorted(self._f.denom.items()))))

    def __bool__(self):
        return bool(self._f)

    def is_zero(self) -> bool:
        return not self._f

    def is_constant(self) -> bool:
        return self._f.numer.is_ground and self._f.denom.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return from_qq(self._f.numer.LC if self._f.numer else QQ(0)) / from_qq(self._f.denom.LC)

    def is_polynomial(self) -> bool:
        return self._f.denom.is_ground

    def free_symbols(self) -> set[str]:
        used = set()
        for part in (self._f.numer, self._f.denom):
            for m in part.keys():
                used.update(self.registry.names[i] for i, e in enumerate(m) if e)
        return used

    def degree(self, v: str) -> int:
        return rf_degree(self, v)

    def diff(self, v: str) -> "RationalFunction":
        x = self.registry.field.gens[self.registry.index(v)]
        return RationalFunction(self.registry, self._f.diff(x))

    def substitute(self, bindings: Mapping[str, object], target: VariableRegistry | None = None) -> "RationalFunction":
        return rf_substitute(self, bindings, target)

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        """Exact value at a rational point; every free symbol must be bound."""
        missing = self.free_symbols() - set(values)
        if missing:
            raise ValueError(f"unbound symbols: {sorted(missing)}")
        pt = [Fraction(values.get(n, 0)) for n in self.registry.names]
        den = _eval_numeric(self._f.denom, pt)
        if den == 0:
            raise DegenerateSubstitution(f"denominator {self.den} vanishes at {dict(values)}")
        return _eval_numeric(self._f.numer, pt) / den

    def to_callable(self, order: Iterable[str]):
        """Compile to a float-valued Python function of the symbols in ``order``."""
        order = list(order)
        missing = self.free_symbols() - set(order)
        if missing:
            raise ValueError(f"symbols {sorted(missing)} not in argument list")
        src = f"lambda {', '.join(order) or '*_'}: ({_py_source(self.registry, self._f.numer)}) / ({_py_source(self.registry, self._f.denom)})"
        return eval(src, {"__builtins__": {}})

    def __str__(self):
        num = _format_poly(self.registry, self._f.numer)
        if self._f.denom == self.registry.ring.one:
            return num
        den = _format_poly(self.registry, self._f.denom)
        if len(self._f.numer) > 1:
            num = f"({num})"
        if len(self._f.denom) > 1 or not _is_plain_word(den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunction({self})"


def _is_plain_word(s: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z0-9_]+", s))


def _eval_numeric(p, pt: list[Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.terms():
        term = from_qq(c)
        for x, e in zip(pt, m):
            if e:
                term *= x**e
        total += term
    return total


def _py_source(registry: VariableRegistry, p) -> str:
    if not p:
        return "0.0"
    parts = []
    for m, c in p.terms():
        c = from_qq(c)
        factors = [repr(float(c))]
        factors += [registry.names[i] + (f"**{e}" if e > 1 else "") for i, e in enumerate(m) if e]
        parts.append("*".join(factors))
    return " + ".join(parts)


def rf_normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    _check(num, den)
    if not den:
        raise DivisionByZero("zero denominator")
    return RationalFunction(num.registry, num.registry.field.new(num._p, den._p))


def rf_degree(f: RationalFunction, v: str) -> int:
    i = f.registry.index(v)
    dn = f._f.numer.degree(i) if f._f.numer else 0
    dd = f._f.denom.degree(i)
    return max(dn, dd, 0)


def _eval_poly(ring, p, vals, denoms, degs):
    """Evaluate p at vals[i] = n_i/d_i; returns the numerator over prod d_i^deg_i(p)."""
    cache: dict[tuple[int, int, int], object] = {}

    def power(i, which, e):
        key = (i, which, e)
        r = cache.get(key)
        if r is None:
            base = vals[i][which]
            r = base**e
            cache[key] = r
        return r

    total = ring.zero
    for m, c in p.terms():
        term = ring.ground_new(c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, 0, e)
            if denoms[i]:
                k = degs[i] - e
                if k:
                    term = term * power(i, 1, k)
        total += term
    return total


def rf_substitute(f: RationalFunction, bindings: Mapping[str, object], target: VariableRegistry | None = None) -> RationalFunction:
    """Simultaneously replace symbols of ``f`` and express the result in ``target``.

    Unbound symbols keep their name and must exist in ``target``.
    """
    src = f.registry
    target = target or src
    for name in bindings:
        if name not in src:
            raise RegistryMismatch(f"bound symbol {name!r} not in {src!r}")
    ring = target.ring
    vals = []
    denoms = []
    for name in src.names:
        if name in bindings:
            v = bindings[name]
            v = v if isinstance(v, RationalFunction) and v.registry == target else target.coerce(v)
            vals.append((v._f.numer, v._f.denom))
            denoms.append(v._f.denom != ring.one)
        else:
            if name not in target:
                raise RegistryMismatch(f"unbound symbol {name!r} missing from target {target!r}")
            vals.append((ring.gens[target.index(name)], ring.one))
            denoms.append(False)
    numer, denom = f._f.numer, f._f.denom
    dn = [numer.degree(i) if numer else 0 for i in range(len(src))]
    dd = [denom.degree(i) for i in range(len(src))]
    top = _eval_poly(ring, numer, vals, denoms, dn) if numer else ring.zero
    bot = _eval_poly(ring, denom, vals, denoms, dd)
    for i, has in enumerate(denoms):
        if has:
            k = dd[i] - dn[i]
            if k > 0:
                top = top * vals[i][1] ** k
            elif k < 0:
                bot = bot * vals[i][1] ** (-k)
    if not bot:
        raise DegenerateSubstitution(f"denominator of {f} vanishes identically under the substitution")
    return RationalFunction(target, target.field.new(top, bot))
