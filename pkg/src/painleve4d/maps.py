"""Birational maps of a 4-dimensional phase space with affine parameter dynamics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import PHASE, RationalFunction, VariableRegistry
from .errors import ConstantImage, DegenerateSubstitution, RegistryMismatch, ValidationError


@dataclass(frozen=True, eq=False)
class BirationalMap:
    """Images of the phase variables plus an affine update of the parameters.

    ``param_update`` always lists every parameter; unchanged ones map to
    themselves.  Use :func:`make_map` to build validated instances.
    """

    name: str
    registry: VariableRegistry
    phase: tuple[str, ...]
    images: tuple[RationalFunction, ...]
    param_update: Mapping[str, RationalFunction] = field(default_factory=dict)
    inverse_hint: "BirationalMap | None" = None

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(n for n in self.registry.names if n not in self.phase)

    def image(self, var: str) -> RationalFunction:
        return self.images[self.phase.index(var)]

    def bindings(self) -> dict[str, RationalFunction]:
        out = dict(zip(self.phase, self.images))
        out.update(self.param_update)
        return out

    def changed_params(self) -> dict[str, RationalFunction]:
        return {p: e for p, e in self.param_update.items() if e != self.registry.var(p)}

    def with_name(self, name: str) -> "BirationalMap":
        return BirationalMap(name, self.registry, self.phase, self.images, self.param_update, self.inverse_hint)

    def with_inverse(self, inv: "BirationalMap") -> "BirationalMap":
        return make_map(self.name, self.registry, dict(zip(self.phase, self.images)), self.changed_params(), inverse_hint=inv, phase=self.phase)

    def __str__(self):
        from .dsl import format_map

        return format_map(self)


def _validate_affine(registry: VariableRegistry, phase: Sequence[str], name: str, expr: RationalFunction):
    if not expr.is_polynomial() or expr.num.total_degree() > 1 or expr.free_symbols() & set(phase):
        raise ValidationError(f"parameter update for {name!r} is not affine in the parameters: {expr}")


def make_map(
    name: str,
    registry: VariableRegistry,
    images: Mapping[str, RationalFunction],
    param_update: Mapping[str, RationalFunction] | None = None,
    inverse_hint: BirationalMap | None = None,
    phase: Sequence[str] = PHASE,
    check_inverse: bool = True,
) -> BirationalMap:
    phase = tuple(phase)
    if len(phase) != 4:
        raise ValidationError("maps must act on exactly four phase variables")
    for v in phase:
        if v not in registry:
            raise RegistryMismatch(f"phase variable {v!r} not in {registry!r}")
    params = [n for n in registry.names if n not in phase]
    imgs = []
    for v in phase:
        e = registry.coerce(images[v]) if v in images else registry.var(v)
        if e.is_constant():
            raise ConstantImage(f"image of {v} is the constant {e}")
        imgs.append(e)
    upd: dict[str, RationalFunction] = {}
    for p in params:
        e = registry.coerce(param_update[p]) if param_update and p in param_update else registry.var(p)
        _validate_affine(registry, phase, p, e)
        upd[p] = e
    for k in (param_update or {}):
        if k not in params:
            raise ValidationError(f"{k!r} is not a parameter of {registry!r}")
    m = BirationalMap(name, registry, phase, tuple(imgs), upd, None)
    if inverse_hint is not None:
        if check_inverse and not map_equal(compose(m, inverse_hint), identity_map(registry, phase)):
            raise ValidationError(f"inverse hint of {name!r} does not invert it")
        m = BirationalMap(name, registry, phase, tuple(imgs), upd, inverse_hint)
    return m


def identity_map(registry: VariableRegistry, phase: Sequence[str] = PHASE) -> BirationalMap:
    return make_map("id", registry, {}, phase=phase)


def _same_space(f: BirationalMap, g: BirationalMap):
    if f.registry != g.registry or f.phase != g.phase:
        raise RegistryMismatch(f"maps {f.name!r} and {g.name!r} live on different spaces")


def compose(f: BirationalMap, g: BirationalMap, name: str | None = None) -> BirationalMap:
    """f after g."""
    _same_space(f, g)
    b = g.bindings()
    try:
        imgs = tuple(e.substitute(b) for e in f.images)
    except DegenerateSubstitution as exc:
        raise DegenerateSubstitution(f"composing {f.name} after {g.name}: {exc}") from None
    for v, e in zip(f.phase, imgs):
        if e.is_constant():
            raise DegenerateSubstitution(f"composition collapses the image of {v} to {e}")
    pb = {p: g.param_update[p] for p in g.params}
    upd = {p: e.substitute(pb) for p, e in f.param_update.items()}
    return BirationalMap(name or f"{f.name}*{g.name}", f.registry, f.phase, imgs, upd, None)


def compose_word(maps: Sequence[BirationalMap], name: str | None = None) -> BirationalMap:
    """maps[0] after maps[1] after ... after maps[-1]."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out.with_name(name or "*".join(m.name for m in maps))


def map_equal(f: BirationalMap, g: BirationalMap) -> bool:
    _same_space(f, g)
    if any(a != b for a, b in zip(f.images, g.images)):
        return False
    return all(f.param_update[p] == g.param_update[p] for p in f.params)


def map_diff(f: BirationalMap, g: BirationalMap) -> list[str]:
    """Human-readable list of components where f and g differ."""
    _same_space(f, g)
    out = []
    for v, a, b in zip(f.phase, f.images, g.images):
        if a != b:
            out.append(f"{v}': {a}  !=  {b}")
    for p in f.params:
        if f.param_update[p] != g.param_update[p]:
            out.append(f"param {p}': {f.param_update[p]}  !=  {g.param_update[p]}")
    return out


def iterate(
    f: BirationalMap,
    n: int,
    point: Sequence | None = None,
    params: Mapping[str, object] | None = None,
    target: VariableRegistry | None = None,
) -> tuple[RationalFunction, ...]:
    """Exact n-fold image of ``point`` (default: the symbolic generic point).

    ``params`` gives initial parameter values; parameters left unbound stay
    symbolic and evolve by ``param_update``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if target is None:
        target = next((x.registry for x in (point or ()) if isinstance(x, RationalFunction)), f.registry)
    if point is None:
        xs = [target.var(v) for v in f.phase]
    else:
        if len(point) != 4:
            raise ValueError("point must have four coordinates")
        xs = [target.coerce(x) for x in point]
    ps = {p: target.coerce(params[p]) if params and p in params else target.var(p) for p in f.params}
    for step in range(1, n + 1):
        b = dict(zip(f.phase, xs))
        b.update(ps)
        try:
            xs = [e.substitute(b, target) for e in f.images]
            ps = {p: e.substitute(b, target) for p, e in f.param_update.items()}
        except DegenerateSubstitution as exc:
            raise DegenerateSubstitution(str(exc), step=step) from None
    return tuple(xs)


def specialize(f: BirationalMap, values: Mapping[str, object], target: VariableRegistry, name: str | None = None) -> BirationalMap:
    """Restrict to a parameter subfamily that ``f`` preserves (e.g. an autonomous preset)."""
    b = {p: target.coerce(v) for p, v in values.items()}
    imgs = {v: e.substitute(b, target) for v, e in zip(f.phase, f.images)}
    for p, e in f.param_update.items():
        if p in b and e.substitute(b, target) != b[p]:
            raise ValidationError(f"parameter subfamily not preserved by {f.name}: {p}' = {e}")
    return make_map(name or f.name, target, imgs, phase=f.phase)


def inverse_of(f: BirationalMap) -> BirationalMap:
    if f.inverse_hint is None:
        raise ValidationError(f"no inverse recorded for {f.name!r}")
    return f.inverse_hint


def symbolic_degree_tables(f: BirationalMap, n_max: int) -> list[list[list[int]]]:
    """tables[n-1][i][j]: degree of the i-th coordinate of f^n in the j-th initial variable."""
    if n_max < 1:
        raise ValueError("n_max must be a positive integer")
    reg = f.registry
    pt = tuple(reg.var(v) for v in f.phase)
    out = []
    for _ in range(n_max):
        pt = iterate(f, 1, pt)
        out.append([[e.degree(v) for v in f.phase] for e in pt])
    return out
