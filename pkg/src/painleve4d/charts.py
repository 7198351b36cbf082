"""Affine charts of the 16 successive blow-ups for each case.

Each chart U_i comes from blowing up the centre C_i, given by two equations
in the coordinates of its parent (the base affine chart of (P^1)^4 or an
earlier U_j).  Transitions are stored both ways in parent coordinates and
composed down to the base coordinates q1, p1, q2, p2, so every chart also
knows its centre as a pair of rational functions on the base.

Parameters are the non-autonomous ones; :func:`chart` with
``autonomous=True`` applies the case preset.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import catalog
from .algebra import PHASE, RationalFunction, VariableRegistry
from .dsl import parse_expression
from .errors import UnknownKey, ValidationError

# index: (parent, coords, forward {new: expr in parent}, backward {old: expr in chart},
#         centre equations in parent coords, provenance)
_Row = tuple


def _step(parent, coords, u_old, v_old, v_new, shift):
    """The recurring refinement (u, v) -> (u, (v + shift)/u)."""
    u_new = next(c for c in coords if c.startswith("u"))
    return (
        parent,
        coords,
        {u_new: u_old, v_new: f"({v_old} + {shift})/{u_old}"},
        {u_old: u_new, v_old: f"{u_new}*{v_new} - ({shift})"},
        (u_old, f"{v_old} + {shift}"),
        (u_old, v_old, v_new, shift),
    )


def shift_row(row, delta: str):
    """The same refinement with the centre moved by ``delta`` (negative controls)."""
    if len(row) < 6:
        raise ValidationError("only refinement centres of the form u = v + s = 0 can be shifted")
    u_old, v_old, v_new, shift = row[5]
    return _step(row[0], row[1], u_old, v_old, v_new, f"{shift} + {delta}")


_A2A2: dict[int, _Row] = {
    1: (0, ("u1", "v1", "q2", "p2"), {"u1": "1/q1", "v1": "q1/p1"}, {"q1": "1/u1", "p1": "1/(u1*v1)"}, ("1/q1", "1/p1")),
    2: _step(1, ("u2", "v2", "q2", "p2"), "u1", "v1", "v2", "1"),
    3: _step(2, ("u3", "v3", "q2", "p2"), "u2", "v2", "v3", "b_1"),
    4: _step(3, ("u4", "v4", "q2", "p2"), "u3", "v3", "v4", "b_1^2 + a0_1"),
    5: (0, ("u5", "v5", "q2", "p2"), {"u5": "1/q1", "v5": "q1*p1"}, {"q1": "1/u5", "p1": "u5*v5"}, ("1/q1", "p1")),
    6: _step(5, ("u6", "v6", "q2", "p2"), "u5", "v5", "v6", "-a1_1"),
    7: (0, ("v7", "u7", "q2", "p2"), {"v7": "q1*p1", "u7": "1/p1"}, {"q1": "u7*v7", "p1": "1/u7"}, ("q1", "1/p1")),
    # printed with u7 in the numerator; v7 is the coordinate vanishing on C8
    8: _step(7, ("v8", "u8", "q2", "p2"), "u7", "v7", "v8", "a2_1"),
    9: (0, ("q1", "p1", "u9", "v9"), {"u9": "1/q2", "v9": "q2/p2"}, {"q2": "1/u9", "p2": "1/(u9*v9)"}, ("1/p2", "1/q2")),
    10: _step(9, ("q1", "p1", "u10", "v10"), "u9", "v9", "v10", "1"),
    11: _step(10, ("q1", "p1", "u11", "v11"), "u10", "v10", "v11", "b_2"),
    12: _step(11, ("q1", "p1", "u12", "v12"), "u11", "v11", "v12", "b_2^2 + a0_2"),
    13: (0, ("q1", "p1", "u13", "v13"), {"u13": "1/q2", "v13": "p2*q2"}, {"q2": "1/u13", "p2": "u13*v13"}, ("p2", "1/q2")),
    14: _step(13, ("q1", "p1", "u14", "v14"), "u13", "v13", "v14", "-a1_2"),
    15: (0, ("q1", "p1", "v15", "u15"), {"v15": "p2*q2", "u15": "1/p2"}, {"q2": "u15*v15", "p2": "1/u15"}, ("1/p2", "q2")),
    16: _step(15, ("q1", "p1", "v16", "u16"), "u15", "v15", "v16", "a2_2"),
}

_A5: dict[int, _Row] = {
    1: (0, ("q1", "v1", "u1", "p2"), {"v1": "q2/p1", "u1": "1/q2"}, {"q2": "1/u1", "p1": "1/(u1*v1)"}, ("1/q2", "1/p1")),
    2: _step(1, ("q1", "v2", "u2", "p2"), "u1", "v1", "v2", "1"),
    3: (2, ("q1", "v2", "u3", "v3"), {"u3": "u2", "v3": "(q1 + p2 - b1)/u2"}, {"u2": "u3", "p2": "u3*v3 - q1 + b1"}, ("u2", "q1 + p2 - b1")),
    4: _step(3, ("q1", "v2", "u4", "v4"), "u3", "v3", "v4", "a0"),
    5: (0, ("q1", "p1", "u5", "v5"), {"u5": "1/q2", "v5": "p2*q2"}, {"q2": "1/u5", "p2": "u5*v5"}, ("1/q2", "p2")),
    # printed with the parent's names (u5, v5) on the left
    6: _step(5, ("q1", "p1", "u6", "v6"), "u5", "v5", "v6", "a2"),
    7: (0, ("v7", "u7", "q2", "p2"), {"v7": "q1*p1", "u7": "1/p1"}, {"q1": "u7*v7", "p1": "1/u7"}, ("q1", "1/p1")),
    8: _step(7, ("v8", "u8", "q2", "p2"), "u7", "v7", "v8", "-a4"),
    9: (0, ("u9", "p1", "q2", "v9"), {"u9": "1/q1", "v9": "q1/p2"}, {"q1": "1/u9", "p2": "1/(u9*v9)"}, ("1/q1", "1/p2")),
    10: _step(9, ("u10", "p1", "q2", "v10"), "u9", "v9", "v10", "1"),
    11: (10, ("u11", "v11", "q2", "v10"), {"u11": "u10", "v11": "(q2 + p1 - b2)/u10"}, {"u10": "u11", "p1": "u11*v11 - q2 + b2"}, ("u10", "q2 + p1 - b2")),
    12: _step(11, ("u12", "v12", "q2", "v10"), "u11", "v11", "v12", "a3"),
    13: (0, ("u13", "v13", "q2", "p2"), {"u13": "1/q1", "v13": "q1*p1"}, {"q1": "1/u13", "p1": "u13*v13"}, ("1/q1", "p1")),
    # printed as (u13, p2, q2, ...); the refinement of v13 is meant
    14: _step(13, ("u14", "v14", "q2", "p2"), "u13", "v13", "v14", "a5"),
    15: (0, ("q1", "p1", "v15", "u15"), {"v15": "p2*q2", "u15": "1/p2"}, {"q2": "u15*v15", "p2": "1/u15"}, ("1/p2", "q2")),
    16: _step(15, ("q1", "p1", "v16", "u16"), "u15", "v15", "v16", "-a1"),
}

CHART_DATA = {"a2a2": _A2A2, "a5": _A5}
CHAINS = ((1, 2, 3, 4), (5, 6), (7, 8), (9, 10, 11, 12), (13, 14), (15, 16))


@dataclass(frozen=True, eq=False)
class Chart:
    case: str
    index: int
    parent: int  # 0 for the base chart
    coords: tuple[str, ...]
    exceptional: str  # coordinate whose zero set is E_index
    registry: VariableRegistry  # chart coords + parameters
    base: VariableRegistry  # q1..p2 + parameters
    forward: tuple[RationalFunction, ...]  # chart coords in base coords
    backward: tuple[RationalFunction, ...]  # q1, p1, q2, p2 in chart coords
    centre: tuple[RationalFunction, RationalFunction]  # on the base
    centre_local: tuple[RationalFunction, RationalFunction]  # in parent coords
    forward_local: tuple[RationalFunction, ...] = ()  # chart coords in parent coords

    def to_chart(self, point: dict) -> dict:
        b = dict(zip(PHASE, point)) if not isinstance(point, dict) else point
        return {c: e.substitute(b) for c, e in zip(self.coords, self.forward)}

    def round_trip(self) -> tuple[bool, bool]:
        """(backward o forward = id on the base, forward o backward = id on the chart)."""
        fb = dict(zip(self.coords, self.forward))
        ok1 = all(e.substitute(fb, self.base) == self.base.var(v) for v, e in zip(PHASE, self.backward))
        bb = dict(zip(PHASE, self.backward))
        ok2 = all(e.substitute(bb, self.registry) == self.registry.var(c) for c, e in zip(self.coords, self.forward))
        return ok1, ok2


def _params(case: str, autonomous: bool) -> tuple[str, ...]:
    return catalog.AUTO_PARAMS[case] if autonomous else catalog.NA_PARAMS[case]


def _reg(coords, params) -> VariableRegistry:
    return VariableRegistry(tuple(coords) + tuple(params), {c: "phase" for c in coords})


@lru_cache(maxsize=None)
def chart(case: str, index: int, autonomous: bool = False) -> Chart:
    return build_chart(case, index, autonomous)


def build_chart(case: str, index: int, autonomous: bool = False, data: dict | None = None) -> Chart:
    """Chart U_index from ``data`` (default: the built-in catalogue)."""
    if case not in CHART_DATA:
        raise UnknownKey(f"unknown case {case!r}")
    data = data or CHART_DATA[case]
    if index not in data:
        raise UnknownKey(f"no chart U{index} for {case}")
    parent, coords, fwd, bwd, centre = data[index][:5]
    params = _params(case, autonomous)
    na = _reg(PHASE, catalog.NA_PARAMS[case])
    pcoords = PHASE if parent == 0 else data[parent][1]
    preg_na = _reg(pcoords, catalog.NA_PARAMS[case])
    creg_na = _reg(coords, catalog.NA_PARAMS[case])
    creg = _reg(coords, params)
    base = _reg(PHASE, params)

    def spec_in(reg):
        return {k: parse_expression(v, reg) for k, v in catalog.PRESETS[case].items()}

    def local_to(expr_map, src_reg, names):
        return tuple(parse_expression(expr_map[n], src_reg) if n in expr_map else src_reg.var(n) for n in names)

    # forward in parent coordinates, backward to the parent's coordinates
    f_loc = local_to(fwd, preg_na, coords)
    b_loc = local_to(bwd, creg_na, pcoords)
    c_loc = tuple(parse_expression(e, preg_na) for e in centre)
    if parent == 0:
        f_base = tuple(e.substitute({}, na) for e in f_loc)
        b_base = b_loc
        c_base = c_loc
    else:
        par = chart(case, parent, False) if data is CHART_DATA[case] else build_chart(case, parent, False, data)
        pf = dict(zip(par.coords, par.forward))
        f_base = tuple(e.substitute(pf, na) for e in f_loc)
        bl = dict(zip(pcoords, b_loc))
        b_base = tuple(e.substitute(bl, creg_na) for e in par.backward)
        c_base = tuple(e.substitute(pf, na) for e in c_loc)
    if autonomous:
        preg = _reg(pcoords, params)
        f_base = tuple(e.substitute(spec_in(base), base) for e in f_base)
        b_base = tuple(e.substitute(spec_in(creg), creg) for e in b_base)
        c_base = tuple(e.substitute(spec_in(base), base) for e in c_base)
        c_loc = tuple(e.substitute(spec_in(preg), preg) for e in c_loc)
        f_loc = tuple(e.substitute(spec_in(preg), preg) for e in f_loc)
    exc = next(c for c in coords if c == f"u{index}")
    return Chart(case, index, parent, tuple(coords), exc, creg, base, f_base, b_base, c_base, c_loc, f_loc)


def charts(case: str, autonomous: bool = False) -> list[Chart]:
    return [chart(case, i, autonomous) for i in range(1, 17)]


def parent_coords(case: str, index: int) -> tuple[str, ...]:
    parent = CHART_DATA[case][index][0]
    return PHASE if parent == 0 else CHART_DATA[case][parent][1]


def chart_transfer(case: str, src: int | Chart, dst: int | Chart, f=None) -> tuple[RationalFunction, ...]:
    """f written in chart coordinates: dst-coordinates of f(point) as functions of src-coordinates.

    ``src``/``dst`` of 0 mean the base chart.  ``f`` defaults to the
    autonomous map of the case; charts are specialised to match its parameters.
    """
    from .maps import BirationalMap

    f = f if f is not None else catalog.get_map(case)
    autonomous = tuple(f.params) == catalog.AUTO_PARAMS[case]
    if not autonomous and tuple(f.params) != catalog.NA_PARAMS[case]:
        raise ValidationError(f"map {f.name!r} does not use the parameters of {case}")
    a = src if isinstance(src, Chart) or src == 0 else chart(case, src, autonomous)
    b = dst if isinstance(dst, Chart) or dst == 0 else chart(case, dst, autonomous)
    if a == 0:
        sreg = f.registry
        point = {v: sreg.var(v) for v in PHASE}
    else:
        sreg = a.registry
        point = dict(zip(PHASE, a.backward))
    bind = {v: e for v, e in point.items()}
    img = {v: e.substitute(bind, sreg) for v, e in zip(f.phase, f.images)}
    if b == 0:
        return tuple(img[v] for v in PHASE)
    return tuple(e.substitute(img, sreg) for e in b.forward)


def check_inclusion_structure(case: str, data: dict | None = None) -> tuple[bool, str]:
    """Each C_{k+1} of a chain lies in E_k: one of its equations is the exceptional coordinate u_k of U_k."""
    data = data or CHART_DATA[case]
    for chain in CHAINS:
        for k, k1 in zip(chain, chain[1:]):
            parent, coords, _, _, centre = data[k1][:5]
            if parent != k:
                return False, f"C{k1} is not blown up in U{k}"
            if f"u{k}" not in centre:
                return False, f"C{k1} is not contained in E{k}"
    return True, ""
