"""Built-in maps: the two autonomous mappings, their non-autonomous versions
and every affine Weyl group generator, stored as DSL text."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import VariableRegistry
from .dsl import parse_map
from .errors import UnknownKey
from .maps import BirationalMap, identity_map, map_equal, compose

CASES = ("a2a2", "a5")
PHASE = ("q1", "p1", "q2", "p2")
NA_PARAMS = {
    "a2a2": ("a0_1", "a1_1", "a2_1", "a0_2", "a1_2", "a2_2", "b_1", "b_2"),
    "a5": ("a0", "a1", "a2", "a3", "a4", "a5", "b1", "b2"),
}
AUTO_PARAMS = {"a2a2": ("a", "b"), "a5": ("a", "b1", "b2")}

# autonomous specialisations of the non-autonomous parameters
PRESETS = {
    "a2a2": {"a0_1": "0", "a1_1": "a", "a2_1": "-a", "a0_2": "0", "a1_2": "a", "a2_2": "-a", "b_1": "b", "b_2": "b"},
    "a5": {"a0": "0", "a3": "0", "a1": "a", "a4": "a", "a2": "-a", "a5": "-a", "b1": "b1", "b2": "b2"},
}


def _hdr(name, case):
    return f"map {name} {{\n  vars: q1, p1, q2, p2;\n  params: {', '.join(NA_PARAMS[case])};\n"


_SOURCES: dict[str, tuple[str, str]] = {}


def _add(key, provenance, src):
    _SOURCES[key] = (provenance, src)


_add("a2a2", "first mapping, autonomous form", """
map a2a2 {
  vars: q1, p1, q2, p2;
  params: a, b;
  q1' = -p2 - q2 + a/q2 + b;
  p1' = q2;
  q2' = -q1 - p1 + a/q1 + b;
  p2' = q1;
}
""")
_add("a2a2.inverse", "back-substitution inverse of the first mapping", """
map a2a2.inverse {
  vars: q1, p1, q2, p2;
  params: a, b;
  q1' = p2;
  p1' = -q2 - p2 + a/p2 + b;
  q2' = p1;
  p2' = -q1 - p1 + a/p1 + b;
}
""")
_add("a5", "second mapping, autonomous form", """
map a5 {
  vars: q1, p1, q2, p2;
  params: a, b1, b2;
  q1' = -q1 - p2 + a/q2 + b1;
  p1' = q2;
  q2' = -q2 - p1 + a/q1 + b2;
  p2' = q1;
}
""")
_add("a5.inverse", "back-substitution inverse of the second mapping", """
map a5.inverse {
  vars: q1, p1, q2, p2;
  params: a, b1, b2;
  q1' = p2;
  p1' = -q2 - p1 + a/p2 + b2;
  q2' = p1;
  p2' = -q1 - p2 + a/p1 + b1;
}
""")

_add("a2a2.na", "non-autonomous first mapping (translation of the A2+A2 group)", _hdr("a2a2.na", "a2a2") + """
  q1' = -p2 - q2 + b_2 - a2_2/q2;
  p1' = q2;
  q2' = -q1 - p1 + b_1 - a2_1/q1;
  p2' = q1;
  param a0_1' = a1_2 + a2_2;
  param a1_1' = -a2_2;
  param a2_1' = a0_2 + a2_2;
  param a0_2' = a1_1 + a2_1;
  param a1_2' = -a2_1;
  param a2_2' = a0_1 + a2_1;
  param b_1' = b_2;
  param b_2' = b_1;
}
""")
_add("a5.na", "non-autonomous second mapping (translation of the A5 group)", _hdr("a5.na", "a5") + """
  q1' = -q1 - p2 + b1 + a1/q2;
  p1' = q2;
  q2' = -q2 - p1 + b2 + a4/q1;
  p2' = q1;
  param a0' = a1 + a2;
  param a1' = a3 + a4;
  param a2' = -a4;
  param a3' = a4 + a5;
  param a4' = a0 + a1;
  param a5' = -a1;
}
""")

for _j, (_q, _p, _o) in ((1, ("q1", "p1", "1")), (2, ("q2", "p2", "2"))):
    _a0, _a1, _a2, _b = f"a0_{_j}", f"a1_{_j}", f"a2_{_j}", f"b_{_j}"
    _add(f"a2a2.w_alpha0_{_j}", f"A2+A2 reflection w_alpha0^({_j})", _hdr(f"a2a2.w_alpha0_{_j}", "a2a2") + f"""
  {_q}' = ({_q}^2 + {_q}*{_p} - {_b}*{_q} - {_a0})/({_q} + {_p} - {_b});
  {_p}' = ({_p}^2 + {_q}*{_p} - {_b}*{_p} + {_a0})/({_q} + {_p} - {_b});
  param {_a0}' = -{_a0};
  param {_a1}' = {_a0} + {_a1};
  param {_a2}' = {_a0} + {_a2};
}}
""")
    _add(f"a2a2.w_alpha1_{_j}", f"A2+A2 reflection w_alpha1^({_j})", _hdr(f"a2a2.w_alpha1_{_j}", "a2a2") + f"""
  {_q}' = {_q} - {_a1}/{_p};
  param {_a0}' = {_a0} + {_a1};
  param {_a1}' = -{_a1};
  param {_a2}' = {_a1} + {_a2};
}}
""")
    _add(f"a2a2.w_alpha2_{_j}", f"A2+A2 reflection w_alpha2^({_j})", _hdr(f"a2a2.w_alpha2_{_j}", "a2a2") + f"""
  {_p}' = {_p} + {_a2}/{_q};
  param {_a0}' = {_a0} + {_a2};
  param {_a1}' = {_a1} + {_a2};
  param {_a2}' = -{_a2};
}}
""")
    _add(f"a2a2.sigma01_{_j}", f"A2+A2 diagram automorphism sigma01^({_j})", _hdr(f"a2a2.sigma01_{_j}", "a2a2") + f"""
  {_p}' = -{_q} - {_p} + {_b};
  param {_a0}' = -{_a1};
  param {_a1}' = -{_a0};
  param {_a2}' = -{_a2};
}}
""")
    _add(f"a2a2.sigma12_{_j}", f"A2+A2 diagram automorphism sigma12^({_j})", _hdr(f"a2a2.sigma12_{_j}", "a2a2") + f"""
  {_q}' = {_p};
  {_p}' = {_q};
  param {_a0}' = -{_a0};
  param {_a1}' = -{_a2};
  param {_a2}' = -{_a1};
}}
""")

_add("a2a2.w_alpha2_2.literal", "w_alpha2^(2) with the printed a0^(2) line (a0^(2) -> a2^(1) + a2^(2))", _hdr("a2a2.w_alpha2_2.literal", "a2a2") + """
  p2' = p2 + a2_2/q2;
  param a0_2' = a2_1 + a2_2;
  param a1_2' = a1_2 + a2_2;
  param a2_2' = -a2_2;
}
""")
_add("a2a2.sigma_12", "A2+A2 automorphism exchanging the two components", _hdr("a2a2.sigma_12", "a2a2") + """
  q1' = q2;
  p1' = p2;
  q2' = q1;
  p2' = p1;
  param a0_1' = a0_2;
  param a1_1' = a1_2;
  param a2_1' = a2_2;
  param a0_2' = a0_1;
  param a1_2' = a1_1;
  param a2_2' = a2_1;
  param b_1' = b_2;
  param b_2' = b_1;
}
""")

_add("a5.w_alpha0", "A5 reflection w_alpha0", _hdr("a5.w_alpha0", "a5") + """
  p1' = ((q1 + p2 - b1)*p1 - a0)/(q1 + p2 - b1);
  q2' = ((q1 + p2 - b1)*q2 + a0)/(q1 + p2 - b1);
  param a5' = a0 + a5;
  param a0' = -a0;
  param a1' = a0 + a1;
}
""")
_add("a5.w_alpha1", "A5 reflection w_alpha1", _hdr("a5.w_alpha1", "a5") + """
  p2' = p2 - a1/q2;
  param a0' = a0 + a1;
  param a1' = -a1;
  param a2' = a1 + a2;
}
""")
_add("a5.w_alpha2", "A5 reflection w_alpha2", _hdr("a5.w_alpha2", "a5") + """
  q2' = q2 + a2/p2;
  param a1' = a1 + a2;
  param a2' = -a2;
  param a3' = a2 + a3;
}
""")
_add("a5.w_alpha3", "A5 reflection w_alpha3", _hdr("a5.w_alpha3", "a5") + """
  q1' = ((q2 + p1 - b2)*q1 + a3)/(q2 + p1 - b2);
  p2' = ((q2 + p1 - b2)*p2 - a3)/(q2 + p1 - b2);
  param a2' = a2 + a3;
  param a3' = -a3;
  param a4' = a3 + a4;
}
""")
_add("a5.w_alpha4", "A5 reflection w_alpha4", _hdr("a5.w_alpha4", "a5") + """
  p1' = p1 - a4/q1;
  param a3' = a3 + a4;
  param a4' = -a4;
  param a5' = a4 + a5;
}
""")
_add("a5.w_alpha5", "A5 reflection w_alpha5", _hdr("a5.w_alpha5", "a5") + """
  q1' = q1 + a5/p1;
  param a4' = a4 + a5;
  param a5' = -a5;
  param a0' = a0 + a5;
}
""")
_add("a5.sigma01", "A5 diagram automorphism sigma01", _hdr("a5.sigma01", "a5") + """
  q1' = -q2 - p1 + b2;
  p1' = p2;
  q2' = -q1 - p2 + b1;
  p2' = p1;
  param a0' = -a1;
  param a1' = -a0;
  param a2' = -a5;
  param a5' = -a2;
  param a3' = -a4;
  param a4' = -a3;
  param b1' = b2;
  param b2' = b1;
}
""")
_add("a5.sigma12", "A5 diagram automorphism sigma12", _hdr("a5.sigma12", "a5") + """
  q1' = p1;
  p1' = q1;
  q2' = p2;
  p2' = q2;
  param a0' = -a3;
  param a3' = -a0;
  param a1' = -a2;
  param a2' = -a1;
  param a4' = -a5;
  param a5' = -a4;
  param b1' = b2;
  param b2' = b1;
}
""")

GENERATORS = {
    "a2a2": tuple(f"a2a2.w_alpha{i}_{j}" for j in (1, 2) for i in range(3))
    + ("a2a2.sigma01_1", "a2a2.sigma12_1", "a2a2.sigma01_2", "a2a2.sigma12_2", "a2a2.sigma_12"),
    "a5": tuple(f"a5.w_alpha{i}" for i in range(6)) + ("a5.sigma01", "a5.sigma12"),
}
REFLECTIONS = {case: tuple(k for k in GENERATORS[case] if ".w_" in k) for case in CASES}

# point-map words (leftmost applied last) reproducing the non-autonomous maps
PHI_WORDS = {
    "a2a2": ("a2a2.sigma_12", "a2a2.w_alpha1_2", "a2a2.sigma12_2", "a2a2.sigma01_2",
             "a2a2.w_alpha1_1", "a2a2.sigma12_1", "a2a2.sigma01_1"),
    "a5": ("a5.w_alpha5", "a5.w_alpha2", "a5.sigma01", "a5.sigma12"),
}


@dataclass(frozen=True)
class MapRegistryEntry:
    key: str
    map: BirationalMap
    provenance: str


def keys() -> tuple[str, ...]:
    return tuple(_SOURCES)


def source(key: str) -> str:
    try:
        return _SOURCES[key][1].lstrip("\n")
    except KeyError:
        raise UnknownKey(f"unknown map key {key!r}; known: {', '.join(_SOURCES)}") from None


@lru_cache(maxsize=None)
def get_map(key: str) -> BirationalMap:
    m = parse_map(source(key))
    inv_key = key + ".inverse"
    if inv_key in _SOURCES:
        m = m.with_inverse(get_map(inv_key))
    return m


def entry(key: str) -> MapRegistryEntry:
    return MapRegistryEntry(key, get_map(key), _SOURCES[key][0])


def entries() -> list[MapRegistryEntry]:
    return [entry(k) for k in _SOURCES]


@lru_cache(maxsize=None)
def registry(case: str, autonomous: bool = True) -> VariableRegistry:
    if case not in CASES:
        raise UnknownKey(f"unknown case {case!r}")
    return get_map(case if autonomous else f"{case}.na").registry


def preset(case: str) -> dict:
    """Autonomous specialisation as bindings into the autonomous registry."""
    from .dsl import parse_expression

    reg = registry(case, True)
    return {k: parse_expression(v, reg) for k, v in PRESETS[case].items()}


def identity(case: str, autonomous: bool = True) -> BirationalMap:
    return identity_map(registry(case, autonomous))


def is_involution(m: BirationalMap) -> bool:
    return map_equal(compose(m, m), identity_map(m.registry, m.phase))
