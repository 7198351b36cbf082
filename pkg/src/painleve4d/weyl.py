"""Affine Weyl group symmetries: root data, lattice actions and birational realisations.

Conventions.  Reflections act by ``w(D) = D + <D, a_check> a`` on divisor
classes.  With the intersection form of :mod:`lattice` the pairing
``<a_i, a_check_i>`` is -2, so the Cartan matrix with 2 on the diagonal is
the negated pairing matrix.

A generator's lattice matrix describes how it moves roots and parameters,
which is contravariant in the point map: for the point-map word
``g1 o g2 o ... o gk`` the lattice matrix is ``M_gk ... M_g2 M_g1``, and it
coincides with the pull-back of the composed map.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import catalog
from .lattice import (
    CASES,
    J,
    RANK,
    CurveClass,
    DivisorClass,
    LatticeAction,
    anticanonical_decomposition,
    builtin_action,
    C as curve,
    D as div,
    _int_matrix,
    identity_action,
    is_effective,
    matrix_from_rules,
    pairing,
)
from .errors import UnknownKey, ValidationError
from .maps import BirationalMap, compose, compose_word, identity_map, map_diff, map_equal

PRINTED_CARTAN = {
    "a2a2": [
        [2, -1, -1, 0, 0, 0], [-1, 2, -1, 0, 0, 0], [-1, -1, 2, 0, 0, 0],
        [0, 0, 0, 2, -1, -1], [0, 0, 0, -1, 2, -1], [0, 0, 0, -1, -1, 2],
    ],
    "a5": [[2 if i == j else (-1 if (i - j) % 6 in (1, 5) else 0) for j in range(6)] for i in range(6)],
}
ROOT_NAMES = {
    "a2a2": ("alpha0_1", "alpha1_1", "alpha2_1", "alpha0_2", "alpha1_2", "alpha2_2"),
    "a5": tuple(f"alpha{i}" for i in range(6)),
}
# parameter carried by each root, in the non-autonomous registries
ROOT_PARAMS = {
    "a2a2": ("a0_1", "a1_1", "a2_1", "a0_2", "a1_2", "a2_2"),
    "a5": ("a0", "a1", "a2", "a3", "a4", "a5"),
}

_ROOT_DATA = {
    ("a2a2", "a2a2"): (
        ["Hq1 + Hp1 - E1 - E2 - E3 - E4", "Hp1 - E5 - E6", "Hq1 - E7 - E8",
         "Hp2 + Hq2 - E9 - E10 - E11 - E12", "Hp2 - E13 - E14", "Hq2 - E15 - E16"],
        ["hq1 + hp1 - e1 - e2 - e3 - e4", "hq1 - e5 - e6", "hp1 - e7 - e8",
         "hq2 + hp2 - e9 - e10 - e11 - e12", "hq2 - e13 - e14", "hp2 - e15 - e16"],
    ),
    ("a5", "a5"): (
        ["Hq1 + Hp2 - E3 - E4 - E9 - E10", "Hq2 - E15 - E16", "Hp2 - E5 - E6",
         "Hp1 + Hq2 - E1 - E2 - E11 - E12", "Hq1 - E7 - E8", "Hp1 - E13 - E14"],
        ["hp1 + hq2 - e1 - e2 - e3 - e4", "hp2 - e15 - e16", "hq2 - e5 - e6",
         "hq1 + hp2 - e9 - e10 - e11 - e12", "hp1 - e7 - e8", "hq1 - e13 - e14"],
    ),
}


# Twin bases as printed; the derived twins below differ from these in
# alpha5 (first) and alpha2^(1), alpha2^(2) (second), which otherwise break the Cartan matrix.
TWIN_AS_PRINTED = {
    # A5-type basis placed on the A2+A2 variety
    ("a2a2", "a5"): (
        ["Hq2 + Hp2 - E3 - E4 - E9 - E10", "Hq1 - E15 - E16", "Hp2 - E5 - E6",
         "Hp1 + Hq1 - E1 - E2 - E11 - E12", "Hq2 - E7 - E8", "Hp2 - E13 - E14"],
        ["hp1 + hq1 - e1 - e2 - e3 - e4", "hp2 - e15 - e16", "hq1 - e5 - e6",
         "hq2 + hp2 - e9 - e10 - e11 - e12", "hp1 - e7 - e8", "hq2 - e13 - e14"],
    ),
    # A2+A2-type basis placed on the A5 variety
    ("a5", "a2a2"): (
        ["Hq2 + Hp1 - E1 - E2 - E3 - E4", "Hp1 - E5 - E6", "Hq1 - E7 - E8",
         "Hp2 + Hq1 - E9 - E10 - E11 - E12", "Hp2 - E13 - E14", "Hq2 - E15 - E16"],
        ["hq2 + hp1 - e1 - e2 - e3 - e4", "hq2 - e5 - e6", "hp1 - e7 - e8",
         "hq1 + hp2 - e9 - e10 - e11 - e12", "hq1 - e13 - e14", "hp2 - e15 - e16"],
    ),
}


def _swap_q(text: str) -> str:
    return text.replace("q1", "@").replace("q2", "q1").replace("@", "q2")


# the two decompositions differ by Hq1 <-> Hq2, so each twin basis is the
# other case's own basis with that exchange applied
for _v, _t in (("a2a2", "a5"), ("a5", "a2a2")):
    _r, _c = _ROOT_DATA[(_t, _t)]
    _ROOT_DATA[(_v, _t)] = ([_swap_q(x) for x in _r], [_swap_q(x) for x in _c])


@dataclass(frozen=True, eq=False)
class RootSystem:
    variety: str  # which blow-up (decomposition) the classes live on
    type: str  # Dynkin type of the basis: "a2a2" or "a5"
    names: tuple[str, ...]
    roots: tuple[DivisorClass, ...]
    coroots: tuple[CurveClass, ...]
    null_roots: tuple[DivisorClass, ...]
    null_coroots: tuple[CurveClass, ...]

    @property
    def null_root(self) -> DivisorClass:
        out = self.null_roots[0]
        for d in self.null_roots[1:]:
            out = out + d
        return out

    @property
    def null_coroot(self) -> CurveClass:
        out = self.null_coroots[0]
        for d in self.null_coroots[1:]:
            out = out + d
        return out

    def pairing_matrix(self) -> list[list[int]]:
        return [[pairing(a, c) for c in self.coroots] for a in self.roots]

    @property
    def cartan(self) -> list[list[int]]:
        return cartan_matrix(self)

    def index(self, name: str) -> int:
        name = name.split(".")[-1].replace("w_", "")
        return self.names.index(name)


def _components(type_: str) -> list[list[int]]:
    return [[0, 1, 2], [3, 4, 5]] if type_ == "a2a2" else [list(range(6))]


@lru_cache(maxsize=None)
def root_system(variety: str, type_: str | None = None) -> RootSystem:
    type_ = type_ or variety
    if (variety, type_) not in _ROOT_DATA:
        raise UnknownKey(f"no root basis of type {type_!r} on the {variety!r} variety")
    rt, co = _ROOT_DATA[(variety, type_)]
    roots = tuple(div(t) for t in rt)
    coroots = tuple(curve(t) for t in co)
    nulls, conulls = [], []
    for comp in _components(type_):
        d = roots[comp[0]]
        c = coroots[comp[0]]
        for k in comp[1:]:
            d = d + roots[k]
            c = c + coroots[k]
        nulls.append(d)
        conulls.append(c)
    return RootSystem(variety, type_, ROOT_NAMES[type_], roots, coroots, tuple(nulls), tuple(conulls))


def cartan_matrix(rs: RootSystem) -> list[list[int]]:
    """Negated pairing matrix, normalised to 2 on the diagonal."""
    return [[-x for x in row] for row in rs.pairing_matrix()]


def reflection_action(rs: RootSystem, i: int, x):
    a, ac = rs.roots[i], rs.coroots[i]
    if isinstance(x, DivisorClass):
        return x + pairing(x, ac) * a
    if isinstance(x, CurveClass):
        return x + pairing(a, x) * ac
    raise TypeError(f"cannot reflect {type(x).__name__}")


def reflection_lattice(rs: RootSystem, i: int) -> LatticeAction:
    a = rs.roots[i].v.reshape(-1, 1)
    ac = rs.coroots[i].v.reshape(-1, 1)
    I = np.identity(RANK, dtype=object)
    A = I + a.dot(J.dot(ac).T)
    B = I + ac.dot(a.T.dot(J))
    return LatticeAction(_int_matrix(A), _int_matrix(B), "pull_back", f"w_{rs.names[i]}")


def _swaps(*pairs: tuple[str, str]) -> dict[str, str]:
    out = {}
    for x, y in pairs:
        out[x] = y
        out[y] = x
    return out


SIGMA_RULES = {
    "a2a2.sigma01_1": {
        "Hp1": "Hq1 + Hp1 - E1 - E2", "E1": "Hq1 - E2", "E2": "Hq1 - E1",
        **_swaps(("E3", "E5"), ("E4", "E6")),
    },
    "a2a2.sigma01_2": {
        "Hp2": "Hp2 + Hq2 - E9 - E10", "E9": "Hq2 - E10", "E10": "Hq2 - E9",
        **_swaps(("E11", "E13"), ("E12", "E14")),
    },
    "a2a2.sigma12_1": _swaps(("Hq1", "Hp1"), ("E5", "E7"), ("E6", "E8")),
    "a2a2.sigma12_2": _swaps(("Hp2", "Hq2"), ("E13", "E15"), ("E14", "E16")),
    "a2a2.sigma_12": _swaps(("Hq1", "Hq2"), ("Hp1", "Hp2"), *((f"E{i}", f"E{i + 8}") for i in range(1, 9))),
    "a5.sigma01": {
        "Hq1": "Hp1 + Hq2 - E1 - E2", "Hq2": "Hq1 + Hp2 - E9 - E10",
        "E1": "Hp2 - E10", "E2": "Hp2 - E9", "E9": "Hp1 - E2", "E10": "Hp1 - E1",
        **_swaps(("Hp1", "Hp2"), ("E3", "E15"), ("E4", "E16"), ("E5", "E13"), ("E6", "E14"), ("E7", "E11"), ("E8", "E12")),
    },
    "a5.sigma12": _swaps(
        ("Hq1", "Hp1"), ("Hq2", "Hp2"), ("E1", "E9"), ("E2", "E10"), ("E3", "E11"),
        ("E4", "E12"), ("E5", "E15"), ("E6", "E16"), ("E7", "E13"), ("E8", "E14"),
    ),
}


def _full_key(case: str, key: str) -> str:
    if case not in CASES:
        raise UnknownKey(f"unknown case {case!r}")
    k = key if key.startswith(case + ".") else f"{case}.{key}"
    if k not in catalog.GENERATORS[case] and k != "a2a2.w_alpha2_2.literal":
        raise UnknownKey(f"unknown generator {key!r} for {case}; known: {', '.join(catalog.GENERATORS[case])}")
    return k


def generator_lattice(case: str, key: str) -> LatticeAction:
    k = _full_key(case, key)
    if ".w_" in k:
        rs = root_system(case)
        return reflection_lattice(rs, rs.index(k.removesuffix(".literal")))
    A = matrix_from_rules(SIGMA_RULES[k])
    return LatticeAction.from_divisor_matrix(A, "pull_back", k)


@dataclass(frozen=True, eq=False)
class WeylElement:
    case: str
    word: tuple[str, ...]  # point-map order: word[0] is applied last
    lattice_action: LatticeAction
    birational: BirationalMap

    def is_cremona_ab(self) -> bool:
        """Conditions (a) isometry and (b) the decomposition is permuted with multiplicities."""
        from .lattice import anticanonical_check
        from .errors import NotPermuted

        if not self.lattice_action.is_isometry():
            return False
        try:
            anticanonical_check(self.case, self.lattice_action)
        except NotPermuted:
            return False
        return True


def realize_generator(case: str, key: str) -> WeylElement:
    k = _full_key(case, key)
    return WeylElement(case, (k,), generator_lattice(case, k), catalog.get_map(k))


def lattice_of_word(case: str, word: Sequence[str]) -> LatticeAction:
    act = identity_action(direction="pull_back")
    for k in word:  # M_gk ... M_g1
        act = LatticeAction(generator_lattice(case, k).A.dot(act.A), generator_lattice(case, k).B.dot(act.B), "pull_back")
    return LatticeAction(_int_matrix(act.A), _int_matrix(act.B), "pull_back", ".".join(word))


def realize_word(case: str, word: Sequence[str]) -> WeylElement:
    word = tuple(_full_key(case, k) for k in word)
    if not word:
        return WeylElement(case, (), identity_action(direction="pull_back"), catalog.identity(case, False))
    return WeylElement(case, word, lattice_of_word(case, word), compose_word([catalog.get_map(k) for k in word]))


def root_images(action: LatticeAction, rs: RootSystem) -> list[DivisorClass]:
    return [action(a) for a in rs.roots]


def root_permutation(action: LatticeAction, rs: RootSystem) -> list[int] | None:
    """pi with action(alpha_i) = alpha_pi(i), or None if roots are not permuted."""
    out = []
    for img in root_images(action, rs):
        if img not in rs.roots:
            return None
        out.append(rs.roots.index(img))
    return out


@dataclass
class RelationResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class CoxeterReport:
    case: str
    results: list[RelationResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def first_failure(self) -> RelationResult | None:
        return next((r for r in self.results if not r.ok), None)


def _is_identity(m: BirationalMap) -> tuple[bool, str]:
    ident = identity_map(m.registry, m.phase)
    if map_equal(m, ident):
        return True, ""
    return False, "; ".join(map_diff(m, ident))


def _lattice_identity(a: LatticeAction) -> bool:
    return bool((a.A == np.identity(RANK, dtype=object)).all())


def check_relation(case: str, word: Sequence[str], name: str | None = None) -> RelationResult:
    el = realize_word(case, word)
    ok_b, diff = _is_identity(el.birational)
    ok_l = _lattice_identity(el.lattice_action)
    detail = diff if not ok_b else ("" if ok_l else "lattice action is not the identity")
    return RelationResult(name or " ".join(word), ok_b and ok_l, detail)


def check_coxeter_relations(case: str, reflections: Sequence[str] | None = None) -> CoxeterReport:
    rep = CoxeterReport(case)
    refl = list(reflections or catalog.REFLECTIONS[case])
    rs = root_system(case)
    cart = cartan_matrix(rs)
    for k in refl:
        rep.results.append(check_relation(case, [k, k], f"{k}^2 = id"))
    for a, b in itertools.combinations(refl, 2):
        i, j = rs.index(a.removesuffix(".literal")), rs.index(b.removesuffix(".literal"))
        m = {-1: 3, 0: 2}[cart[i][j]]
        rep.results.append(check_relation(case, [a, b] * m, f"({a} {b})^{m} = id"))
    sigmas = [k for k in catalog.GENERATORS[case] if ".sigma" in k]
    for s in sigmas:
        rep.results.append(check_relation(case, [s, s], f"{s}^2 = id"))
        pi = root_permutation(generator_lattice(case, s), rs)
        if pi is None:
            rep.results.append(RelationResult(f"{s} permutes the roots", False, "lattice image of a root is not a root"))
            continue
        for i, k in enumerate(catalog.REFLECTIONS[case]):
            target = catalog.REFLECTIONS[case][pi[i]]
            lhs = realize_word(case, [s, k, s])
            rhs = realize_generator(case, target)
            ok = map_equal(lhs.birational, rhs.birational) and lhs.lattice_action == rhs.lattice_action
            detail = "" if ok else "; ".join(map_diff(lhs.birational, rhs.birational)) or "lattice actions differ"
            rep.results.append(RelationResult(f"{s} {k} {s} = {target}", ok, detail))
    return rep


def w22_variants() -> dict[str, dict[str, bool]]:
    """Involutivity and Coxeter relations for both readings of the w_alpha2^(2) parameter line."""
    out = {}
    for key in ("a2a2.w_alpha2_2", "a2a2.w_alpha2_2.literal"):
        refl = [k for k in catalog.REFLECTIONS["a2a2"] if k != "a2a2.w_alpha2_2"] + [key]
        rep = check_coxeter_relations_subset("a2a2", refl, key)
        out[key] = rep
    return out


def check_coxeter_relations_subset(case: str, refl: Sequence[str], focus: str) -> dict[str, bool]:
    rs = root_system(case)
    cart = cartan_matrix(rs)
    res = {"involution": check_relation(case, [focus, focus]).ok}
    fi = rs.index(focus.removesuffix(".literal"))
    for other in refl:
        if other == focus:
            continue
        j = rs.index(other)
        m = {-1: 3, 0: 2}[cart[fi][j]]
        res[f"({focus.split('.')[1]} {other.split('.')[1]})^{m}"] = check_relation(case, [focus, other] * m).ok
    return res


@dataclass
class PhiDecompositionResult:
    ok: bool
    birational_ok: bool
    lattice_ok: bool
    diff: list[str]


def check_phi_decomposition(case: str, word: Sequence[str] | None = None) -> PhiDecompositionResult:
    word = tuple(word if word is not None else catalog.PHI_WORDS[case])
    el = realize_word(case, word)
    na = catalog.get_map(f"{case}.na")
    b_ok = map_equal(el.birational, na)
    diff = [] if b_ok else map_diff(el.birational, na)
    rs = root_system(case)
    pb = builtin_action(case).pull_back()
    want = root_images(pb, rs)
    got = root_images(el.lattice_action, rs)
    l_ok = want == got
    if not l_ok:
        diff += [f"root {n}: word gives {g}, mapping gives {w}" for n, g, w in zip(rs.names, got, want) if g != w]
    return PhiDecompositionResult(b_ok and l_ok, b_ok, l_ok, diff)


TRANSLATION_POWER = {"a2a2": 2, "a5": 4}
# expected multiples of the null root(s) added to each root by the translation
EXPECTED_SHIFTS = {
    "a2a2": [(0, 0), (-1, 0), (1, 0), (0, 0), (0, -1), (0, 1)],
    "a5": [(0,), (1,), (-1,), (0,), (1,), (-1,)],
}


@dataclass
class TranslationResult:
    ok: bool
    is_translation: bool
    shifts: list[tuple[int, ...]] | None
    images: list[str]


def translation_shifts(action: LatticeAction, rs: RootSystem) -> list[tuple[int, ...]] | None:
    """Per-root multiples of the null roots if ``action`` translates every root, else None."""
    out = []
    N = np.array([d.v for d in rs.null_roots], dtype=object).T.astype(float)
    for a in rs.roots:
        diff = (action(a) - a).v.astype(float)
        coef, *_ = np.linalg.lstsq(N, diff, rcond=None)
        k = tuple(int(round(c)) for c in coef)
        recon = sum((ki * d for ki, d in zip(k, rs.null_roots)), DivisorClass([0] * RANK))
        if recon != action(a) - a:
            return None
        out.append(k)
    return out


def check_translation(case: str, n: int | None = None) -> TranslationResult:
    n = TRANSLATION_POWER[case] if n is None else n
    rs = root_system(case)
    act = builtin_action(case).pull_back().power(n)
    shifts = translation_shifts(act, rs)
    images = [str(act(a)) for a in rs.roots]
    expected = EXPECTED_SHIFTS[case] if n == TRANSLATION_POWER[case] else None
    ok = shifts is not None and (expected is None or shifts == expected)
    return TranslationResult(ok, shifts is not None, shifts, images)


@dataclass
class TwinReport:
    variety: str
    twin_type: str
    cartan_ok: bool
    isometries_ok: bool
    decomposition_fixed: bool
    non_effective: list[tuple[str, str, str]]  # (reflection, basis class, image)
    printed_cartan: list[list[int]] = field(default_factory=list)

    @property
    def printed_cartan_ok(self) -> bool:
        return self.printed_cartan == PRINTED_CARTAN[self.twin_type]

    @property
    def ok(self) -> bool:
        return self.cartan_ok and self.isometries_ok and self.decomposition_fixed and bool(self.non_effective)


def reflection_images_not_effective(rs: RootSystem, case: str) -> list[tuple[str, str, str]]:
    from .lattice import BASIS

    out = []
    for i, name in enumerate(rs.names):
        for b in BASIS:
            x = DivisorClass.unit(b)
            img = reflection_action(rs, i, x)
            if img != x and not is_effective(img, case):
                out.append((f"w_{name}", b, str(img)))
    return out


def twin_root_check(case: str) -> TwinReport:
    """The root basis of the other type placed on ``case``'s variety."""
    other = "a5" if case == "a2a2" else "a2a2"
    rs = root_system(case, other)
    cartan_ok = cartan_matrix(rs) == PRINTED_CARTAN[other]
    iso = all(reflection_lattice(rs, i).is_isometry() for i in range(6))
    dec = anticanonical_decomposition(case)
    fixed = all(reflection_action(rs, i, d) == d for i in range(6) for d in dec.classes)
    rt, co = TWIN_AS_PRINTED[(case, other)]
    printed = [[-pairing(div(a), curve(c)) for c in co] for a in rt]
    return TwinReport(case, other, cartan_ok, iso, fixed, reflection_images_not_effective(rs, case), printed)


def random_words(case: str, count: int, max_len: int, seed: int) -> list[tuple[str, ...]]:
    rng = random.Random(seed)
    gens = catalog.GENERATORS[case]
    return [tuple(rng.choice(gens) for _ in range(rng.randint(1, max_len))) for _ in range(count)]


def param_action_matrix(m: BirationalMap, params: Sequence[str]) -> list[list[int]]:
    """Linear part of the parameter update restricted to ``params`` (rows: images)."""
    reg = m.registry
    out = []
    for p in params:
        e = m.param_update[p]
        row = []
        for q in params:
            row.append(int(e.diff(q).constant_value()))
        out.append(row)
    return out
