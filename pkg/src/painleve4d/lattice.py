"""Divisor and curve classes of the 16-point blow-up of (P^1)^4.

Basis order is (Hq1, Hp1, Hq2, Hp2, E1..E16) for divisors and the dual
(hq1, hp1, hq2, hp2, e1..e16) for curves, with <H_i, h_j> = delta_ij,
<E_i, e_j> = -delta_ij and everything else 0.  Matrices act on column
vectors, so column k of A is the image of basis vector k.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

from . import matrices
from .errors import NotPermuted, NotUnimodular, UnknownKey, ValidationError

H_NAMES = ("Hq1", "Hp1", "Hq2", "Hp2")
E_NAMES = tuple(f"E{i}" for i in range(1, 17))
BASIS = H_NAMES + E_NAMES
CURVE_BASIS = tuple(n.lower() for n in BASIS)
RANK = 20
PHASE_OF_H = {"q1": 0, "p1": 1, "q2": 2, "p2": 3}
CASES = ("a2a2", "a5")


def intersection_form(n_h: int = 4, n_e: int = 16) -> np.ndarray:
    return np.diag([1] * n_h + [-1] * n_e).astype(object)


J = intersection_form()
_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z]+\d*)")


def _as_int_array(v, n=RANK) -> np.ndarray:
    arr = np.array([int(x) for x in v], dtype=object)
    if arr.shape != (n,):
        raise ValueError(f"expected a length-{n} integer vector")
    return arr


class _LatticeVector:
    basis: tuple[str, ...] = ()
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = _as_int_array(v, len(self.basis))

    @classmethod
    def parse(cls, text: str):
        """Parse sums like ``Hq2 + 2Hp2 - E9 - E10`` (``0`` is the zero class)."""
        v = [0] * len(cls.basis)
        text = text.strip()
        if text == "0":
            return cls(v)
        pos = 0
        while pos < len(text):
            m = _TERM.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse class {text!r} at {pos}")
            sign, coef, name = m.groups()
            if name not in cls.basis:
                raise ValueError(f"unknown basis element {name!r}")
            c = int(coef) if coef else 1
            v[cls.basis.index(name)] += -c if sign == "-" else c
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        return cls(v)

    @classmethod
    def unit(cls, name: str):
        v = [0] * len(cls.basis)
        v[cls.basis.index(name)] = 1
        return cls(v)

    def __add__(self, other):
        self._same(other)
        return type(self)(self.v + other.v)

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.v - other.v)

    def __neg__(self):
        return type(self)(-self.v)

    def __mul__(self, k: int):
        return type(self)(self.v * int(k))

    __rmul__ = __mul__

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __eq__(self, other):
        return type(other) is type(self) and all(int(a) == int(b) for a, b in zip(self.v, other.v))

    def __hash__(self):
        return hash((type(self).__name__, tuple(int(x) for x in self.v)))

    def __getitem__(self, name: str) -> int:
        return int(self.v[self.basis.index(name)])

    def is_zero(self) -> bool:
        return not any(self.v)

    def tolist(self) -> list[int]:
        return [int(x) for x in self.v]

    def __str__(self):
        parts = []
        for name, c in zip(self.basis, self.v):
            c = int(c)
            if c:
                mag = "" if abs(c) == 1 else str(abs(c))
                parts.append(("-" if c < 0 else "+") + mag + name)
        if not parts:
            return "0"
        s = " ".join(p[0] + " " + p[1:] for p in parts)
        return s[2:] if s.startswith("+") else "-" + s[2:]

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class DivisorClass(_LatticeVector):
    basis = BASIS
    __slots__ = ()


class CurveClass(_LatticeVector):
    basis = CURVE_BASIS
    __slots__ = ()


def D(text: str) -> DivisorClass:
    return DivisorClass.parse(text)


def C(text: str) -> CurveClass:
    return CurveClass.parse(text)


def E_sum(*idx: int) -> DivisorClass:
    v = [0] * RANK
    for i in idx:
        v[3 + i] += 1
    return DivisorClass(v)


def e_sum(*idx: int) -> CurveClass:
    v = [0] * RANK
    for i in idx:
        v[3 + i] += 1
    return CurveClass(v)


def pairing(Dc: DivisorClass, c: CurveClass) -> int:
    return int(Dc.v.dot(J.dot(c.v)))


def divisor_dot_divisor(a: DivisorClass, b: DivisorClass) -> int:
    """<a, b~> where b~ is the curve class with the same coordinates."""
    return int(a.v.dot(J.dot(b.v)))


def to_curve(Dc: DivisorClass) -> CurveClass:
    return CurveClass(Dc.v)


def _int_matrix(M) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in M], dtype=object)


def _det(A: np.ndarray) -> int:
    return int(matrices.det([[int(x) for x in row] for row in A]))


def int_inverse(A: np.ndarray) -> np.ndarray:
    inv = matrices.inverse([[int(x) for x in row] for row in A])
    if not all(isinstance(x, int) for row in inv for x in row):
        raise NotUnimodular("matrix has no integer inverse")
    return _int_matrix(inv)


def dual_action(A, Jm: np.ndarray | None = None) -> np.ndarray:
    """B = J (A^-1)^T J: the induced action on curve classes."""
    A = _int_matrix(A)
    n = A.shape[0]
    Jm = J if Jm is None else _int_matrix(Jm)
    if Jm.shape != (n, n):
        raise ValueError("intersection form has the wrong size")
    if _det(A) not in (1, -1):
        raise NotUnimodular(f"det A = {_det(A)}")
    return Jm.dot(int_inverse(A).T).dot(Jm)


@dataclass(frozen=True, eq=False)
class LatticeAction:
    A: np.ndarray
    B: np.ndarray
    direction: str = "push_forward"
    name: str = ""

    def __post_init__(self):
        if self.direction not in ("push_forward", "pull_back"):
            raise ValueError(f"bad direction {self.direction!r}")

    @classmethod
    def from_divisor_matrix(cls, A, direction="push_forward", name="") -> "LatticeAction":
        A = _int_matrix(A)
        return cls(A, dual_action(A), direction, name)

    def is_isometry(self, Jm: np.ndarray | None = None) -> bool:
        Jm = J if Jm is None else Jm
        return bool((self.A.T.dot(Jm).dot(self.B) == Jm).all())

    def det(self) -> int:
        return _det(self.A)

    def __call__(self, x):
        if isinstance(x, DivisorClass):
            return DivisorClass(self.A.dot(x.v))
        if isinstance(x, CurveClass):
            return CurveClass(self.B.dot(x.v))
        raise TypeError(f"cannot act on {type(x).__name__}")

    def inverse(self) -> "LatticeAction":
        return LatticeAction(int_inverse(self.A), int_inverse(self.B), self.direction, self.name + "^-1")

    def pull_back(self) -> "LatticeAction":
        if self.direction == "pull_back":
            return self
        inv = self.inverse()
        return LatticeAction(inv.A, inv.B, "pull_back", self.name)

    def push_forward(self) -> "LatticeAction":
        if self.direction == "push_forward":
            return self
        inv = self.inverse()
        return LatticeAction(inv.A, inv.B, "push_forward", self.name)

    def then(self, other: "LatticeAction") -> "LatticeAction":
        """Apply self first, then other (matrix product other * self)."""
        return LatticeAction(other.A.dot(self.A), other.B.dot(self.B), self.direction, f"{other.name}.{self.name}")

    def power(self, n: int) -> "LatticeAction":
        base = self if n >= 0 else self.inverse()
        A = np.identity(self.A.shape[0], dtype=object)
        B = np.identity(self.A.shape[0], dtype=object)
        for _ in range(abs(n)):
            A = base.A.dot(A)
            B = base.B.dot(B)
        return LatticeAction(_int_matrix(A), _int_matrix(B), self.direction, f"{self.name}^{n}")

    def __eq__(self, other):
        return isinstance(other, LatticeAction) and bool((self.A == other.A).all() and (self.B == other.B).all())

    def __hash__(self):
        return hash(tuple(int(x) for x in self.A.flat))

    def table(self) -> list[tuple[str, str]]:
        return [(BASIS[k], str(DivisorClass(self.A[:, k]))) for k in range(self.A.shape[0])]


def matrix_from_rules(rules: dict[str, str], basis: Sequence[str] = BASIS, parse=D) -> np.ndarray:
    """Columns from ``basis name -> image`` rules; unlisted basis vectors are fixed."""
    n = len(basis)
    A = np.identity(n, dtype=object)
    for k, img in rules.items():
        if k not in basis:
            raise ValueError(f"unknown basis element {k!r}")
        A[:, basis.index(k)] = parse(img).v
    return A


# push-forward tables of the two mappings
PUSH_FORWARD_RULES = {
    "a2a2": {
        "Hq1": "Hp2", "Hp1": "Hq2 + 2Hp2 - E9 - E10 - E13 - E14", "Hq2": "Hp1", "Hp2": "Hq1 + 2Hp1 - E1 - E2 - E5 - E6",
        "E1": "Hp2 - E10", "E2": "Hp2 - E9", "E3": "E15", "E4": "E16",
        "E5": "E11", "E6": "E12", "E7": "Hp2 - E14", "E8": "Hp2 - E13",
        "E9": "Hp1 - E2", "E10": "Hp1 - E1", "E11": "E7", "E12": "E8",
        "E13": "E3", "E14": "E4", "E15": "Hp1 - E6", "E16": "Hp1 - E5",
    },
    "a5": {
        "Hq1": "Hp2", "Hp1": "Hp1 + Hq2 + Hp2 - E1 - E2 - E5 - E6", "Hq2": "Hp1", "Hp2": "Hq1 + Hp1 + Hp2 - E9 - E10 - E13 - E14",
        "E1": "Hp1 - E2", "E2": "Hp1 - E1", "E3": "E7", "E4": "E8",
        "E5": "E3", "E6": "E4", "E7": "Hp2 - E6", "E8": "Hp2 - E5",
        "E9": "Hp2 - E10", "E10": "Hp2 - E9", "E11": "E15", "E12": "E16",
        "E13": "E11", "E14": "E12", "E15": "Hp1 - E14", "E16": "Hp1 - E13",
    },
}


def _check_case(case: str):
    if case not in CASES:
        raise UnknownKey(f"unknown case {case!r}; expected one of {CASES}")


def builtin_action(case: str) -> LatticeAction:
    """Push-forward of the autonomous mapping (also valid for its deautonomisation)."""
    if case == "identity":
        return identity_action()
    _check_case(case)
    return LatticeAction.from_divisor_matrix(matrix_from_rules(PUSH_FORWARD_RULES[case]), "push_forward", case)


def identity_action(n: int = RANK, direction: str = "push_forward") -> LatticeAction:
    I = np.identity(n, dtype=object)
    return LatticeAction(I, I.copy(), direction, "id")


def _h_index(x) -> int:
    if isinstance(x, int):
        if not 0 <= x < 4:
            raise ValueError("H index must be 0..3")
        return x
    name = x[1:] if x.startswith("H") else x
    try:
        return PHASE_OF_H[name]
    except KeyError:
        raise ValueError(f"unknown coordinate {x!r}") from None


def pull_back_power(action: LatticeAction, n: int) -> np.ndarray:
    P = action.pull_back().A
    M = np.identity(P.shape[0], dtype=object)
    for _ in range(n):
        M = P.dot(M)
    return M


def degree_predict(action: LatticeAction, n: int, source, target) -> int:
    """Degree in x_source of the target coordinate of the n-th iterate.

    This is the coefficient of H_source in (phi^*)^n (H_target).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    M = pull_back_power(action, n)
    return int(M[_h_index(source), _h_index(target)])


def degree_table(action: LatticeAction, n: int) -> list[list[int]]:
    """table[i][j] = degree of the i-th image coordinate of phi^n in x_j (order q1, p1, q2, p2)."""
    M = pull_back_power(action, n)
    return [[int(M[j, i]) for j in range(4)] for i in range(4)]


def degree_sequence(action: LatticeAction, n_max: int, source, target) -> list[int]:
    P = action.pull_back().A
    M = np.identity(P.shape[0], dtype=object)
    s, t = _h_index(source), _h_index(target)
    out = []
    for _ in range(n_max):
        M = P.dot(M)
        out.append(int(M[s, t]))
    return out


@dataclass
class JordanSignature:
    charpoly: list[int]
    factors: list[tuple[int, int]]  # (cyclotomic index d, multiplicity)
    blocks: dict[int, list[int]]  # d -> Jordan block sizes for each root of Phi_d
    all_cyclotomic: bool
    spectral_radius_one: bool

    @property
    def unipotent_blocks(self) -> list[int]:
        return self.blocks.get(1, [])

    def block_count(self) -> int:
        return sum(len(sizes) * sympy.totient(d) for d, sizes in self.blocks.items())

    def nontrivial_blocks(self) -> dict[int, list[int]]:
        return {d: [s for s in sizes if s > 1] for d, sizes in self.blocks.items() if any(s > 1 for s in sizes)}

    def single_3x3_at_one(self) -> bool:
        """Exactly one non-trivial block for eigenvalue 1, and it is 3x3."""
        return [s for s in self.unipotent_blocks if s > 1] == [3]

    def only_nontrivial_is_3x3_at_one(self) -> bool:
        return self.nontrivial_blocks() == {1: [3]}

    def describe(self) -> str:
        x = sympy.Symbol("x")
        fac = " * ".join(f"({sympy.cyclotomic_poly(d, x)})^{m}" for d, m in self.factors)
        parts = []
        for d, sizes in sorted(self.blocks.items()):
            parts.append(f"Phi_{d}: blocks {sorted(sizes, reverse=True)} per root")
        return f"charpoly = {fac}; " + "; ".join(parts) + f"; spectral radius 1: {self.spectral_radius_one}"


def _nullity(M: np.ndarray) -> int:
    return M.shape[0] - matrices.rank([[int(x) for x in row] for row in M])


def jordan_signature(action: LatticeAction) -> JordanSignature:
    """Characteristic polynomial over Q and Jordan block sizes via exact rank tests."""
    A = action.A
    n = A.shape[0]
    cp = [int(c) for c in matrices.charpoly([[int(x) for x in row] for row in A])]
    x = sympy.Symbol("x")
    poly = sympy.Poly(cp, x)
    _, flist = poly.factor_list()
    factors = []
    ok = True
    for f, m in flist:
        d = _cyclotomic_index(f, x)
        if d is None:
            ok = False
            continue
        factors.append((d, m))
    factors.sort()
    blocks: dict[int, list[int]] = {}
    I = np.identity(n, dtype=object)
    for d, m in factors:
        phi = sympy.Poly(sympy.cyclotomic_poly(d, x), x).all_coeffs()
        PA = np.zeros((n, n), dtype=object)
        for c in phi:
            PA = PA.dot(A) + int(c) * I
        deg = len(phi) - 1
        nulls = [0]
        Pk = I
        while nulls[-1] < deg * m:
            Pk = Pk.dot(PA)
            nulls.append(_nullity(Pk))
        ge = [(nulls[k] - nulls[k - 1]) // deg for k in range(1, len(nulls))]
        sizes = []
        for k in range(len(ge)):
            nxt = ge[k + 1] if k + 1 < len(ge) else 0
            sizes += [k + 1] * (ge[k] - nxt)
        blocks[d] = sizes
    # every root of a cyclotomic factor lies on the unit circle
    return JordanSignature(cp, factors, blocks, ok, ok)


def _cyclotomic_index(f: sympy.Poly, x) -> int | None:
    if not f.is_cyclotomic:
        return None
    deg = f.degree()
    for d in range(1, 6 * deg * deg + 3):
        if sympy.totient(d) == deg and sympy.expand(sympy.cyclotomic_poly(d, x) - f.monic().as_expr()) == 0:
            return d
    return None


# anticanonical decomposition
_D_A2A2 = [
    ("E1 - E2", 3), ("E2 - E3", 2), ("E3 - E4", 1), ("Hq1 - E1 - E5", 2), ("E5 - E6", 1),
    ("Hp1 - E1 - E7", 2), ("E7 - E8", 1), ("E9 - E10", 3), ("E10 - E11", 2), ("E11 - E12", 1),
    ("Hq2 - E9 - E13", 2), ("E13 - E14", 1), ("Hp2 - E9 - E15", 2), ("E15 - E16", 1),
]


@dataclass(frozen=True)
class AnticanonicalDecomposition:
    case: str
    components: tuple[tuple[DivisorClass, int], ...]

    def total(self) -> DivisorClass:
        out = DivisorClass([0] * RANK)
        for d, m in self.components:
            out = out + m * d
        return out

    @property
    def classes(self) -> list[DivisorClass]:
        return [d for d, _ in self.components]


def _swap_q(text: str) -> str:
    return text.replace("Hq1", "@").replace("Hq2", "Hq1").replace("@", "Hq2")


def anticanonical_decomposition(case: str) -> AnticanonicalDecomposition:
    _check_case(case)
    rows = _D_A2A2 if case == "a2a2" else [(_swap_q(t), m) for t, m in _D_A2A2]
    dec = AnticanonicalDecomposition(case, tuple((D(t), m) for t, m in rows))
    if dec.total() != anticanonical_class():
        raise ValidationError(f"decomposition for {case} does not sum to -K")
    return dec


def anticanonical_class() -> DivisorClass:
    return DivisorClass([2] * 4 + [-1] * 16)


def anticanonical_check(case: str, action: LatticeAction) -> list[int]:
    """1-based permutation sigma with action(D_i) = D_sigma(i), multiplicities respected."""
    dec = anticanonical_decomposition(case)
    classes = dec.classes
    perm = []
    for i, (d, m) in enumerate(dec.components, start=1):
        img = action(d)
        try:
            j = classes.index(img)
        except ValueError:
            raise NotPermuted(i, img) from None
        if dec.components[j][1] != m:
            raise NotPermuted(i, img)
        perm.append(j + 1)
    if sorted(perm) != list(range(1, len(classes) + 1)):
        raise NotPermuted(perm.index(next(p for p in perm if perm.count(p) > 1)) + 1, "repeated image")
    return perm


@dataclass(frozen=True)
class CanonicalData:
    K: DivisorClass
    forms: tuple[DivisorClass, DivisorClass]

    @property
    def consistent(self) -> bool:
        return self.forms[0] + self.forms[1] == self.K


def canonical_class(case: str) -> CanonicalData:
    """K_X and the classes of the two symplectic 2-forms dq1^dp1 and dq2^dp2."""
    _check_case(case)
    K = -anticanonical_class()
    if case == "a2a2":
        f1 = D("-2Hq1 - 2Hp1") + E_sum(*range(1, 9))
        f2 = D("-2Hq2 - 2Hp2") + E_sum(*range(9, 17))
    else:
        f1 = D("-2Hq1 - 2Hp1") + E_sum(1, 2, 7, 8, 11, 12, 13, 14)
        f2 = D("-2Hq2 - 2Hp2") + E_sum(9, 10, 15, 16, 3, 4, 5, 6)
    return CanonicalData(K, (f1, f2))


# small fixtures: the standard Cremona transformation of P^3 blown up at 4 points
CREMONA_BASIS = ("H", "E0", "E1", "E2", "E3")
CREMONA_CURVE_BASIS = ("h", "e0", "e1", "e2", "e3")


class _CremonaDivisor(_LatticeVector):
    basis = CREMONA_BASIS
    __slots__ = ()


class _CremonaCurve(_LatticeVector):
    basis = CREMONA_CURVE_BASIS
    __slots__ = ()


def cremona_action() -> LatticeAction:
    rules = {"H": "3H - 2E0 - 2E1 - 2E2 - 2E3"}
    for i in range(4):
        rules[f"E{i}"] = "H - " + " - ".join(f"E{j}" for j in range(4) if j != i)
    A = matrix_from_rules(rules, CREMONA_BASIS, _CremonaDivisor.parse)
    Jc = intersection_form(1, 4)
    return LatticeAction(A, dual_action(A, Jc), "push_forward", "cremona")


def cremona_curve_rules() -> dict[str, str]:
    act = cremona_action()
    return {CREMONA_CURVE_BASIS[k]: str(_CremonaCurve(act.B[:, k])) for k in range(5)}


# effectiveness: a fixed catalogue of generators, membership in their semigroup
def effective_generators(case: str) -> list[DivisorClass]:
    _check_case(case)
    gens: list[DivisorClass] = []
    chains = [(1, 2, 3, 4), (5, 6), (7, 8), (9, 10, 11, 12), (13, 14), (15, 16)]
    for ch in chains:
        for a, b in zip(ch, ch[1:]):
            gens.append(E_sum(a) - E_sum(b))
        gens.append(E_sum(ch[-1]))
    gens += anticanonical_decomposition(case).classes
    gens += [DivisorClass.unit(h) for h in H_NAMES]
    # strict transforms of the coordinate hyperplanes x = 0, x = infinity
    for h, centres in _HYPERPLANE_CENTRES[case].items():
        for cs in centres:
            gens.append(DivisorClass.unit(h) - E_sum(*cs))
    # images of the irreducible chain ends under the case's own (realised) reflections
    from .weyl import reflection_action, root_system

    rs = root_system(case)
    for i in range(len(rs.roots)):
        for k in (4, 6, 8, 12, 14, 16):
            img = reflection_action(rs, i, E_sum(k))
            if img != E_sum(k):
                gens.append(img)
    out = []
    for g in gens:
        if g not in out:
            out.append(g)
    return out


# first-level centres contained in {x = 0} and {x = infinity}, per hyperplane
_HYPERPLANE_CENTRES = {
    "a2a2": {
        "Hq1": [(7,), (1, 5)], "Hp1": [(5,), (1, 7)],
        "Hq2": [(15,), (9, 13)], "Hp2": [(13,), (9, 15)],
    },
    "a5": {
        "Hq1": [(7,), (9, 13)], "Hp1": [(13,), (1, 7)],
        "Hq2": [(15,), (1, 5)], "Hp2": [(5,), (9, 15)],
    },
}


def is_effective(x: DivisorClass, case: str, generators: Sequence[DivisorClass] | None = None) -> bool:
    """Membership in the semigroup spanned by the effective catalogue (integer program)."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    gens = list(generators) if generators is not None else effective_generators(case)
    if x.is_zero():
        return True
    G = np.array([[int(c) for c in g.v] for g in gens], dtype=float).T
    target = np.array([int(c) for c in x.v], dtype=float)
    res = milp(
        c=np.ones(len(gens)),
        constraints=[LinearConstraint(G, target, target)],
        integrality=np.ones(len(gens)),
        bounds=Bounds(0, 64),
    )
    return bool(res.status == 0)
