"""Dense exact matrices as lists of rows.

Entries may be ``int``, ``Fraction`` or ``RationalFunction``; anything with
exact ``+ - * /`` and comparison against 0 works.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SingularMatrix

Matrix = list[list]


def identity(n: int, one=1, zero=0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def shape(M: Sequence[Sequence]) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def _zero_like(M):
    for row in M:
        for x in row:
            return x - x
    return 0


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} * {k2}x{m}")
    z = _zero_like(A)
    out = []
    for i in range(n):
        row = A[i]
        new = []
        for j in range(m):
            acc = z
            for t in range(k):
                a = row[t]
                if a != 0:
                    b = B[t][j]
                    if b != 0:
                        acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def _one_like(M):
    z = _zero_like(M)
    return z + 1


def mat_pow(A: Matrix, n: int) -> Matrix:
    if n < 0:
        return mat_pow(inverse(A), -n)
    size = len(A)
    result = identity(size, _one_like(A), _zero_like(A))
    base = A
    while n:
        if n & 1:
            result = mat_mul(result, base)
        n >>= 1
        if n:
            base = mat_mul(base, base)
    return result


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact division in fraction-free elimination")
        return q
    return a / b


def det(M: Matrix):
    """Fraction-free (Bareiss) determinant with row pivoting."""
    n, m = shape(M)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = _one_like(A)
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return _zero_like(A)
        piv = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = _exact_div(piv * A[i][j] - A[i][k] * A[k][j], prev)
        prev = piv
    d = A[n - 1][n - 1]
    return d if sign == 1 else -d


def det_cofactor(M: Matrix):
    """Laplace expansion along the first row; exponential, for cross-checks only."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = _zero_like(M)
    for j in range(n):
        if M[0][j] != 0:
            minor = [row[:j] + row[j + 1 :] for row in M[1:]]
            term = M[0][j] * det_cofactor(minor)
            total = total + term if j % 2 == 0 else total - term
    return total


def _lift_field(M: Matrix) -> Matrix:
    return [[Fraction(x) if isinstance(x, int) else x for x in row] for row in M]


def inverse(M: Matrix) -> Matrix:
    """Gauss-Jordan inverse; integer input gives Fractions (or ints when integral)."""
    n, m = shape(M)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    all_int = all(isinstance(x, int) for row in M for x in row)
    A = _lift_field(M)
    one = _one_like(A)
    zero = _zero_like(A)
    aug = [row + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    inv = [row[n:] for row in aug]
    if all_int and all(x.denominator == 1 for row in inv for x in row):
        inv = [[int(x) for x in row] for row in inv]
    return inv


def rank(M: Matrix) -> int:
    A = _lift_field(M)
    n, m = shape(A)
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        for i in range(r + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / piv
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == n:
            break
    return r


def charpoly(M: Matrix) -> list[Fraction]:
    """Coefficients of det(x I - M), highest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    A = _lift_field(M)
    coeffs = [Fraction(1)]
    Mk = identity(n, Fraction(1), Fraction(0))
    c = Fraction(1)
    for k in range(1, n + 1):
        AM = mat_mul(A, Mk)
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


def matrix_ops(M: Matrix, op: str, other: Matrix | int | None = None):
    if op == "mul":
        return mat_mul(M, other)
    if op == "det":
        return det(M)
    if op == "pow":
        return mat_pow(M, other)
    if op == "inverse":
        return inverse(M)
    raise ValueError(f"unknown matrix op {op!r}")
