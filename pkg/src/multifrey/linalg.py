"""Dense exact linear algebra over Q on lists of lists.

Matrices are row-major lists of Fractions (or ints).  Column vectors are
plain lists.  Sizes stay below ~100 here, so schoolbook elimination is fine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(A: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in A]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    n = len(B[0]) if B else 0
    Bt = list(zip(*B)) if B else []
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        out.append([sum((a * Bt[j][k] for k, a in nz), Fraction(0)) for j in range(n)])
    return out


def matvec(A: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in A]


def add(A: Matrix, B: Matrix, scale: Fraction | int = 1) -> Matrix:
    return [[a + scale * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scalar_shift(A: Matrix, c) -> Matrix:
    """A - c I."""
    return [[x - (c if i == j else 0) for j, x in enumerate(row)] for i, row in enumerate(A)]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)] if A else []


def rref(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:r], pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1])


def kernel(A: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : A v = 0} as a list of column vectors."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    R, piv = rref(A) if A else ([], [])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def column_space(A: Matrix) -> list[list[Fraction]]:
    """Basis of the column space (columns of A at pivot positions)."""
    if not A:
        return []
    _, piv = rref(A)
    return [[A[i][c] for i in range(len(A))] for c in piv]


def columns_to_matrix(cols: list[list[Fraction]]) -> Matrix:
    return transpose(cols)


def solve_in_span(basis_cols: list[list[Fraction]], v: Sequence) -> list[Fraction]:
    """Coordinates c with sum c_i basis_i = v; raises if v is outside the span."""
    k = len(basis_cols)
    n = len(v)
    aug = [[basis_cols[j][i] for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    R, piv = rref(aug)
    if k in piv:
        raise ValueError("vector is not in the span")
    c = [Fraction(0)] * k
    for row, pc in zip(R, piv):
        c[pc] = row[k]
    return c


def restrict(A: Matrix, basis_cols: list[list[Fraction]]) -> Matrix:
    """Matrix of A on an invariant subspace, in the given basis."""
    images = [matvec(A, b) for b in basis_cols]
    coords = _solve_many(basis_cols, images)
    return transpose(coords)


def _solve_many(basis_cols: list[list[Fraction]], vs: list[list[Fraction]]) -> list[list[Fraction]]:
    k = len(basis_cols)
    n = len(basis_cols[0]) if basis_cols else 0
    m = len(vs)
    aug = [[basis_cols[j][i] for j in range(k)] + [vs[t][i] for t in range(m)] for i in range(n)]
    R, piv = rref(aug)
    if any(p >= k for p in piv):
        raise ValueError("subspace is not invariant")
    out = []
    for t in range(m):
        c = [Fraction(0)] * k
        for row, pc in zip(R, piv):
            c[pc] = row[k + t]
        out.append(c)
    return out


def poly_eval_matrix(coeffs: Sequence, A: Matrix) -> Matrix:
    """f(A) for f given constant term first (Horner)."""
    n = len(A)
    R = zeros(n, n)
    for c in reversed(list(coeffs)):
        R = matmul(R, A)
        for i in range(n):
            R[i][i] += Fraction(c)
    return R
