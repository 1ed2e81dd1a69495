"""Pure-Python reference kernels.

These mirror the compiled versions in ``_kernels.pyx`` one for one and are
used whenever the extension is not built (or ``MULTIFREY_PURE=1`` is set).
Polynomials are lists of ints, constant term first.
"""

from __future__ import annotations

from typing import Sequence

ZERO_LOG = -1


def charsum_log(coeffs: Sequence[int], zech: Sequence[int], order: int) -> int:
    """Sum of the quadratic character of f(x) over all x in F_Q, Q = order + 1.

    ``coeffs`` are discrete logs of the coefficients of f, leading term first,
    with ``ZERO_LOG`` for zero.  ``zech[n]`` is log(1 + g^n).
    """
    # x = 0 contributes chi(constant term)
    c0 = coeffs[-1]
    total = 0 if c0 == ZERO_LOG else (1 if c0 % 2 == 0 else -1)
    ncoef = len(coeffs)
    lead = coeffs[0]
    for xl in range(order):
        acc = lead
        for j in range(1, ncoef):
            if acc != ZERO_LOG:
                acc += xl
                if acc >= order:
                    acc -= order
            c = coeffs[j]
            if c == ZERO_LOG:
                continue
            if acc == ZERO_LOG:
                acc = c
                continue
            d = c - acc
            if d < 0:
                d += order
            z = zech[d]
            if z == ZERO_LOG:
                acc = ZERO_LOG
            else:
                acc += z
                if acc >= order:
                    acc -= order
        if acc != ZERO_LOG:
            total += 1 if acc % 2 == 0 else -1
    return total


def charsum_prime(coeffs: Sequence[int], p: int, chi: Sequence[int]) -> int:
    """Same as :func:`charsum_log` over the prime field F_p.

    ``coeffs`` are residues, leading term first; ``chi`` is the Legendre table.
    """
    total = 0
    for x in range(p):
        acc = 0
        for c in coeffs:
            acc = (acc * x + c) % p
        total += chi[acc]
    return total


def resultant_modp(f: Sequence[int], g: Sequence[int], p: int) -> int:
    """Res(f, g) mod p via the Euclidean algorithm."""
    a = [c % p for c in f]
    b = [c % p for c in g]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    if not a or not b:
        return 0
    res = 1
    while True:
        da = len(a) - 1
        db = len(b) - 1
        if db == 0:
            return res * pow(b[0], da, p) % p
        if da < db:
            if (da * db) % 2 == 1:
                res = -res
            a, b = b, a
            continue
        # a <- a mod b
        inv = pow(b[-1], p - 2, p)
        r = a[:]
        for i in range(da - db, -1, -1):
            coef = r[i + db] * inv % p
            if coef:
                for j in range(db + 1):
                    r[i + j] = (r[i + j] - coef * b[j]) % p
        while r and r[-1] == 0:
            r.pop()
        if not r:
            return 0
        dr = len(r) - 1
        # Res(a, b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r)
        if (da * db) % 2 == 1:
            res = -res
        res = res * pow(b[-1], da - dr, p) % p
        a, b = b, r


def charpoly_modp(mat: Sequence[int], n: int, p: int) -> list[int]:
    """Characteristic polynomial of an n x n matrix mod p (row-major input).

    Hessenberg reduction followed by the standard recurrence; output is
    constant term first and monic.
    """
    h = [[mat[i * n + j] % p for j in range(n)] for i in range(n)]
    for m in range(1, n - 1):
        piv = -1
        for i in range(m, n):
            if h[i][m - 1]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != m:
            h[piv], h[m] = h[m], h[piv]
            for row in h:
                row[piv], row[m] = row[m], row[piv]
        inv = pow(h[m][m - 1], p - 2, p)
        for i in range(m + 1, n):
            u = h[i][m - 1] * inv % p
            if not u:
                continue
            hi = h[i]
            hm = h[m]
            for j in range(n):
                hi[j] = (hi[j] - u * hm[j]) % p
            for row in h:
                row[m] = (row[m] + u * row[i]) % p
    # polys[k] is the charpoly of the leading k x k block
    polys: list[list[int]] = [[1]]
    for k in range(1, n + 1):
        cur = [0] + polys[k - 1]
        hk = h[k - 1][k - 1]
        for i, c in enumerate(polys[k - 1]):
            cur[i] = (cur[i] - hk * c) % p
        t = 1
        for i in range(1, k):
            t = t * h[k - i][k - i - 1] % p
            coef = t * h[k - i - 1][k - 1] % p
            if coef:
                for j, c in enumerate(polys[k - i - 1]):
                    cur[j] = (cur[j] - coef * c) % p
        polys.append(cur)
    return polys[n]
