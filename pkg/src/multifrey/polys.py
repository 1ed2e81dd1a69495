"""Dense univariate polynomial helpers over Z, Q and F_p.

Polynomials are tuples or lists of coefficients, constant term first.
Exact resultants and characteristic polynomials are assembled by CRT from
word-size primes using the kernels in :mod:`multifrey.kernels`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import prevprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_factor_sqf, gf_sqf_p

from . import kernels

Poly = Sequence[int]

_PRIME_START = 2**31 - 1


def trim(a: Sequence) -> list:
    out = list(a)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(a: Sequence) -> int:
    return len(trim(a)) - 1


def padd(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def psub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def pmul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def prem_monic(a: Sequence, f: Sequence) -> list:
    """Remainder of ``a`` modulo the monic polynomial ``f`` (any coefficient ring)."""
    r = list(a)
    n = len(f) - 1
    for i in range(len(r) - 1, n - 1, -1):
        c = r[i]
        if c:
            for j in range(n + 1):
                r[i - n + j] -= c * f[j]
    return trim(r[:n])


def peval(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pcompose(a: Sequence, b: Sequence) -> list:
    """a(b(X))."""
    acc: list = []
    for c in reversed(a):
        acc = padd(pmul(acc, b), [c])
    return acc


def pderiv(a: Sequence) -> list:
    return trim([i * a[i] for i in range(1, len(a))])


def content_denominator(coeffs: Iterable) -> int:
    d = 1
    for c in coeffs:
        if isinstance(c, Fraction):
            d = d * c.denominator // math.gcd(d, c.denominator)
    return d


# -- mod p ------------------------------------------------------------------


def pmod(a: Sequence[int], p: int) -> list[int]:
    return trim([c % p for c in a])


def pmul_modp(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return pmod(pmul(a, b), p)


def prem_modp(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    r = pmod(a, p)
    b = pmod(b, p)
    db = len(b) - 1
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    while len(r) - 1 >= db and r:
        c = r[-1] * inv % p
        shift = len(r) - 1 - db
        for j in range(db + 1):
            r[shift + j] = (r[shift + j] - c * b[j]) % p
        r = trim(r)
    return r


def pdivmod_modp(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    r = pmod(a, p)
    b = pmod(b, p)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(r) - db, 1)
    while r and len(r) - 1 >= db:
        c = r[-1] * inv % p
        shift = len(r) - 1 - db
        q[shift] = c
        for j in range(db + 1):
            r[shift + j] = (r[shift + j] - c * b[j]) % p
        r = trim(r)
    return trim(q), r


def pgcd_modp(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = pmod(a, p)
    b = pmod(b, p)
    while b:
        a, b = b, prem_modp(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def factor_modp(a: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of ``a`` mod p with multiplicities."""
    hi = [int(c) % p for c in reversed(trim(a))]
    _, facs = gf_factor(hi, p, ZZ)
    out = [([int(c) for c in reversed(f)], e) for f, e in facs]
    out.sort(key=lambda t: (len(t[0]), t[0][::-1], t[1]))
    return out


def is_squarefree_modp(a: Sequence[int], p: int) -> bool:
    hi = [int(c) % p for c in reversed(trim(a))]
    return bool(gf_sqf_p(hi, p, ZZ))


def factor_sqf_modp(a: Sequence[int], p: int) -> list[list[int]]:
    hi = [int(c) % p for c in reversed(trim(a))]
    _, facs = gf_factor_sqf(hi, p, ZZ)
    out = [[int(c) for c in reversed(f)] for f in facs]
    out.sort(key=lambda f: (len(f), f[::-1]))
    return out


# -- CRT machinery ------------------------------------------------------------


@lru_cache(maxsize=None)
def _prime_block(count: int) -> tuple[int, ...]:
    out = []
    p = _PRIME_START + 1
    for _ in range(count):
        p = prevprime(p)
        out.append(p)
    return tuple(out)


def crt_primes(bits: int) -> tuple[int, ...]:
    """Enough 31-bit primes for a product exceeding 2^bits."""
    need = bits // 30 + 2
    return _prime_block(need)


def crt_symmetric(residues: Sequence[int], primes: Sequence[int]) -> int:
    x = 0
    m = 1
    for r, p in zip(residues, primes):
        # x + m * t = r (mod p)
        t = (r - x) * pow(m, -1, p) % p
        x += m * t
        m *= p
    if x > m // 2:
        x -= m
    return x


def _norm2_bits(a: Sequence[int]) -> float:
    s = sum(int(c) * int(c) for c in a)
    return 0.5 * math.log2(s) if s > 0 else 0.0


def resultant_int(f: Sequence[int], g: Sequence[int]) -> int:
    """Exact Res(f, g) for integer polynomials (CRT over word-size primes)."""
    f = trim([int(c) for c in f])
    g = trim([int(c) for c in g])
    if not f or not g:
        return 0
    df, dg = len(f) - 1, len(g) - 1
    if df == 0:
        return f[0] ** dg
    if dg == 0:
        return g[0] ** df
    # Hadamard bound |Res| <= |f|_2^dg |g|_2^df
    bits = int(dg * _norm2_bits(f) + df * _norm2_bits(g)) + 2
    primes = crt_primes(bits)
    residues = [kernels.resultant_modp(f, g, p) for p in primes]
    return crt_symmetric(residues, primes)


def resultant_rational(f: Sequence[int], g: Sequence) -> Fraction:
    """Res(f, g) for monic integer ``f`` and rational ``g``."""
    d = content_denominator(g)
    gi = [int(Fraction(c) * d) for c in g]
    r = resultant_int(f, gi)
    df = len(trim(f)) - 1
    return Fraction(r, d**df)


def charpoly_int_matrix(mat: Sequence[Sequence[int]]) -> list[int]:
    """Characteristic polynomial (monic, constant first) of an integer matrix."""
    n = len(mat)
    if n == 0:
        return [1]
    flat = [int(x) for row in mat for x in row]
    rowsum = max(sum(abs(int(x)) for x in row) for row in mat)
    # coefficients are bounded by (1 + rowsum)^n
    bits = int(n * math.log2(1 + rowsum)) + 2
    primes = crt_primes(bits)
    per_prime = [kernels.charpoly_modp(flat, n, p) for p in primes]
    return [crt_symmetric([pp[i] for pp in per_prime], primes) for i in range(n + 1)]


def charpoly_rational_matrix(mat: Sequence[Sequence]) -> list[Fraction]:
    """Characteristic polynomial of a rational matrix via a scaled integer matrix."""
    n = len(mat)
    d = content_denominator(x for row in mat for x in row)
    im = [[int(Fraction(x) * d) for x in row] for row in mat]
    cp = charpoly_int_matrix(im)
    # charpoly_M(X) = d^-n charpoly_{dM}(dX)
    return [Fraction(c * d**i, d**n) for i, c in enumerate(cp)]


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Find n/d = a mod m with |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    frac = Fraction(r1, s1)
    if (frac.numerator - a * frac.denominator) % m != 0:
        return None
    return frac
