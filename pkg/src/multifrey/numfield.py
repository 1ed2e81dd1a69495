"""Exact arithmetic in K = Q(zeta_7)^+ and in Hecke eigenvalue fields.

``KElement`` is c0 + c1*w + c2*w^2 with w = zeta_7 + zeta_7^{-1}, reduced
modulo X^3 + X^2 - 2X - 1.  ``NFElement`` lives in Q[y]/(f) for an arbitrary
monic integral ``f`` (the field of Hecke eigenvalues of a newform).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import mpmath
from sympy import factorint, isprime, primerange

from . import polys
from .ffield import GF, build_extension

Rational = Union[int, Fraction]

#: minimal polynomial of w, constant term first
K_POLY: tuple[int, ...] = (-1, -2, 1, 1)


def _norm_q(x) -> Rational:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, (int, Fraction)):
        return x
    return Fraction(x)


# ---------------------------------------------------------------------------
# K = Q(w)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KElement:
    """Element c0 + c1 w + c2 w^2 of K."""

    coords: tuple[Rational, Rational, Rational]

    def __init__(self, c0: Rational = 0, c1: Rational = 0, c2: Rational = 0):
        object.__setattr__(self, "coords", (_norm_q(c0), _norm_q(c1), _norm_q(c2)))

    @classmethod
    def coerce(cls, x) -> "KElement":
        if isinstance(x, KElement):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, (tuple, list)) and len(x) == 3:
            return cls(*x)
        raise TypeError(f"cannot coerce {x!r} to KElement")

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            o = KElement.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coords, o.coords
        return KElement(a[0] + b[0], a[1] + b[1], a[2] + b[2])

    __radd__ = __add__

    def __neg__(self):
        a = self.coords
        return KElement(-a[0], -a[1], -a[2])

    def __sub__(self, other):
        try:
            o = KElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return KElement.coerce(other) - self

    def __mul__(self, other):
        try:
            o = KElement.coerce(other)
        except TypeError:
            return NotImplemented
        return k_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * KElement.coerce(other).inverse()

    def __rtruediv__(self, other):
        return KElement.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "KElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = KElement(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            o = KElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def __repr__(self) -> str:
        return f"KElement{tuple(self.coords)}"

    # structure ---------------------------------------------------------
    def sigma(self, k: int = 1) -> "KElement":
        """Apply sigma_0^k, where sigma_0(w) = w^2 - 2."""
        x = self
        for _ in range(k % 3):
            c0, c1, c2 = x.coords
            # (w^2 - 2)^2 = 3 - w - w^2
            x = KElement(c0 - 2 * c1 + 3 * c2, -c2, c1 - c2)
        return x

    def conjugates(self) -> tuple["KElement", "KElement", "KElement"]:
        return (self, self.sigma(1), self.sigma(2))

    def norm(self) -> Rational:
        return k_norm(self)

    def trace(self) -> Rational:
        c0, c1, c2 = self.coords
        # Tr(1)=3, Tr(w)=-1, Tr(w^2)=5
        return _norm_q(3 * c0 - c1 + 5 * c2)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coords)

    def is_rational(self) -> bool:
        return self.coords[1] == 0 and self.coords[2] == 0

    def inverse(self) -> "KElement":
        n = k_norm(self)
        if n == 0:
            raise ZeroDivisionError("inverse of zero in K")
        s1, s2 = self.sigma(1), self.sigma(2)
        adj = s1 * s2
        c = Fraction(1) / Fraction(n)
        return KElement(*(x * c for x in adj.coords))

    def embeddings(self, prec: int = 53) -> tuple:
        """Real values at w = w1, w2, w3 (in the order of the sigma_0 orbit)."""
        with mpmath.workprec(prec):
            out = []
            for r in omega_values(prec):
                c0, c1, c2 = self.coords
                out.append(mpmath.mpf(c0) + mpmath.mpf(c1) * r + mpmath.mpf(c2) * r * r)
            return tuple(out)

    def as_poly(self) -> list:
        return polys.trim(list(self.coords))


def k_mul(x: KElement, y: KElement) -> KElement:
    a, b = x.coords, y.coords
    d0 = a[0] * b[0]
    d1 = a[0] * b[1] + a[1] * b[0]
    d2 = a[0] * b[2] + a[1] * b[1] + a[2] * b[0]
    d3 = a[1] * b[2] + a[2] * b[1]
    d4 = a[2] * b[2]
    # w^3 = 1 + 2w - w^2, w^4 = -1 - w + 3w^2
    return KElement(d0 + d3 - d4, d1 + 2 * d3 - d4, d2 - d3 + 3 * d4)


def k_norm(x: KElement) -> Rational:
    p = x * x.sigma(1) * x.sigma(2)
    assert p.coords[1] == 0 and p.coords[2] == 0
    return p.coords[0]


@lru_cache(maxsize=8)
def omega_values(prec: int = 53) -> tuple:
    """(w1, w2, w3) = 2cos(2 pi k / 7), k = 1, 2, 3, as mpf."""
    with mpmath.workprec(prec + 10):
        return tuple(2 * mpmath.cos(2 * mpmath.pi * k / 7) for k in (1, 2, 3))


OMEGA = KElement(0, 1, 0)
OMEGA1 = OMEGA
OMEGA2 = KElement(-2, 0, 1)
OMEGA3 = KElement(1, -1, -1)
EPS1 = KElement(1, 0, -1)
EPS2 = KElement(1, 1, 0)
#: generator of the ramified prime above 7 (norm 7)
Q7_UNIFORMIZER = KElement(2, -1, 0)


def k_valuation(x: KElement, q: int) -> int:
    """Valuation of integral x at the unique prime above q in {2, 3, 7}."""
    if q not in (2, 3, 7):
        raise ValueError("only the primes 2, 3, 7 have a unique prime above them")
    n = k_norm(x)
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    num = n.numerator if isinstance(n, Fraction) else n
    den = n.denominator if isinstance(n, Fraction) else 1
    v = _vp(num, q) - _vp(den, q)
    return v if q == 7 else v // 3


def _vp(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def unit_gcd_primes(exponent: int) -> set[int]:
    """Primes p >= 5, p != 7 dividing gcd(N(e1^e - 1), N(e2^e - 1))."""
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    n1 = int(k_norm(EPS1**exponent - 1))
    n2 = int(k_norm(EPS2**exponent - 1))
    g = math.gcd(n1, n2)
    if g == 0:
        raise ValueError("both norms vanish")
    return {p for p in factorint(g) if p >= 5 and p != 7}


# ---------------------------------------------------------------------------
# primes of K
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeIdealK:
    """A prime of K above the rational prime q.

    For split q the residue map sends w to ``root`` (mod q) and ``index`` is
    the position in the sigma_0 orbit starting from the smallest root.  Inert
    primes have f = 3 and map into F_{q^3}; q = 7 is the ramified prime.
    """

    q: int
    f: int
    root: int | None
    index: int = 0
    ramified: bool = False

    @property
    def norm(self) -> int:
        return self.q**self.f

    @property
    def label(self) -> str:
        if self.f == 1 and not self.ramified:
            return f"q{self.q}_{self.root}"
        return f"q{self.q}"

    def sigma(self, k: int = 1) -> "PrimeIdealK":
        """sigma_0^k applied to this prime."""
        if self.root is None or self.ramified:
            return self
        r = self.root
        for _ in range(k % 3):
            r = (1 - r - r * r) % self.q
        return PrimeIdealK(self.q, 1, r, (self.index + k) % 3)

    @cached_property
    def residue_field(self) -> GF:
        return build_extension(self.q, 1 if self.f == 1 else 3)

    @cached_property
    def _omega_image(self) -> int:
        if self.f == 1:
            return self.root % self.q  # type: ignore[operator]
        return inert_root(self.q)

    def residue(self, x: KElement) -> int:
        """Image of integral x in the residue field (as an encoding)."""
        F = self.residue_field
        c0, c1, c2 = x.coords
        if not all(isinstance(c, int) for c in (c0, c1, c2)):
            c0, c1, c2 = (_reduce_frac(c, self.q) for c in (c0, c1, c2))
        w = self._omega_image
        if self.f == 1:
            return (c0 + c1 * w + c2 * w * w) % self.q
        w2 = F.mul(w, w)
        out = F.from_int(c0)
        out = F.add(out, F.mul(F.from_int(c1), w))
        out = F.add(out, F.mul(F.from_int(c2), w2))
        return out

    def divides(self, x: KElement) -> bool:
        return self.residue(x) == 0


def _reduce_frac(c: Rational, q: int) -> int:
    if isinstance(c, int):
        return c
    if c.denominator % q == 0:
        raise ValueError(f"{c} is not q-integral for q={q}")
    return c.numerator * pow(c.denominator, -1, q)


@lru_cache(maxsize=None)
def inert_root(q: int) -> int:
    """Smallest root (encoding) of the cubic in F_{q^3} for inert q."""
    F = build_extension(q, 3)
    coeffs = [F.from_int(c) for c in K_POLY]
    for x in range(F.size):
        if F.poly_eval(coeffs, x) == 0:
            return x
    raise AssertionError("cubic has no root in F_{q^3}")  # pragma: no cover


@lru_cache(maxsize=None)
def split_prime(q: int) -> tuple[PrimeIdealK, ...]:
    """Primes of K above q, via the factorization of the cubic mod q."""
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    if q == 7:
        return (PrimeIdealK(7, 1, 2, 0, ramified=True),)
    roots = [r for r in range(q) if (r**3 + r**2 - 2 * r - 1) % q == 0]
    if not roots:
        return (PrimeIdealK(q, 3, None, 0),)
    assert len(roots) == 3, roots
    assert sum(roots) % q == (-1) % q
    first = PrimeIdealK(q, 1, min(roots), 0)
    return (first, first.sigma(1), first.sigma(2))


def residue_degree(q: int) -> int:
    return split_prime(q)[0].f


# ---------------------------------------------------------------------------
# Hecke fields
# ---------------------------------------------------------------------------


class IndexDivisorError(ValueError):
    """p divides the index of Z[y] in the maximal order; no residue maps."""


class InconclusiveError(RuntimeError):
    """The embedding search could not decide."""


@dataclass(frozen=True)
class NumberFieldSpec:
    """Q[y]/(f) for a monic integral f (constant term first)."""

    poly: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(c) for c in self.poly)
        object.__setattr__(self, "poly", p)
        if len(p) < 2 or p[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree >= 1")

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @cached_property
    def discriminant(self) -> int:
        f = list(self.poly)
        n = self.degree
        r = polys.resultant_int(f, polys.pderiv(f))
        return (-1) ** (n * (n - 1) // 2) * r

    def gen(self) -> "NFElement":
        if self.degree == 1:
            return NFElement(self, (-self.poly[0],))
        return NFElement(self, (0, 1))

    def element(self, coords: Iterable) -> "NFElement":
        return NFElement(self, tuple(coords))

    def embeddings(self, prec: int = 256) -> list:
        return _field_roots(self.poly, prec)

    def __repr__(self) -> str:
        return f"NumberFieldSpec({list(self.poly)})"


@lru_cache(maxsize=64)
def _field_roots(poly: tuple[int, ...], prec: int) -> list:
    with mpmath.workprec(prec):
        return list(
            mpmath.polyroots(list(reversed(poly)), maxsteps=400, extraprec=4 * prec)
        )


@dataclass(frozen=True)
class NFElement:
    """Element of a Hecke field, coordinates on the power basis."""

    field: NumberFieldSpec
    coords: tuple

    def __init__(self, field: NumberFieldSpec, coords: Iterable = ()):
        c = [_norm_q(x) for x in coords]
        if len(c) > field.degree:
            c = polys.prem_monic(c, field.poly)
        c = [_norm_q(x) for x in polys.trim(c)]
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", tuple(c))

    @classmethod
    def rational(cls, field: NumberFieldSpec, c: Rational) -> "NFElement":
        return cls(field, (c,))

    def _coerce(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, (other,))
        raise TypeError

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return NFElement(self.field, polys.padd(self.coords, o.coords))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, [-c for c in self.coords])

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return NFElement(self.field, polys.psub(self.coords, o.coords))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        prod = polys.pmul(self.coords, o.coords)
        return NFElement(self.field, polys.prem_monic(prod, self.field.poly))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "NFElement":
        if n < 0:
            raise ValueError("negative powers not supported")
        result = NFElement(self.field, (1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = NFElement(self.field, (other,))
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.field.poly, self.coords))

    def __bool__(self) -> bool:
        return bool(self.coords)

    def __repr__(self) -> str:
        return f"NFElement({list(self.coords)} mod {list(self.field.poly)})"

    def is_rational(self) -> bool:
        return len(self.coords) <= 1

    def denominator(self) -> int:
        return polys.content_denominator(self.coords)

    def norm(self) -> Rational:
        return nf_norm(self)

    def charpoly(self) -> list[Fraction]:
        """Characteristic polynomial over Q, monic, constant term first."""
        return nf_charpoly(self)

    def embeddings(self, prec: int = 256) -> list:
        roots = self.field.embeddings(prec)
        with mpmath.workprec(prec):
            return [polys.peval([mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in self.coords], r) for r in roots]

    def multiplication_matrix(self) -> list[list]:
        """Matrix of y -> self * y on the power basis (columns are images)."""
        n = self.field.degree
        cols = []
        b = NFElement(self.field, (1,))
        gen = self.field.gen() if n > 1 else None
        for i in range(n):
            img = self * b
            col = list(img.coords) + [0] * (n - len(img.coords))
            cols.append(col)
            if gen is not None:
                b = b * gen
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def nf_norm(x: NFElement) -> Rational:
    """Norm via Res(f, x(y)) / D^n with exact CRT resultants."""
    if not x.coords:
        return 0
    f = x.field.poly
    n = x.field.degree
    if len(x.coords) == 1:
        return _norm_q(Fraction(x.coords[0]) ** n)
    return _norm_q(polys.resultant_rational(f, x.coords))


def nf_charpoly(x: NFElement) -> list[Fraction]:
    n = x.field.degree
    if len(x.coords) <= 1:
        c = Fraction(x.coords[0]) if x.coords else Fraction(0)
        # (X - c)^n
        return [Fraction(math.comb(n, i)) * (-c) ** (n - i) for i in range(n + 1)]
    return polys.charpoly_rational_matrix(x.multiplication_matrix())


def k_in_field(u: KElement, iota: NFElement) -> NFElement:
    """Image of u in K_g under the embedding w -> iota."""
    c0, c1, c2 = u.coords
    one = NFElement(iota.field, (1,))
    return one * c0 + iota * c1 + (iota * iota) * c2


# -- embeddings of K into K_g ------------------------------------------------


def _cubic_at(x: NFElement) -> NFElement:
    return x * x * x + x * x - 2 * x - 1


def _good_primes(spec: NumberFieldSpec, limit: int = 2000) -> Iterable[int]:
    disc = spec.discriminant
    for p in primerange(11, limit):
        if disc % p != 0:
            yield p


def _hensel_roots_cubic(p: int, prec: int) -> list[int]:
    """The three roots of the K-cubic in Z/p^prec (p split in K)."""
    mod = p**prec
    roots = [r for r in range(p) if (r**3 + r**2 - 2 * r - 1) % p == 0]
    out = []
    for r in roots:
        x = r
        m = p
        while m < mod:
            m = min(m * m, mod)
            fx = x**3 + x**2 - 2 * x - 1
            dfx = 3 * x * x + 2 * x - 2
            x = (x - fx * pow(dfx, -1, m)) % m
        out.append(x % mod)
    return out


def _lift_idempotents(f: Sequence[int], factors: list[list[int]], p: int, prec: int) -> list[list[int]]:
    """Orthogonal idempotents of (Z/p^prec)[y]/f lifting the CRT idempotents mod p."""
    mod = p**prec
    n = len(f) - 1
    out = []
    for i, fi in enumerate(factors):
        # e = 1 mod fi, 0 mod the product of the others
        other = [1]
        for j, fj in enumerate(factors):
            if j != i:
                other = polys.pmul_modp(other, fj, p)
        # solve a*other = 1 mod fi
        inv = _inverse_mod_poly(polys.prem_modp(other, fi, p), fi, p)
        e = polys.prem_modp(polys.pmul_modp(inv, other, p), f, p)
        m = p
        while m < mod:
            m = min(m * m, mod)
            e2 = polys.prem_monic(polys.pmul(e, e), f)
            e3 = polys.prem_monic(polys.pmul(e2, e), f)
            e = [(3 * a - 2 * b) % m for a, b in itertools.zip_longest(e2, e3, fillvalue=0)]
        e = polys.trim([c % mod for c in e])
        out.append(e + [0] * (n - len(e)))
    return out


def _inverse_mod_poly(a: list[int], m: list[int], p: int) -> list[int]:
    r0, r1 = polys.pmod(m, p), polys.pmod(a, p)
    s0, s1 = [], [1]
    while r1:
        qt, rem = polys.pdivmod_modp(r0, r1, p)
        r0, r1 = r1, rem
        s0, s1 = s1, polys.pmod(polys.psub(s0, polys.pmul(qt, s1)), p)
    assert len(r0) == 1, "not invertible"
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0]


MAX_ASSIGNMENTS = 50_000


def find_K_embeddings(spec: NumberFieldSpec, max_prec_bits: int = 4096) -> list[NFElement]:
    """All roots of X^3 + X^2 - 2X - 1 in the field ``spec``.

    Returns [] when K is not contained in the field and the three roots
    otherwise.  Raises :class:`InconclusiveError` if the search cannot
    decide within its limits.
    """
    n = spec.degree
    if n % 3 != 0:
        return []
    f = list(spec.poly)
    if tuple(f) == K_POLY:
        g = spec.gen()
        return _sorted_roots([g, g * g - 2, 1 - g - g * g])
    best = None
    for p in _good_primes(spec):
        facs = polys.factor_sqf_modp(f, p)
        degs = [len(t) - 1 for t in facs]
        if p % 7 not in (0, 1, 6):
            # p inert in K: every residue degree of K_g over p is then divisible by 3
            if any(d % 3 for d in degs):
                return []
            continue
        if best is None or len(facs) < len(best[1]):
            best = (p, facs)
        if best is not None and len(best[1]) <= 3:
            break
    if best is None:
        raise InconclusiveError("no usable split prime")
    p, facs = best
    r = len(facs)
    degs = [len(t) - 1 for t in facs]
    target = n // 3
    assignments = list(_balanced_assignments(degs, target))
    if len(assignments) > MAX_ASSIGNMENTS:
        raise InconclusiveError(f"{len(assignments)} assignments to test at p={p}")
    prec = 8
    while True:
        mod = p**prec
        es = _lift_idempotents(f, facs, p, prec)
        rho = _hensel_roots_cubic(p, prec)
        for assign in assignments:
            theta = [0] * n
            for i, j in enumerate(assign):
                rj = rho[j]
                ei = es[i]
                for t in range(n):
                    theta[t] += rj * ei[t]
            coords = []
            ok = True
            for c in theta:
                fr = polys.rational_reconstruct(c % mod, mod)
                if fr is None:
                    ok = False
                    break
                coords.append(fr)
            if not ok:
                continue
            cand = NFElement(spec, coords)
            if not _cubic_at(cand):
                roots = [cand, cand * cand - 2, 1 - cand - cand * cand]
                for x in roots:
                    assert not _cubic_at(x)
                return _sorted_roots(roots)
        if mod.bit_length() > max_prec_bits:
            raise InconclusiveError("rational reconstruction did not verify")
        prec *= 2


def _balanced_assignments(degs: list[int], target: int):
    """Maps factor -> root index with each root receiving total degree target.

    The first factor is pinned to root 0 (the other choices give the other
    two roots of the cubic, which are recovered algebraically).
    """
    r = len(degs)
    cur = [0] * r
    loads = [0, 0, 0]

    def rec(i: int):
        if i == r:
            if loads == [target] * 3:
                yield tuple(cur)
            return
        choices = (0,) if i == 0 else (0, 1, 2)
        for j in choices:
            if loads[j] + degs[i] <= target:
                loads[j] += degs[i]
                cur[i] = j
                yield from rec(i + 1)
                loads[j] -= degs[i]

    yield from rec(0)


def _sorted_roots(roots: list[NFElement]) -> list[NFElement]:
    return sorted(roots, key=lambda x: [float(c) for c in x.coords] + [0.0] * 64)


# -- residue maps ---------------------------------------------------------------


@dataclass(frozen=True)
class ResidueMap:
    """Reduction O -> F_p[y]/(g) for a prime (p, g(y)) of a Hecke field."""

    field: NumberFieldSpec
    p: int
    modulus: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def __call__(self, x: NFElement | int | Fraction) -> tuple[int, ...]:
        if isinstance(x, (int, Fraction)):
            coords: Sequence = (x,)
        else:
            coords = x.coords
        red = []
        for c in coords:
            if isinstance(c, Fraction):
                if c.denominator % self.p == 0:
                    raise IndexDivisorError(f"denominator divisible by {self.p}")
                red.append(c.numerator * pow(c.denominator, -1, self.p) % self.p)
            else:
                red.append(c % self.p)
        r = polys.prem_modp(red, list(self.modulus), self.p)
        return tuple(r)

    def from_k(self, u: KElement, iota: NFElement) -> tuple[int, ...]:
        return self(k_in_field(u, iota))


def residue_maps_mod_p(spec: NumberFieldSpec, p: int) -> list[ResidueMap]:
    """One map per prime of the Hecke field above p (Dedekind criterion)."""
    f = list(spec.poly)
    if spec.degree == 1:
        return [ResidueMap(spec, p, (0, 1))]
    facs = polys.factor_modp(f, p)
    if any(e > 1 for _, e in facs):
        # Dedekind: Z[y] is p-maximal iff gcd(F, g, h) = 1 mod p
        g = [1]
        for fac, _ in facs:
            g = polys.pmul(g, fac)
        hbar = [1]
        for fac, e in facs:
            for _ in range(e - 1):
                hbar = polys.pmul(hbar, fac)
        gh = polys.pmul(g, hbar)
        diff = polys.psub(f, gh)
        assert all(c % p == 0 for c in diff)
        F = [c // p for c in diff]
        d = polys.pgcd_modp(polys.pgcd_modp(F, g, p), hbar, p)
        if len(d) > 1:
            raise IndexDivisorError(f"{p} divides the index of the power basis order")
    return [ResidueMap(spec, p, tuple(fac)) for fac, _ in facs]
