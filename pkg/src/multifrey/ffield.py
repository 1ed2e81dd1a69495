"""Small finite fields F_{q^k} with table-driven arithmetic.

Elements are encoded as integers ``sum(d_i * q**i)`` where ``d_i`` are the
coefficients of the polynomial representative modulo the defining modulus.
Every field carries discrete log / exponential tables and a Zech table
(``log(1 + g^n)``), which is what the point-counting kernels consume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .kernels import ZERO_LOG

DEFAULT_CAP = 2_000_000


class FieldCapExceeded(ValueError):
    """Requested field is larger than the enumeration cap."""


class CharacteristicTwo(ValueError):
    """Predicate not available in characteristic 2."""


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], q: int) -> list[int]:
    k = len(mod) - 1
    out = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    for i in range(len(out) - 1, k - 1, -1):
        c = out[i] % q
        if c:
            for j in range(k + 1):
                out[i - k + j] -= c * mod[j]
    return [c % q for c in out[:k]]


def _is_irreducible(mod: Sequence[int], q: int) -> bool:
    k = len(mod) - 1
    if k == 1:
        return True
    if k <= 3:
        # no roots suffices in degree 2, 3
        for x in range(q):
            acc = 0
            for c in reversed(mod):
                acc = (acc * x + c) % q
            if acc == 0:
                return False
        return True
    return bool(gf_irreducible_p([c % q for c in reversed(mod)], q, ZZ))


@lru_cache(maxsize=None)
def smallest_irreducible(q: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k over F_q.

    Order: lexicographic on (c_{k-1}, ..., c_0).
    """
    if k == 1:
        return (0, 1)
    for tail in itertools.product(range(q), repeat=k):
        mod = tuple(reversed(tail)) + (1,)
        if mod[0] == 0:
            continue
        if _is_irreducible(mod, q):
            return mod
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class GF:
    """The field F_{q^k}; build with :func:`build_extension`."""

    q: int
    k: int
    modulus: tuple[int, ...]
    size: int
    generator: int
    exp: tuple[int, ...] = field(repr=False)
    log: tuple[int, ...] = field(repr=False)
    zech: tuple[int, ...] = field(repr=False)

    # encoding helpers ----------------------------------------------------
    def digits(self, e: int) -> list[int]:
        out = []
        for _ in range(self.k):
            e, d = divmod(e, self.q)
            out.append(d)
        return out

    def encode(self, digits: Sequence[int]) -> int:
        e = 0
        for d in reversed(list(digits)[: self.k]):
            e = e * self.q + d % self.q
        return e

    def from_int(self, n: int) -> int:
        return n % self.q

    # arithmetic on encodings --------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.q
        q = self.q
        out = 0
        mult = 1
        for _ in range(self.k):
            a, da = divmod(a, q)
            b, db = divmod(b, q)
            out += ((da + db) % q) * mult
            mult *= q
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.q
        return self.encode([-d for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.size - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % (self.size - 1)]

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if n == 0 else 0
        return self.exp[(self.log[a] * n) % (self.size - 1)]

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.q**times)

    def chi(self, a: int) -> int:
        """Quadratic character: 0, 1 or -1."""
        if self.q == 2:
            raise CharacteristicTwo("quadratic character needs odd characteristic")
        if a == 0:
            return 0
        return 1 if self.log[a] % 2 == 0 else -1

    def log_of(self, a: int) -> int:
        return ZERO_LOG if a == 0 else self.log[a]

    def poly_eval(self, coeffs: Sequence[int], x: int) -> int:
        """Evaluate a polynomial (encodings, constant first) at x."""
        acc = 0
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def roots(self, coeffs: Sequence[int]) -> list[int]:
        return [x for x in range(self.size) if self.poly_eval(coeffs, x) == 0]

    def elements(self) -> Iterator["FqElement"]:
        for e in range(self.size):
            yield FqElement(self, e)

    def element(self, value: int | Sequence[int]) -> "FqElement":
        if isinstance(value, int):
            return FqElement(self, self.from_int(value))
        return FqElement(self, self.encode(value))

    def __repr__(self) -> str:
        return f"GF({self.q}^{self.k})"


def _build(q: int, k: int, cap: int) -> GF:
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    if k < 1:
        raise ValueError("degree must be positive")
    size = q**k
    if size > cap:
        raise FieldCapExceeded(f"field of size {q}^{k} = {size} exceeds cap {cap}")
    mod = smallest_irreducible(q, k)
    order = size - 1

    def mulpoly(a: int, b: int) -> int:
        da = _digits(a, q, k)
        db = _digits(b, q, k)
        return _encode(_poly_mulmod(da, db, mod, q), q)

    # primitive element: smallest encoding whose order is size - 1
    ords = [order // r for r in factorint(order)] if order > 1 else []
    gen = None
    for cand in range(1, size):
        ok = True
        for e in ords:
            if _powpoly(cand, e, mulpoly) == 1:
                ok = False
                break
        if ok:
            gen = cand
            break
    assert gen is not None
    exp = [0] * max(order, 1)
    log = [ZERO_LOG] * size
    x = 1
    for i in range(order):
        exp[i] = x
        log[x] = i
        x = mulpoly(x, gen) if k > 1 else x * gen % q
    if order == 0:  # pragma: no cover - F_1 does not exist
        exp = [1]
    zech = [ZERO_LOG] * max(order, 1)
    for n in range(order):
        e = exp[n]
        d0 = e % q
        e1 = e - d0 + (d0 + 1) % q
        zech[n] = log[e1]
    return GF(q, k, mod, size, gen, tuple(exp), tuple(log), tuple(zech))


def _digits(e: int, q: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        e, d = divmod(e, q)
        out.append(d)
    return out


def _encode(d: Sequence[int], q: int) -> int:
    e = 0
    for x in reversed(d):
        e = e * q + x
    return e


def _powpoly(a: int, n: int, mul) -> int:
    r = 1
    while n:
        if n & 1:
            r = mul(r, a)
        a = mul(a, a)
        n >>= 1
    return r


_CACHE: dict[tuple[int, int], GF] = {}


def build_extension(q: int, k: int, cap: int = DEFAULT_CAP) -> GF:
    """Return F_{q^k} with a deterministic modulus; cached per (q, k)."""
    key = (q, k)
    f = _CACHE.get(key)
    if f is None:
        f = _build(q, k, cap)
        _CACHE[key] = f
    elif f.size > cap:
        raise FieldCapExceeded(f"field of size {q}^{k} exceeds cap {cap}")
    return f


@dataclass(frozen=True)
class FqElement:
    """An element of a :class:`GF`, wrapping its integer encoding."""

    field: GF
    value: int

    def _wrap(self, v: int) -> "FqElement":
        return FqElement(self.field, v)

    def _coerce(self, other) -> int:
        if isinstance(other, FqElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        return self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return self._wrap(self.field.sub(o, self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return self._wrap(self.field.mul(self.value, self.field.inv(o)))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.value, n))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        if isinstance(other, FqElement):
            return self.field is other.field and self.value == other.value
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.q, self.field.k, self.value))

    def frobenius(self, times: int = 1) -> "FqElement":
        return self._wrap(self.field.frobenius(self.value, times))

    def is_square(self) -> str:
        """Tri-state Euler criterion: ``"zero"``, ``"square"`` or ``"nonsquare"``."""
        c = self.field.chi(self.value)
        return "zero" if c == 0 else ("square" if c == 1 else "nonsquare")

    def coords(self) -> list[int]:
        return self.field.digits(self.value)

    def __repr__(self) -> str:
        return f"{self.coords()}@{self.field!r}"


def is_square(x: FqElement) -> str:
    return x.is_square()


@lru_cache(maxsize=None)
def legendre_table(p: int) -> tuple[int, ...]:
    """chi(a) for a in 0..p-1."""
    tab = [-1] * p
    tab[0] = 0
    for x in range(1, p):
        tab[x * x % p] = 1
    return tuple(tab)
