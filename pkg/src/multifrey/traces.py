"""Frobenius traces by point counting.

Every curve here is y^2 = f(x) with f monic of odd degree, so
#C(F_Q) = Q + 1 + sum_x chi(f(x)).  The character sums run in the compiled
kernels; fields come from :mod:`multifrey.ffield`.
"""

from __future__ import annotations

import csv
import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import mpmath
import sympy

from . import kernels
from .ffield import GF, build_extension, legendre_table
from .frey import FreyC7, FreyE, FreyF
from .numfield import KElement, PrimeIdealK, omega_values, split_prime


class BadReduction(ValueError):
    """The curve has bad reduction at the requested prime.

    ``kind`` is ``"multiplicative"`` for the Frey objects at primes away from
    2 and 7, where the congruence uses +-(N + 1) instead of a trace.
    """

    def __init__(self, message: str, kind: str = "multiplicative"):
        super().__init__(message)
        self.kind = kind


class NotGL2Compatible(ArithmeticError):
    """The real Weil polynomial has no roots in O_K."""


# ---------------------------------------------------------------------------
# character sums
# ---------------------------------------------------------------------------


def charsum(field: GF, coeffs: Sequence[int]) -> int:
    """sum over F of chi(f(x)); ``coeffs`` are encodings, constant term first."""
    lead_first = list(reversed(coeffs))
    if field.k == 1:
        return kernels.charsum_prime([c % field.q for c in lead_first], field.q, legendre_table(field.q))
    logs = [field.log_of(c) for c in lead_first]
    return kernels.charsum_log(logs, field.zech, field.size - 1)


_count_lock = threading.Lock()


@lru_cache(maxsize=1 << 16)
def _count_cached(coeffs: tuple[int, ...], q: int, k: int) -> int:
    field = build_extension(q, k)
    return field.size + 1 + charsum(field, coeffs)


def count_odd_model(coeffs: Sequence[int], q: int, k: int = 1) -> int:
    """#{y^2 = f(x)} over F_{q^k} plus one point at infinity; integer coefficients."""
    if q == 2:
        raise ValueError("point counting needs odd characteristic")
    if len(coeffs) % 2 != 0 or coeffs[-1] % q == 0:
        raise ValueError("model must be of odd degree with unit leading coefficient")
    key = tuple(int(c) % q for c in coeffs)
    return _count_cached(key, q, k)


# ---------------------------------------------------------------------------
# E over Q
# ---------------------------------------------------------------------------


def count_points_E(a: int, b: int, q: int) -> int:
    """a_q(E_{a,b}) = q + 1 - #E(F_q)."""
    if q in (2, 7):
        raise ValueError("q must avoid 2 and 7")
    E = FreyE(a, b)
    if E.discriminant % q == 0:
        raise BadReduction(f"E_{{{a},{b}}} has bad reduction at {q}")
    a2, a4, a6 = E.coefficients
    n = count_odd_model((a6, a4, a2, 1), q)
    return q + 1 - n


# ---------------------------------------------------------------------------
# F over K
# ---------------------------------------------------------------------------


def _residue_of(prime: PrimeIdealK, x: KElement) -> int:
    return prime.residue(x)


def count_points_F(a: int, b: int, delta: KElement, prime: PrimeIdealK) -> int:
    """a_q(F_{a,b}^{(delta)}) = N(q) + 1 - #F(residue field)."""
    if prime.q in (2, 7):
        raise ValueError("residue characteristic must avoid 2 and 7")
    F = FreyF(a, b, delta)
    r1, r2 = F.twisted_roots  # y^2 = x (x - r1)(x - r2)
    field = prime.residue_field
    e1 = prime.residue(r1)
    e2 = prime.residue(r2)
    if e1 == 0 or e2 == 0 or e1 == e2:
        raise BadReduction(f"F has bad reduction at {prime.label}")
    return _trace_from_roots(field, e1, e2)


def _trace_from_roots(field: GF, e1: int, e2: int) -> int:
    # x (x - e1)(x - e2) = x^3 - (e1 + e2) x^2 + e1 e2 x
    s = field.add(e1, e2)
    p = field.mul(e1, e2)
    coeffs = (0, p, field.neg(s), 1)
    return -charsum(field, coeffs)


def trace_F_at_residues(field: GF, A_res: int, B_res: int, delta_res: int) -> int | None:
    """Trace of y^2 = x(x - dA)(x + dB) from residues; None when singular."""
    e1 = field.mul(delta_res, A_res)
    e2 = field.neg(field.mul(delta_res, B_res))
    if e1 == 0 or e2 == 0 or e1 == e2:
        return None
    return _trace_from_roots(field, e1, e2)


# ---------------------------------------------------------------------------
# C7 and its L-polynomial
# ---------------------------------------------------------------------------


def count_points_C7(a: int, b: int, q: int, k: int = 1) -> int:
    """#C7(a,b)(F_{q^k}) including the point at infinity."""
    if k < 1 or k > 3:
        raise ValueError("k must be 1, 2 or 3")
    C = FreyC7(a, b)
    if not C.has_good_reduction(q):
        raise BadReduction(f"C7({a},{b}) has bad reduction at {q}")
    return count_odd_model(C.coefficients, q, k)


@dataclass(frozen=True)
class LPoly:
    """L(T) = 1 + c1 T + ... + c6 T^6 of a genus-3 curve over F_q."""

    q: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != 7 or self.coeffs[0] != 1:
            raise ValueError("expected 7 coefficients with c0 = 1")

    def functional_equation_holds(self) -> bool:
        c, q = self.coeffs, self.q
        return all(c[6 - i] == q ** (3 - i) * c[i] for i in range(4))

    def weil_cubic_roots(self, dps: int = 50) -> list:
        """Roots a_i of the real Weil cubic, isolated exactly and then evaluated."""
        e1, e2, e3 = self.real_weil_cubic()
        X = sympy.symbols("X")
        h = sympy.Poly(X**3 - e1 * X**2 + e2 * X - e3, X)
        real = sympy.real_roots(h)
        if len(real) == 3:
            return [mpmath.mpf(str(r.evalf(dps))) for r in real]
        return [mpmath.mpc(complex(r.evalf(dps))) for r in h.all_roots()]

    def inverse_roots(self, dps: int = 50) -> list:
        """The six inverse roots, as roots of T^2 - a_i T + q."""
        out = []
        with mpmath.workdps(dps):
            for a in self.weil_cubic_roots(dps):
                d = mpmath.sqrt(a * a - 4 * self.q)
                out += [(a + d) / 2, (a - d) / 2]
        return out

    def weil_bound_holds(self, tol: float = 1e-8) -> bool:
        if not self.functional_equation_holds():
            return False
        s = math.sqrt(self.q)
        return all(abs(float(abs(r)) - s) <= tol * max(1.0, s) for r in self.inverse_roots())

    def point_counts(self, up_to: int = 3) -> list[int]:
        """N_k = q^k + 1 - s_k for k = 1..up_to, from Newton's identities."""
        c = self.coeffs
        s: list[int] = []
        for k in range(1, up_to + 1):
            # s_k = -k c_k - sum_{i=1}^{k-1} s_i c_{k-i}
            ck = c[k] if k <= 6 else 0
            val = -k * ck - sum(s[i - 1] * (c[k - i] if k - i <= 6 else 0) for i in range(1, k))
            s.append(val)
        return [self.q**k + 1 - s[k - 1] for k in range(1, up_to + 1)]

    def real_weil_cubic(self) -> tuple[int, int, int]:
        """(e1, e2, e3) with L(T) = prod (1 - a_i T + q T^2), h = X^3 - e1 X^2 + e2 X - e3."""
        c1, c2, c3 = self.coeffs[1:4]
        return _weil_inverse()(c1, c2, c3, self.q)

    def base_change(self, k: int) -> "LPoly":
        """L-polynomial over F_{q^k}: inverse roots raised to the k-th power."""
        T = sympy.symbols("T")
        L = sum(sympy.Integer(c) * T**i for i, c in enumerate(self.coeffs))
        # prod over k-th roots of unity zeta of L(zeta T) = L_k(T^k)
        z = sympy.exp(2 * sympy.pi * sympy.I / k)
        prod = sympy.Integer(1)
        for j in range(k):
            prod *= L.subs(T, z**j * T)
        poly = sympy.Poly(sympy.expand(sympy.nsimplify(sympy.expand(prod))), T)
        coeffs = [int(poly.coeff_monomial(T ** (k * i))) for i in range(7)]
        return LPoly(self.q**k, tuple(coeffs))

    def as_sympy(self, T=None):
        T = T if T is not None else sympy.symbols("T")
        return sum(sympy.Integer(c) * T**i for i, c in enumerate(self.coeffs))


def lpoly_from_counts(counts: Sequence[int], q: int) -> LPoly:
    """Genus-3 L-polynomial from (N1, N2, N3) via Newton's identities."""
    if len(counts) != 3:
        raise ValueError("need counts over F_q, F_{q^2}, F_{q^3}")
    s = [q ** (i + 1) + 1 - counts[i] for i in range(3)]
    c = [Fraction(1)]
    for k in range(1, 4):
        val = -sum(s[i - 1] * c[k - i] for i in range(1, k + 1)) / k
        c.append(Fraction(val))
    if any(x.denominator != 1 for x in c):
        raise ArithmeticError("non-integral L-polynomial coefficients: counting bug")
    ci = [int(x) for x in c]
    full = ci + [q * ci[2], q**2 * ci[1], q**3]
    L = LPoly(q, tuple(full))
    if not L.weil_bound_holds():
        raise ArithmeticError(f"L-polynomial {full} violates the Weil bound: counting bug")
    return L


@lru_cache(maxsize=1)
def _weil_relations():
    """Symbolic expansion of prod (1 - a_i T + q T^2): c1, c2, c3 in e1, e2, e3."""
    from sympy.polys.polyfuncs import symmetrize

    T, q = sympy.symbols("T q")
    a = sympy.symbols("a1:4")
    e = sympy.symbols("e1:4")
    poly = sympy.Poly(sympy.expand(sympy.prod([1 - ai * T + q * T**2 for ai in a])), T)
    rel = []
    for k in (1, 2, 3):
        sym, rem, defs = symmetrize(poly.coeff_monomial(T**k), *a, formal=True)
        assert rem == 0
        rel.append(sympy.expand(sym.subs({s: ei for (s, _), ei in zip(defs, e)})))
    return tuple(rel), e, q


@lru_cache(maxsize=1)
def _weil_inverse():
    """Solve the relations for (e1, e2, e3); returns a callable on integers."""
    (r1, r2, r3), e, q = _weil_relations()
    c = sympy.symbols("c1:4")
    sol = sympy.solve([r1 - c[0], r2 - c[1], r3 - c[2]], e, dict=True)
    assert len(sol) == 1
    exprs = [sympy.expand(sol[0][ei]) for ei in e]
    fn = sympy.lambdify((c[0], c[1], c[2], q), exprs, modules=[{}, "math"])

    def inverse(c1: int, c2: int, c3: int, qq: int) -> tuple[int, int, int]:
        vals = fn(c1, c2, c3, qq)
        return tuple(int(v) for v in vals)  # type: ignore[return-value]

    return inverse


def weil_relations_text() -> list[str]:
    """The relations c_k(e1, e2, e3) as strings (for documentation and tests)."""
    rels, _, _ = _weil_relations()
    return [f"c{k} = {r}" for k, r in zip((1, 2, 3), rels)]


@lru_cache(maxsize=1 << 14)
def lpoly_C7(a: int, b: int, q: int) -> LPoly:
    counts = [count_points_C7(a, b, q, k) for k in (1, 2, 3)]
    return lpoly_from_counts(counts, q)


# ---------------------------------------------------------------------------
# trace sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceSet:
    """The set {a_q'(J) : q' | q} of Frobenius traces of J = Jac(C7) over K."""

    q: int
    elements: frozenset[KElement]

    def __post_init__(self):
        if len(self.elements) not in (1, 3):
            raise ValueError("a trace set has 1 or 3 elements")

    def sorted(self) -> list[KElement]:
        return sorted(self.elements, key=lambda u: u.coords)

    @property
    def residue_degree(self) -> int:
        return split_prime(self.q)[0].f

    def is_sigma_stable(self) -> bool:
        return {u.sigma() for u in self.elements} == set(self.elements)

    def weil_bound_holds(self) -> bool:
        f = self.residue_degree
        bound = 2 * math.sqrt(self.q**f) + 1e-9
        return all(abs(float(v)) <= bound for u in self.elements for v in u.embeddings())

    def signed(self, sign: int) -> "TraceSet":
        return TraceSet(self.q, frozenset(u * sign for u in self.elements))

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"TraceSet(q={self.q}, {[u.coords for u in self.sorted()]})"


def _roots_of_cubic_in_K(e1: int, e2: int, e3: int) -> list[KElement]:
    """Roots of X^3 - e1 X^2 + e2 X - e3 in O_K by embedding matching."""

    def h(u: KElement) -> KElement:
        return u * u * u - e1 * (u * u) + e2 * u - e3

    X = sympy.symbols("X")
    found: set[KElement] = set()
    irreducible_cubic = None
    for fac, _ in sympy.Poly(X**3 - e1 * X**2 + e2 * X - e3, X).factor_list()[1]:
        if fac.degree() == 1:
            # monic integer cubic: rational roots are integers
            c1, c0 = fac.all_coeffs()
            found.add(KElement(int(-c0 // c1)))
        elif fac.degree() == 3:
            irreducible_cubic = fac
    if irreducible_cubic is not None:
        # distinct roots, so polyroots converges
        with mpmath.workdps(60):
            roots = mpmath.polyroots([int(c) for c in irreducible_cubic.all_coeffs()], maxsteps=200, extraprec=300)
            if any(abs(mpmath.im(r)) > mpmath.mpf(10) ** -20 for r in roots):
                raise NotGL2Compatible("real Weil cubic has non-real roots")
            rs = sorted(mpmath.re(r) for r in roots)
            w = omega_values(200)
            Vinv = mpmath.matrix([[1, wi, wi * wi] for wi in w]) ** -1
            for perm in itertools.permutations(range(3)):
                coords = Vinv * mpmath.matrix([rs[i] for i in perm])
                ints = [int(mpmath.nint(coords[i])) for i in range(3)]
                if any(abs(coords[i] - ints[i]) > mpmath.mpf(10) ** -12 for i in range(3)):
                    continue
                u = KElement(*ints)
                if not h(u):
                    found.add(u)
    if not found:
        raise NotGL2Compatible(f"X^3 - {e1}X^2 + {e2}X - {e3} has no root in O_K")
    out = set()
    for u in found:
        out.update(u.conjugates())
    return sorted(out, key=lambda u: u.coords)


def trace_set(x: int, y: int, q: int) -> TraceSet:
    """T_q(x, y) for odd q != 7.

    C7(l a, l b) is the quadratic twist of C7(a, b) by l, so only one pair per
    projective class is counted: T_q(l x, l y) = chi_q(l) T_q(x, y).
    """
    (rx, ry), lam = projective_normalize(x, y, q)
    ts = _trace_set_cached(rx, ry, q)
    return ts if scale_sign(lam, q) == 1 else ts.signed(-1)


def projective_normalize(x: int, y: int, q: int) -> tuple[tuple[int, int], int]:
    """((x', y'), l) with (x, y) = l (x', y') and (x', y') in projective_classes(q)."""
    x, y = x % q, y % q
    if x:
        return (1, y * pow(x, -1, q) % q), x
    if y:
        return (0, 1), y
    raise ValueError("(0, 0) has no projective class")


@lru_cache(maxsize=1 << 14)
def _trace_set_cached(x: int, y: int, q: int) -> TraceSet:
    if q in (2, 7):
        raise ValueError("q must avoid 2 and 7")
    if (x**7 + y**7) % q == 0:
        raise BadReduction(f"J({x},{y}) has bad reduction above {q}")
    f = split_prime(q)[0].f
    if f == 3:
        n3 = count_points_C7(x, y, q, 3)
        num = q**3 + 1 - n3
        if num % 3:
            raise NotGL2Compatible(f"(q^3 + 1 - N3) = {num} is not divisible by 3")
        return TraceSet(q, frozenset({KElement(num // 3)}))
    L = lpoly_C7(x, y, q)
    e1, e2, e3 = L.real_weil_cubic()
    roots = _roots_of_cubic_in_K(e1, e2, e3)
    return TraceSet(q, frozenset(roots))


def inert_trace_via_lpoly(x: int, y: int, q: int) -> int:
    """Cross-check of the inert shortcut: base-change the full L-poly to F_{q^3}."""
    L = lpoly_C7(x, y, q)
    L3 = L.base_change(3)
    T = sympy.symbols("T")
    target = sympy.Poly(L3.as_sympy(T), T)
    # (1 - a T + q^3 T^2)^3 has T-coefficient -3a
    a = Fraction(-L3.coeffs[1], 3)
    if a.denominator != 1:
        raise NotGL2Compatible("base-changed L-polynomial is not a cube")
    a = int(a)
    expect = sympy.Poly(sympy.expand((1 - a * T + q**3 * T**2) ** 3), T)
    if expect != target:
        raise NotGL2Compatible("base-changed L-polynomial is not (1 - aT + q^3 T^2)^3")
    return a


def projective_classes(q: int) -> list[tuple[int, int]]:
    """Representatives of (F_q^2 - 0)/F_q^*: (1, y) for all y, then (0, 1)."""
    return [(1, y) for y in range(q)] + [(0, 1)]


def scale_sign(lam: int, q: int, k: int = 1) -> int:
    """chi_{q^k}(lam) for lam in F_q^*: (lam | q)^k."""
    return legendre_table(q)[lam % q] ** k


def trace_set_table(q: int, pairs: Iterable[tuple[int, int]] | None = None) -> dict[tuple[int, int], TraceSet | None]:
    """T_q for the given residue pairs (None marks bad reduction)."""
    out: dict[tuple[int, int], TraceSet | None] = {}
    if pairs is None:
        pairs = [(x, y) for x in range(q) for y in range(q) if (x, y) != (0, 0)]
    for x, y in pairs:
        try:
            out[(x, y)] = trace_set(x, y, q)
        except BadReduction:
            out[(x, y)] = None
    return out


def dump_trace_sets_csv(q: int, fh: TextIO, pairs: Iterable[tuple[int, int]] | None = None) -> int:
    """Write (q, x, y, trace set) rows; returns the number of rows."""
    w = csv.writer(fh)
    w.writerow(["q", "x", "y", "trace_set"])
    n = 0
    for (x, y), ts in trace_set_table(q, pairs).items():
        cell = "bad" if ts is None else ";".join(
            "(" + ",".join(str(c) for c in u.coords) + ")" for u in ts.sorted()
        )
        w.writerow([q, x, y, cell])
        n += 1
    return n


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------


def chi7_sign(prime: PrimeIdealK | int) -> int:
    """chi_7(Frob_q) on G_K: +1 if q^f = 1 mod 7, -1 if q^f = -1 mod 7."""
    if isinstance(prime, int):
        prime = split_prime(prime)[0]
    if prime.q == 7:
        raise ValueError("chi_7 is ramified at 7")
    r = pow(prime.q, prime.f, 7)
    if r == 1:
        return 1
    if r == 6:
        return -1
    raise AssertionError("q^f is +-1 mod 7 for unramified primes of K")  # pragma: no cover


def symmetry_sign(prime: PrimeIdealK | int) -> int:
    """(-1 | q)^f: relates a_q(J(a,b)) and a_q(J(b,a))."""
    if isinstance(prime, int):
        prime = split_prime(prime)[0]
    if prime.q == 2:
        raise ValueError("q must be odd")
    return 1 if pow(prime.q, prime.f, 4) == 1 else -1
