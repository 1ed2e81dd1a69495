"""Weight-2 modular symbols for Gamma_0(N), enough to list classical newforms.

Manin symbols (c : d) in P^1(Z/N) modulo the usual relations span the plus
quotient.  Hecke operators act through Heilbronn matrices.  The cuspidal part is the image of T_p - (p + 1) for a
good prime p (the Eisenstein part has eigenvalue p + 1 and cusp forms satisfy
|a_p| <= 2 sqrt p).  Splitting by T_p for good p gives isotypic pieces; a
system occurs once iff it is new.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import sympy
from sympy import divisors, factorint, primerange

from . import linalg as la
from .heckedata import NewformRecord, Q_FIELD
from .numfield import NFElement, NumberFieldSpec
from .polys import charpoly_rational_matrix


# ---------------------------------------------------------------------------
# dimension formulas
# ---------------------------------------------------------------------------


def genus_X0(N: int) -> int:
    """Genus of X_0(N), which is dim S_2(Gamma_0(N))."""
    fac = factorint(N)
    mu = N
    for p in fac:
        mu = mu * (p + 1) // p
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in fac:
            nu2 *= 1 + (0 if p == 2 else (1 if p % 4 == 1 else -1))
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in fac:
            nu3 *= 1 + (0 if p == 3 else (1 if p % 3 == 1 else -1))
    cusps = sum(sympy.totient(math.gcd(d, N // d)) for d in divisors(N))
    g = Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2) + 1
    assert g.denominator == 1
    return int(g)


@lru_cache(maxsize=None)
def new_dimension(N: int) -> int:
    """dim S_2^new(N) from g(N) = sum_{M | N} d(N/M) g_new(M)."""
    total = genus_X0(N)
    for M in divisors(N):
        if M != N:
            total -= len(divisors(N // M)) * new_dimension(M)
    return total


# ---------------------------------------------------------------------------
# P^1(Z/N) and Manin symbols
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def p1_list(N: int) -> tuple[tuple[tuple[int, int], ...], dict[tuple[int, int], int]]:
    """Representatives (lex-minimal in their unit orbit) and a lookup table."""
    if N == 1:
        return ((0, 0),), {(0, 0): 0}
    units = [u for u in range(1, N) if math.gcd(u, N) == 1]
    index: dict[tuple[int, int], int] = {}
    reps: list[tuple[int, int]] = []
    for c in range(N):
        for d in range(N):
            if (c, d) in index or math.gcd(math.gcd(c, d), N) != 1:
                continue
            i = len(reps)
            reps.append((c, d))
            for u in units:
                index[(u * c % N, u * d % N)] = i
    return tuple(reps), index


@lru_cache(maxsize=64)
def heilbronn_matrices(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """Matrices [a b; c d] of determinant n with a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, n + 1):
        q, r = divmod(n, a)
        if r == 0:
            d = q
            for b in range(a):
                out.append((a, b, 0, d))
            for c in range(1, d):
                out.append((a, 0, c, d))
        for d in range(q + 1, n + 1):
            bc = a * d - n
            for c in range(bc // a + 1, d):
                if bc % c == 0:
                    out.append((a, bc // c, c, d))
    return tuple(out)


class ModularSymbols:
    """Plus quotient of weight-2 modular symbols for Gamma_0(N)."""

    def __init__(self, N: int, sign: int = 1):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.N = N
        self.sign = sign
        self.reps, self.index = p1_list(N)
        self._build()

    def _lookup(self, c: int, d: int) -> int | None:
        return self.index.get((c % self.N, d % self.N)) if self.N > 1 else 0

    def _build(self) -> None:
        n = len(self.reps)
        N = self.N
        # two-term and star relations: x_i = s * x_j
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for i, (c, d) in enumerate(self.reps):
            j = self._lookup(d, -c)  # x + x S = 0
            adj[i].append((j, -1))
            adj[j].append((i, -1))
            k = self._lookup(-c, d)  # x = sign * x eta
            adj[i].append((k, self.sign))
            adj[k].append((i, self.sign))
        root = [-1] * n
        coef = [0] * n
        zero_roots: set[int] = set()
        for s in range(n):
            if root[s] != -1:
                continue
            root[s], coef[s] = s, 1
            stack = [s]
            while stack:
                i = stack.pop()
                for j, c in adj[i]:
                    want = coef[i] * c
                    if root[j] == -1:
                        root[j], coef[j] = s, want
                        stack.append(j)
                    elif coef[j] != want:
                        zero_roots.add(s)
        # three-term relations among roots
        pivots: dict[int, dict[int, Fraction]] = {}
        for i, (c, d) in enumerate(self.reps):
            row: dict[int, Fraction] = {}
            for (cc, dd) in ((c, d), (d, -c - d), (-c - d, c)):
                j = self._lookup(cc, dd)
                r = root[j]
                if r in zero_roots:
                    continue
                row[r] = row.get(r, Fraction(0)) + coef[j]
            row = {k: v for k, v in row.items() if v}
            self._add_row(pivots, row)
        free = sorted(r for r in set(root) if r not in zero_roots and r not in pivots)
        pos = {r: t for t, r in enumerate(free)}
        self.free = free
        self.dim = len(free)
        root_expr: dict[int, dict[int, Fraction]] = {}
        for r in set(root):
            if r in zero_roots:
                root_expr[r] = {}
            elif r in pivots:
                root_expr[r] = {pos[v]: -x for v, x in pivots[r].items() if v != r}
            else:
                root_expr[r] = {pos[r]: Fraction(1)}
        self.expr: list[dict[int, Fraction]] = []
        for i in range(n):
            e = root_expr[root[i]]
            self.expr.append({k: v * coef[i] for k, v in e.items()})

    @staticmethod
    def _add_row(pivots: dict[int, dict[int, Fraction]], row: dict[int, Fraction]) -> None:
        for v in [v for v in row if v in pivots]:
            if v not in row:
                continue
            f = row[v]
            for w, x in pivots[v].items():
                row[w] = row.get(w, Fraction(0)) - f * x
            row = {k: x for k, x in row.items() if x}
        row = {k: x for k, x in row.items() if x}
        if not row:
            return
        p = max(row)
        inv = 1 / row[p]
        row = {k: x * inv for k, x in row.items()}
        for v, prow in pivots.items():
            if p in prow:
                f = prow[p]
                for w, x in row.items():
                    prow[w] = prow.get(w, Fraction(0)) - f * x
                for k in [k for k, x in prow.items() if not x]:
                    del prow[k]
        pivots[p] = row

    def hecke_matrix(self, n: int) -> la.Matrix:
        """Matrix of T_n on the free basis (columns are images)."""
        return _hecke_cached(self, n)

    def _hecke_uncached(self, n: int) -> la.Matrix:
        H = heilbronn_matrices(n)
        cols = []
        for r in self.free:
            c, d = self.reps[r]
            acc: dict[int, Fraction] = {}
            for a, b, cc, dd in H:
                j = self._lookup(c * a + d * cc, c * b + d * dd)
                if j is None:
                    continue
                for k, x in self.expr[j].items():
                    acc[k] = acc.get(k, Fraction(0)) + x
            cols.append([acc.get(k, Fraction(0)) for k in range(self.dim)])
        return la.transpose(cols)

    def _lift(self, c: int, d: int) -> tuple[int, int, int, int]:
        """A matrix [a b; c' d'] in SL_2(Z) whose bottom row lifts (c : d)."""
        N = self.N
        if c == 0:
            c = N if N > 1 else 0
            if c == 0:
                return (1, 0, 0, 1)
        while math.gcd(c, d) != 1:
            d += N
        g, x, y = _ext_gcd(d, c)  # x d + y c = 1
        return (x, -y, c, d)

    def boundary_matrix(self) -> la.Matrix:
        """Boundary map to the plus-quotient cusp space (rows: cusp classes)."""
        classes: list[tuple[int, int]] = []

        def cls(u: int, v: int) -> int:
            g = math.gcd(u, v)
            u, v = u // g, v // g
            for i, (u2, v2) in enumerate(classes):
                if cusps_equivalent(u, v, u2, v2, self.N) or cusps_equivalent(-u, v, u2, v2, self.N):
                    return i
            classes.append((u, v))
            return len(classes) - 1

        cols = []
        for r in self.free:
            a, b, c, d = self._lift(*self.reps[r])
            col: dict[int, int] = {}
            i = cls(a, c)
            col[i] = col.get(i, 0) + 1
            j = cls(b, d)
            col[j] = col.get(j, 0) - 1
            cols.append(col)
        return [[Fraction(col.get(i, 0)) for col in cols] for i in range(len(classes))]

    @cached_property
    def cuspidal_basis(self) -> list[list[Fraction]]:
        return la.kernel(self.boundary_matrix(), self.dim)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def cusps_equivalent(u1: int, v1: int, u2: int, v2: int, N: int) -> bool:
    """Gamma_0(N)-equivalence of u1/v1 and u2/v2 (coprime pairs, 1/0 is infinity)."""

    def s_of(u: int, v: int) -> int:
        if v == 0:
            return u  # u = +-1
        if abs(v) == 1:
            return 0
        return pow(u, -1, abs(v))

    m = math.gcd(v1 * v2, N)
    return (s_of(u1, v1) * v2 - s_of(u2, v2) * v1) % m == 0


_HECKE: dict[tuple[int, int, int], la.Matrix] = {}


def _hecke_cached(M: ModularSymbols, n: int) -> la.Matrix:
    key = (M.N, M.sign, n)
    if key not in _HECKE:
        _HECKE[key] = M._hecke_uncached(n)
    return _HECKE[key]


# ---------------------------------------------------------------------------
# decomposition into newforms
# ---------------------------------------------------------------------------


@dataclass
class Piece:
    basis: list[list[Fraction]]  # columns, in cuspidal coordinates
    field_degree: int = 1

    @property
    def dim(self) -> int:
        return len(self.basis)


def _factor_int_poly(cp: Sequence[Fraction]) -> list[tuple[list[int], int]]:
    X = sympy.symbols("X")
    poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in cp])), X)
    _, facs = sympy.factor_list(poly)
    out = []
    for f, e in facs:
        coeffs = [int(c) for c in reversed(sympy.Poly(f, X).all_coeffs())]
        if coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        out.append((coeffs, e))
    return out


class NewformDecomposition:
    """Newforms of S_2(Gamma_0(N)) with eigenvalues at primes below a bound."""

    def __init__(self, N: int, split_bound: int | None = None):
        self.N = N
        self.M = ModularSymbols(N, 1)
        self.S = self.M.cuspidal_basis
        if len(self.S) != genus_X0(N):
            raise ArithmeticError(f"cuspidal dimension {len(self.S)} != genus {genus_X0(N)}")
        self.split_bound = split_bound or max(40, self.sturm_bound())
        self._T: dict[int, la.Matrix] = {}

    def sturm_bound(self) -> int:
        mu = self.N
        for p in factorint(self.N):
            mu = mu * (p + 1) // p
        return mu // 6 + 1

    def T_on_S(self, n: int) -> la.Matrix:
        if n not in self._T:
            self._T[n] = la.restrict(self.M.hecke_matrix(n), self.S)
        return self._T[n]

    def pieces(self) -> list[Piece]:
        g = len(self.S)
        pieces = [Piece([[Fraction(int(i == j)) for i in range(g)] for j in range(g)])]
        for p in primerange(3, self.split_bound + 1):
            if self.N % p == 0:
                continue
            T = self.T_on_S(p)
            nxt = []
            for pc in pieces:
                A = la.restrict(T, pc.basis)
                facs = _factor_int_poly(charpoly_rational_matrix(A))
                deg = max(len(f) - 1 for f, _ in facs)
                if len(facs) == 1:
                    pc.field_degree = max(pc.field_degree, deg)
                    nxt.append(pc)
                    continue
                for f, _ in facs:
                    K = la.kernel(la.poly_eval_matrix(f, A))
                    sub = [la.matvec(la.columns_to_matrix(pc.basis), v) for v in K]
                    nxt.append(Piece(sub, max(pc.field_degree, len(f) - 1)))
            pieces = nxt
        return pieces

    def new_pieces(self) -> list[Piece]:
        new = [pc for pc in self.pieces() if pc.dim == pc.field_degree]
        if sum(pc.dim for pc in new) != new_dimension(self.N):
            raise ArithmeticError(
                f"level {self.N}: new pieces have total dimension "
                f"{sum(pc.dim for pc in new)}, expected {new_dimension(self.N)}"
            )
        return new

    def eigenvalues(self, piece: Piece, primes: Sequence[int]) -> tuple[NumberFieldSpec, dict[int, NFElement]]:
        d = piece.dim
        gen_op = None
        for p in primerange(3, self.split_bound + 1):
            if self.N % p == 0:
                continue
            A = la.restrict(self.T_on_S(p), piece.basis)
            cp = charpoly_rational_matrix(A)
            facs = _factor_int_poly(cp)
            if len(facs) == 1 and facs[0][1] == 1:
                gen_op, poly = A, facs[0][0]
                break
        if gen_op is None:
            raise ArithmeticError("no single Hecke operator generates the Hecke field")
        spec = NumberFieldSpec(tuple(poly)) if d > 1 else Q_FIELD
        v = [Fraction(int(i == 0)) for i in range(d)]
        kry = [v]
        for _ in range(d - 1):
            kry.append(la.matvec(gen_op, kry[-1]))
        out: dict[int, NFElement] = {}
        for q in primes:
            B = la.restrict(self.T_on_S(q), piece.basis)
            c = la.solve_in_span(kry, la.matvec(B, v))
            out[q] = NFElement(spec, tuple(c))
        return spec, out

    def records(self, bound: int = 41, label_prefix: str | None = None) -> list[NewformRecord]:
        primes = list(primerange(2, bound))
        recs = []
        for pc in self.new_pieces():
            spec, eig = self.eigenvalues(pc, primes)
            recs.append((spec, eig))
        recs.sort(key=lambda r: (r[0].degree, [_tr(r[1][q]) for q in primes]))
        out = []
        prefix = label_prefix or str(self.N)
        for i, (spec, eig) in enumerate(recs):
            out.append(
                NewformRecord(
                    label=f"{prefix}.{_letters(i)}",
                    base_field="Q",
                    level=self.N,
                    hecke_field=spec,
                    eigenvalues=eig,
                    provenance="fixture",
                    complete_below_norm=bound,
                )
            )
        return out


def _tr(a: NFElement) -> Fraction:
    return -Fraction(a.charpoly()[-2])


def _letters(i: int) -> str:
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(ord("a") + r) + s
    return s


def classical_newforms(N: int, bound: int = 41) -> list[NewformRecord]:
    """Newform records of weight 2 and level N, eigenvalues at primes < bound."""
    return NewformDecomposition(N).records(bound)
