"""Norm-gcd elimination for the E, F and J Frey objects.

Every bound is a product of per-residue-pair terms.  A prime p can only be the
exponent of a solution whose residual representation matches ``form`` if p
divides the bound (or p = q).  Terms are kept with multiplicities so the full
integer is available, but survivor sets only need their prime support.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .frey import CaseDescriptor, FreyE, FreyF, KLevel, ObjectKind, delta_for_case
from .heckedata import NewformRecord, PrimeKey, contains_K
from .numfield import (
    IndexDivisorError,
    KElement,
    NFElement,
    PrimeIdealK,
    ResidueMap,
    k_in_field,
    nf_norm,
    residue_maps_mod_p,
    split_prime,
)
from .traces import (
    BadReduction,
    count_points_E,
    count_points_F,
    projective_classes,
    symmetry_sign,
    chi7_sign,
    trace_set,
)

TRIAL_LIMIT = 10**6
EXCLUDED = frozenset({2, 3, 7})


class EmbeddingUnavailable(ValueError):
    """The Hecke field does not (provably) contain K."""


# ---------------------------------------------------------------------------
# bounds and factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    primes: frozenset[int]
    unfactored: tuple[int, ...] = ()


def factor_bound(n: int, limit: int = TRIAL_LIMIT) -> Factorization:
    """Prime support of |n| by trial division to ``limit``.

    A leftover cofactor is reported as prime when it is a proven prime (BPSW
    in sympy, deterministic in this range for the sizes that occur) or below
    limit^2, and as unfactored mass otherwise.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("zero has no finite prime support")
    try:
        facs = sympy.factorint(n, limit=limit, use_rho=False, use_pm1=False, use_ecm=False)
    except ValueError:
        # sympy 1.14: the Fermat step can push a composite cofactor into its cache
        facs = _trial_divide(n, limit)
    primes, rest = set(), []
    for f in facs:
        if f <= limit or f < limit * limit or sympy.isprime(f):
            primes.add(int(f))
        else:
            rest.append(int(f))
    return Factorization(frozenset(primes), tuple(sorted(rest)))


def _trial_divide(n: int, limit: int) -> dict[int, int]:
    facs: dict[int, int] = {}
    for p in sympy.primerange(2, limit + 1):
        if p * p > n:
            break
        while n % p == 0:
            facs[p] = facs.get(p, 0) + 1
            n //= p
    if n > 1:
        facs[n] = facs.get(n, 0) + 1
    return facs


@dataclass
class Bound:
    """B = prod term^mult over residue pairs; ``zero`` if some term vanished."""

    q: int
    variant: str = "standard"
    terms: dict[int, int] = field(default_factory=dict)
    zero: bool = False

    def add(self, term: int, mult: int = 1) -> None:
        if mult <= 0:
            return
        t = abs(int(term))
        if t == 0:
            self.zero = True
        elif t != 1:
            self.terms[t] = self.terms.get(t, 0) + mult

    @property
    def value(self) -> int:
        if self.zero:
            return 0
        out = 1
        for t, m in self.terms.items():
            out *= t**m
        return out

    def __int__(self) -> int:
        return self.value

    def support(self) -> int:
        """A number with the same prime support as B (0 if B = 0)."""
        if self.zero:
            return 0
        out = 1
        for t in self.terms:
            out = out * t // math.gcd(out, t)
        return out

    def survivors(self) -> Factorization:
        """Primes p >= 5, p != 7 that divide B, plus q itself."""
        if self.zero:
            raise ValueError("B = 0: every prime survives")
        f = factor_bound(self.support() * self.q)
        return Factorization(frozenset(p for p in f.primes if p not in EXCLUDED), f.unfactored)


def _int_norm(x: NFElement) -> int:
    n = nf_norm(x)
    n = Fraction(n)
    if n.denominator != 1:
        raise ArithmeticError("norm of an algebraic integer is not integral: bad eigenvalue data")
    return int(n)


@lru_cache(maxsize=1 << 16)
def _norm_minus(a: NFElement, b) -> int:
    return _int_norm(a - b)


@lru_cache(maxsize=1 << 16)
def _norm_sq_minus(a: NFElement, b) -> int:
    return _int_norm(a * a - b * b)


# ---------------------------------------------------------------------------
# E over Q
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _E_trace_table(q: int) -> tuple[tuple[tuple[int, int], int | None], ...]:
    out = []
    for x, y in projective_classes(q):
        try:
            out.append(((x, y), count_points_E(x, y, q)))
        except BadReduction:
            out.append(((x, y), None))
    return tuple(out)


def bound_E(form: NewformRecord, q: int) -> Bound:
    """B_q(f) = prod over (x, y) != (0, 0) mod q of N(a_q(f) - a_q(E_{x,y}))."""
    if q in (2, 7):
        raise ValueError("q must avoid 2 and 7")
    a = form.ap(q)
    B = Bound(q, "E")
    mult = q - 1  # E_{l x, l y} is isomorphic to E_{x, y}
    for _, t in _E_trace_table(q):
        if t is None:
            B.add(_norm_sq_minus(a, q + 1), mult)
        else:
            B.add(_norm_minus(a, t), mult)
    return B


# ---------------------------------------------------------------------------
# F over K
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _F_trace_table(q: int, delta: KElement) -> tuple[tuple[tuple[int, int], tuple[int | None, ...]], ...]:
    primes = split_prime(q)
    out = []
    for x, y in projective_classes(q):
        row = []
        for P in primes:
            try:
                row.append(count_points_F(x, y, delta, P))
            except BadReduction:
                row.append(None)
        out.append(((x, y), tuple(row)))
    return tuple(out)


def _resolve_delta(case_or_delta) -> KElement:
    if isinstance(case_or_delta, CaseDescriptor):
        return delta_for_case(case_or_delta)
    return KElement.coerce(case_or_delta)


def bound_F(form: NewformRecord, q: int, case_or_delta) -> Bound:
    """prod over (x, y) of gcd over q' | q of N(a_q'(g) - b_q'(x, y))."""
    if q in (2, 7):
        raise ValueError("q must avoid 2 and 7")
    delta = _resolve_delta(case_or_delta)
    primes = split_prime(q)
    a = [form.ap(P) for P in primes]
    B = Bound(q, "F")
    for _, traces in _F_trace_table(q, delta):
        g = 0
        for P, ap, t in zip(primes, a, traces):
            n = _norm_sq_minus(ap, P.norm + 1) if t is None else _norm_minus(ap, t)
            g = math.gcd(g, n)
        B.add(g, q - 1)
    return B


# ---------------------------------------------------------------------------
# J over K
# ---------------------------------------------------------------------------


def _embedding(form: NewformRecord, iota: NFElement | None) -> NFElement:
    if iota is not None:
        return iota
    ck = contains_K(form)
    if not ck:
        raise EmbeddingUnavailable(f"{form.label}: K is not known to lie in the Hecke field ({ck.status})")
    return ck.roots[0]


def _j_term(form: NewformRecord, P: PrimeIdealK, u: KElement, S: Sequence[int], iota: NFElement, squared: bool) -> int:
    g = 0
    for k in S:
        a = form.ap(P.sigma(k))
        v = k_in_field(u.sigma(k), iota)
        n = _norm_sq_minus(v, a) if squared else _norm_minus(v, a)
        g = math.gcd(g, n)
    return g


def m_factor_J(form: NewformRecord, q: int, S: Sequence[int] = (0,)) -> int:
    """gcd over sigma in S of N(a_{sigma q}(g)^2 - (N q + 1)^2)."""
    P = split_prime(q)[0]
    g = 0
    for k in S:
        g = math.gcd(g, _norm_sq_minus(form.ap(P.sigma(k)), P.norm + 1))
    return g


def bound_J(
    form: NewformRecord,
    q: int,
    S: Sequence[int] = (0,),
    variant: str = "plain",
    iota: NFElement | None = None,
) -> Bound:
    """Trace-set bound for the Jacobian of C7.

    plain: all (x, y) != (0, 0) mod q.  symmetric: x <= y, needs q^f = 1 mod 4.
    squared: x <= y with squared differences (any q).  twistpair: M^2 times the
    squared product; covers a chi_7 twist pair at once when q^f = -1 mod 7.
    """
    if q in (2, 7):
        raise ValueError("q must avoid 2 and 7")
    if variant not in ("plain", "symmetric", "squared", "twistpair"):
        raise ValueError(f"unknown variant {variant}")
    P = split_prime(q)[0]
    if variant == "symmetric" and symmetry_sign(P) != 1:
        raise ValueError("symmetric variant needs q^f = 1 mod 4; use squared")
    if variant == "twistpair" and (chi7_sign(P) != -1 or symmetry_sign(P) != 1):
        raise ValueError("twist-pair variant needs q^f = -1 mod 7 and q^f = 1 mod 4")
    iota = _embedding(form, iota)
    S = tuple(S)
    B = Bound(q, variant)
    M = m_factor_J(form, q, S)
    B.add(M, 2 if variant == "twistpair" else 1)
    squared = variant in ("squared", "twistpair")
    if variant == "plain":
        half = (q - 1) // 2
        for x, y in projective_classes(q):
            if (x**7 + y**7) % q == 0:
                continue
            T = trace_set(x, y, q)
            for u in T.elements:
                B.add(_j_term(form, P, u, S, iota, False), half)
                B.add(_j_term(form, P, -u, S, iota, False), half)
        return B
    for x in range(q):
        for y in range(x, q):
            if (x, y) == (0, 0) or (x**7 + y**7) % q == 0:
                continue
            for u in trace_set(x, y, q).elements:
                B.add(_j_term(form, P, u, S, iota, squared))
    return B


# ---------------------------------------------------------------------------
# refined elimination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinedResult:
    status: str  # "eliminated", "survives", "survives-with-caveat"
    witness: tuple | None = None
    note: str = ""

    @property
    def eliminated(self) -> bool:
        return self.status == "eliminated"


def refined_eliminate(
    form: NewformRecord,
    p: int,
    q: int,
    family: ObjectKind | str,
    delta: KElement | None = None,
) -> RefinedResult:
    """Decide (form, p) modulo each prime of the Hecke field above p.

    The pair survives if for some prime above p some residue pair (x, y)
    satisfies the congruences at every prime of K above q at once.
    """
    family = ObjectKind(family)
    if p == q:
        return RefinedResult("survives", note="p equals the auxiliary prime")
    try:
        maps = residue_maps_mod_p(form.hecke_field, p)
    except IndexDivisorError as exc:
        return RefinedResult("survives-with-caveat", note=str(exc))
    for idx, red in enumerate(maps):
        w = _refined_witness(form, red, q, family, delta)
        if w is not None:
            return RefinedResult("survives", witness=(idx,) + w)
    return RefinedResult("eliminated")


def _refined_witness(form, red: ResidueMap, q: int, family: ObjectKind, delta) -> tuple | None:
    if family is ObjectKind.E:
        a = red(form.ap(q))
        for (x, y), t in _E_trace_table(q):
            if t is None:
                if red(form.ap(q) ** 2) == red((q + 1) ** 2):
                    return ((x, y),)
            elif a == red(t):
                return ((x, y),)
        return None
    primes = split_prime(q)
    if family is ObjectKind.F:
        delta = KElement(1) if delta is None else KElement.coerce(delta)
        res = [red(form.ap(P)) for P in primes]
        res_sq = [red(form.ap(P) ** 2) for P in primes]
        for (x, y), traces in _F_trace_table(q, delta):
            ok = True
            for P, r, r2, t in zip(primes, res, res_sq, traces):
                if t is None:
                    ok = r2 == red((P.norm + 1) ** 2)
                else:
                    ok = r == red(t)
                if not ok:
                    break
            if ok:
                return ((x, y),)
        return None
    # J: the identification of K inside the Hecke field is unknown, try all roots
    ck = contains_K(form)
    if not ck:
        raise EmbeddingUnavailable(f"{form.label}: K is not known to lie in the Hecke field")
    P0 = primes[0]
    ks = range(len(primes))
    res = [red(form.ap(P0.sigma(k))) for k in ks]
    res_sq = [red(form.ap(P0.sigma(k)) ** 2) for k in ks]
    for iota in ck.roots:
        for x, y in projective_classes(q):
            if (x**7 + y**7) % q == 0:
                if all(r2 == red((P0.norm + 1) ** 2) for r2 in res_sq):
                    return (repr(iota), (x, y))
                continue
            T = trace_set(x, y, q)
            for sgn in (1, -1):
                for u in T.elements:
                    if all(red.from_k(sgn * u.sigma(k), iota) == res[k] for k in ks):
                        return (repr(iota), (x, y), sgn)
    return None


# ---------------------------------------------------------------------------
# reducibility witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessResult:
    status: str  # "witnessed", "refuted", "inconclusive"
    prime_index: int | None = None
    failing: PrimeKey | None = None
    primes_above_p: int = 0


def reducibility_witness(form: NewformRecord, p: int, prime_bound: int) -> WitnessResult:
    """Eisenstein congruence a_q = N(q) + 1 mod some prime above p, for N(q) <= bound."""
    try:
        maps = residue_maps_mod_p(form.hecke_field, p)
    except IndexDivisorError:
        return WitnessResult("inconclusive")
    keys = [
        k
        for k in form.good_primes()
        if (k if isinstance(k, int) else k.norm) <= prime_bound and (k if isinstance(k, int) else k.q) != p
    ]
    if not keys:
        return WitnessResult("inconclusive", primes_above_p=len(maps))
    first_fail = None
    for idx, red in enumerate(maps):
        fail = None
        for k in keys:
            n = k if isinstance(k, int) else k.norm
            if red(form.ap(k)) != red(n + 1):
                fail = k
                break
        if fail is None:
            return WitnessResult("witnessed", idx, primes_above_p=len(maps))
        first_fail = first_fail if first_fail is not None else fail
    return WitnessResult("refuted", failing=first_fail, primes_above_p=len(maps))


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuxiliaryPrimePlan:
    q: int
    S: tuple[int, ...] = (0,)
    mode: str = "standard"  # standard, symmetric, squared, twistpair, refined

    def __post_init__(self):
        if self.mode not in ("standard", "symmetric", "squared", "twistpair", "refined"):
            raise ValueError(f"unknown mode {self.mode}")


@dataclass
class SurvivorReport:
    label: str
    fingerprint: str
    status: dict[int, str] = field(default_factory=dict)
    unfactored: list[int] = field(default_factory=list)
    self_survivor: bool = False
    flagged: list[str] = field(default_factory=list)
    bounds: dict[str, dict[str, str]] = field(default_factory=dict)

    @property
    def survivors(self) -> list[int]:
        return sorted(p for p, s in self.status.items() if s == "survives" or s.startswith("survives"))

    @property
    def eliminated(self) -> bool:
        return not self.self_survivor and not self.survivors and not self.unfactored

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "fingerprint": self.fingerprint,
            "self_survivor": self.self_survivor,
            "survivors": self.survivors,
            "status": {str(p): s for p, s in sorted(self.status.items())},
            "unfactored": [str(n) for n in self.unfactored],
            "flagged": list(self.flagged),
            "bounds": dict(sorted(self.bounds.items())),
        }


def _bound_for(form: NewformRecord, plan: AuxiliaryPrimePlan, family: ObjectKind, delta) -> Bound:
    if family is ObjectKind.E:
        return bound_E(form, plan.q)
    if family is ObjectKind.F:
        return bound_F(form, plan.q, delta)
    variant = {"standard": "plain"}.get(plan.mode, plan.mode)
    return bound_J(form, plan.q, plan.S, variant)


def survivor_sweep(
    plans: Sequence[AuxiliaryPrimePlan],
    forms: Iterable[NewformRecord],
    family: ObjectKind | str,
    delta: KElement | None = None,
    witness_bound: int | None = None,
) -> list[SurvivorReport]:
    """Standard bounds, then refined passes and the Eisenstein witness."""
    family = ObjectKind(family)
    std = [pl for pl in plans if pl.mode != "refined"]
    refined = [pl for pl in plans if pl.mode == "refined"]
    reports = []
    for form in forms:
        rep = SurvivorReport(form.label, form.fingerprint())
        G = 0
        qs = []
        for pl in std:
            B = _bound_for(form, pl, family, delta)
            key = f"q={pl.q}:{pl.mode}"
            rep.bounds[key] = bound_entry(B)
            if B.zero:
                # no information from this q
                continue
            G = math.gcd(G, B.support() * pl.q)
            qs.append(pl.q)
        if G == 0:
            rep.self_survivor = True
            reports.append(rep)
            continue
        fac = factor_bound(G)
        rep.unfactored = list(fac.unfactored)
        for p in sorted(fac.primes):
            if p in EXCLUDED:
                continue
            if p in qs:
                rep.flagged.append(f"p={p} equals an auxiliary prime")
            rep.status[p] = "survives"
        for p in list(rep.status):
            for pl in refined:
                r = refined_eliminate(form, p, pl.q, family, delta)
                if r.eliminated:
                    rep.status[p] = f"eliminated-by(refined q={pl.q})"
                    break
                if r.status == "survives-with-caveat":
                    rep.status[p] = "survives-with-caveat(index divisor)"
        if witness_bound:
            for p in rep.survivors:
                w = reducibility_witness(form, p, witness_bound)
                if w.status == "witnessed" and w.primes_above_p == 1:
                    rep.status[p] = f"eliminated-by(eisenstein bound={witness_bound})"
        reports.append(rep)
    return reports


def standard_survivors(form: NewformRecord, qs: Sequence[int], bound_fn) -> tuple[set[int], bool]:
    """Survivor primes from several auxiliary primes; second item flags B = 0 everywhere."""
    G = 0
    for q in qs:
        B = bound_fn(form, q)
        if not B.zero:
            G = math.gcd(G, B.support() * q)
    if G == 0:
        return set(), True
    fac = factor_bound(G)
    return {p for p in fac.primes if p not in EXCLUDED} | set(fac.unfactored), False


def bound_entry(B: Bound) -> dict[str, str]:
    """Short display plus a digest of the exact support, for re-verification."""
    if B.zero:
        return {"value": "0", "sha256": hashlib.sha256(b"0").hexdigest()}
    n = B.support()
    return {"value": _short(n), "sha256": hashlib.sha256(str(n).encode()).hexdigest()}


def _short(n: int) -> str:
    s = str(n)
    return s if len(s) <= 60 else f"{s[:20]}...({len(s)} digits)"
