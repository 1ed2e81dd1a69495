"""Frey objects attached to a putative solution of x^7 + y^7 = d z^p.

The elliptic curves are E_{a,b} over Q and F_{a,b} over K (full 2-torsion,
with its quadratic twists).  The genus-3 hyperelliptic curve C7(a,b) stands
for its Jacobian.  The module also carries the case analysis on a, b, Serre
levels and the routing tables that say which object handles which case.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .numfield import (
    KElement,
    OMEGA1,
    OMEGA2,
    PrimeIdealK,
    k_norm,
    k_valuation,
)


def phi7(a: int, b: int) -> int:
    """(a^7 + b^7) / (a + b) as the binary sextic (valid when a + b = 0 too)."""
    return sum((-1) ** i * a ** (6 - i) * b**i for i in range(7))


def v_p(n: int, p: int) -> int | float:
    """p-adic valuation with v(0) = infinity (0 is divisible by everything)."""
    if n == 0:
        return math.inf
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def divides(m: int, n: int) -> bool:
    return n % m == 0


def exactly_divides(pk: int, p: int, n: int) -> bool:
    """p^k || n, written with pk = p^k."""
    return n != 0 and n % pk == 0 and (n // pk) % p != 0


# ---------------------------------------------------------------------------
# E over Q
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreyE:
    """E_{a,b}: Y^2 = X^3 + a2 X^2 + a4 X + a6."""

    a: int
    b: int

    @property
    def a2(self) -> int:
        return -((self.a - self.b) ** 2)

    @property
    def a4(self) -> int:
        a, b = self.a, self.b
        return -2 * a**4 + a**3 * b - 5 * a**2 * b**2 + a * b**3 - 2 * b**4

    @property
    def a6(self) -> int:
        a, b = self.a, self.b
        return (
            a**6 - 6 * a**5 * b + 8 * a**4 * b**2 - 13 * a**3 * b**3
            + 8 * a**2 * b**4 - 6 * a * b**5 + b**6
        )

    @property
    def coefficients(self) -> tuple[int, int, int]:
        return (self.a2, self.a4, self.a6)

    @property
    def c4(self) -> int:
        a, b = self.a, self.b
        return 2**4 * 7 * (a**4 - a**3 * b + 3 * a**2 * b**2 - a * b**3 + b**4)

    @property
    def c6(self) -> int:
        # sign fixed by the model (a2, a4, a6); the commonly quoted closed form
        # 2^5 7 (a^6 - 15 a^5 b + ...) is its negative
        a, b = self.a, self.b
        return -(2**5) * 7 * (
            a**6 - 15 * a**5 * b + 15 * a**4 * b**2 - 29 * a**3 * b**3
            + 15 * a**2 * b**4 - 15 * a * b**5 + b**6
        )

    @property
    def discriminant(self) -> int:
        return 2**4 * 7**2 * phi7(self.a, self.b) ** 2

    def model_invariants(self) -> tuple[int, int, int]:
        """(c4, c6, disc) recomputed from a2, a4, a6 with the usual b-invariants."""
        a2, a4, a6 = self.coefficients
        b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
        b8 = 4 * a2 * a6 - a4 * a4
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        return c4, c6, disc


# ---------------------------------------------------------------------------
# F over K and its twists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreyF:
    """F_{a,b}^{(delta)}: y^2 = x (x - delta A)(x + delta B) over K."""

    a: int
    b: int
    delta: KElement = field(default_factory=lambda: KElement(1))

    @cached_property
    def A(self) -> KElement:
        return (OMEGA2 - OMEGA1) * ((self.a + self.b) ** 2)

    @cached_property
    def B(self) -> KElement:
        a, b = self.a, self.b
        return (2 - OMEGA2) * (KElement(a * a + b * b) + OMEGA1 * (a * b))

    @cached_property
    def C(self) -> KElement:
        return -(self.A + self.B)

    def C_closed_form(self) -> KElement:
        a, b = self.a, self.b
        return (OMEGA1 - 2) * (KElement(a * a + b * b) + OMEGA2 * (a * b))

    @property
    def twisted_roots(self) -> tuple[KElement, KElement]:
        """(delta A, -delta B): the nonzero roots of the cubic."""
        return (self.delta * self.A, -(self.delta * self.B))

    @property
    def a_invariants(self) -> tuple[KElement, KElement, KElement]:
        """(a2, a4, a6) of the model."""
        r1, r2 = self.twisted_roots
        return (-(r1 + r2), r1 * r2, KElement(0))

    @cached_property
    def c4(self) -> KElement:
        A, B = self.A, self.B
        return self.delta**2 * (16 * (A * A + A * B + B * B))

    @cached_property
    def c6(self) -> KElement:
        A, B = self.A, self.B
        return self.delta**3 * (32 * (2 * A**3 + 3 * A * A * B - 3 * A * B * B - 2 * B**3))

    @cached_property
    def discriminant(self) -> KElement:
        return self.delta**6 * (16 * (self.A * self.B * self.C) ** 2)

    def twist(self, delta: KElement) -> "FreyF":
        return FreyF(self.a, self.b, self.delta * delta)

    def bad_factor(self) -> KElement:
        """(a+b)(a^2 + w1 ab + b^2)(a^2 + w2 ab + b^2)."""
        a, b = self.a, self.b
        f1 = KElement(a * a + b * b) + OMEGA1 * (a * b)
        f2 = KElement(a * a + b * b) + OMEGA2 * (a * b)
        return f1 * f2 * (a + b)


# ---------------------------------------------------------------------------
# C7 over Q
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreyC7:
    """Hyperelliptic Frey curve y^2 = x^7 + 7ab x^5 + 14a^2b^2 x^3 + 7a^3b^3 x + b^7 - a^7."""

    a: int
    b: int

    @property
    def coefficients(self) -> tuple[int, ...]:
        a, b = self.a, self.b
        return (b**7 - a**7, 7 * a**3 * b**3, 0, 14 * a**2 * b**2, 0, 7 * a * b, 0, 1)

    @property
    def discriminant(self) -> int:
        return -(2**12) * 7**7 * (self.a**7 + self.b**7) ** 6

    def has_good_reduction(self, q: int) -> bool:
        return q not in (2, 7) and (self.a**7 + self.b**7) % q != 0

    @property
    def has_cm(self) -> bool:
        return self.a * self.b == 0


FreyObject = Union[FreyE, FreyF, FreyC7]


# ---------------------------------------------------------------------------
# case descriptors
# ---------------------------------------------------------------------------


class TwoCase(str, enum.Enum):
    ODD_AB = "odd_ab"
    TWO_EXACT = "two_exact"
    FOUR_DIVIDES = "four_divides"


class SevenCase(str, enum.Enum):
    COPRIME = "7_not_div"
    DIVIDES = "7_div"


class Route(str, enum.Enum):
    ELLIPTIC_ONLY = "elliptic_only"
    J_MAX = "j_max"
    FASTEST = "fastest"

    @classmethod
    def parse(cls, s: str) -> "Route":
        return cls(s.replace("-", "_"))


class CaseError(ValueError):
    """Residue data incompatible with the shape of the equation."""


def two_case_of(a: int, b: int) -> TwoCase:
    ab = a * b
    if ab % 4 == 0:
        return TwoCase.FOUR_DIVIDES
    if ab % 2 == 0:
        return TwoCase.TWO_EXACT
    return TwoCase.ODD_AB


def seven_case_of(a: int, b: int) -> SevenCase:
    return SevenCase.DIVIDES if (a + b) % 7 == 0 else SevenCase.COPRIME


@dataclass(frozen=True)
class CaseDescriptor:
    d: int
    two_case: TwoCase
    seven_case: SevenCase
    route: Route = Route.FASTEST

    def __post_init__(self):
        if self.d not in (1, 3):
            raise CaseError("d must be 1 or 3")
        object.__setattr__(self, "two_case", TwoCase(self.two_case))
        object.__setattr__(self, "seven_case", SevenCase(self.seven_case))
        object.__setattr__(self, "route", Route(self.route))

    @classmethod
    def from_solution(cls, a: int, b: int, d: int = 3, route: Route | str = Route.FASTEST) -> "CaseDescriptor":
        if math.gcd(a, b) != 1:
            raise CaseError("a and b must be coprime")
        if d == 3:
            check_shape_d3(a, b)
        return cls(d, two_case_of(a, b), seven_case_of(a, b), Route(route))

    @property
    def seven_divides(self) -> bool:
        return self.seven_case is SevenCase.DIVIDES

    @property
    def key(self) -> str:
        return f"d{self.d}/{self.two_case.value}/{self.seven_case.value}"


def check_shape_d3(a: int, b: int) -> None:
    """For d = 3: 3 | a + b, and 2 | a + b forces 8 | a + b."""
    s = a + b
    if s % 3 != 0:
        raise CaseError("d = 3 forces 3 | a + b")
    if s % 2 == 0 and s % 8 != 0:
        raise CaseError("d = 3 and 2 | a + b force 8 | a + b")


def all_cases(d: int = 3, route: Route = Route.FASTEST) -> list[CaseDescriptor]:
    return [CaseDescriptor(d, t, s, route) for t in TwoCase for s in SevenCase]


# ---------------------------------------------------------------------------
# conductor facts
# ---------------------------------------------------------------------------


def conductor_exponent_E_at_2(a: int, b: int) -> int:
    if math.gcd(a, b) != 1:
        raise CaseError("a and b must be coprime")
    if divides(4, a * b):
        return 2
    if exactly_divides(2, 2, a * b) or divides(4, a + b):
        return 3
    if exactly_divides(2, 2, a + b):
        return 4
    raise AssertionError("unreachable for coprime a, b")  # pragma: no cover


def semistability_defects_E(a: int, b: int) -> tuple[int, int]:
    """(e_2, e_7)."""
    e7 = 3 if divides(7, a + b) else 6
    e2 = 6 if divides(2, a * b) else 24
    return e2, e7


def conductor_E(a: int, b: int) -> int:
    """2^alpha 7^2 rad'(phi7(a, b)) with rad' the radical prime to 7."""
    from sympy import factorint

    n = 2 ** conductor_exponent_E_at_2(a, b) * 49
    for ell in factorint(abs(phi7(a, b))):
        if ell != 7:
            n *= ell
    return n


DELTA_TABLE: dict[tuple[TwoCase, SevenCase], KElement] = {
    (TwoCase.ODD_AB, SevenCase.COPRIME): KElement(-7),
    (TwoCase.ODD_AB, SevenCase.DIVIDES): KElement(1),
    (TwoCase.TWO_EXACT, SevenCase.COPRIME): -7 * OMEGA2,
    (TwoCase.TWO_EXACT, SevenCase.DIVIDES): OMEGA2,
    (TwoCase.FOUR_DIVIDES, SevenCase.COPRIME): KElement(-7),
    (TwoCase.FOUR_DIVIDES, SevenCase.DIVIDES): KElement(1),
}


def delta_for_case(case: CaseDescriptor) -> KElement:
    return DELTA_TABLE[(case.two_case, case.seven_case)]


@dataclass(frozen=True)
class KLevel:
    """An ideal q2^s q3^e q7^t of O_K, optionally tagged with a chi_7 twist."""

    q2: int = 0
    q3: int = 0
    q7: int = 0
    chi7_twist: bool = False

    @property
    def label(self) -> str:
        parts = []
        for name, e in (("q2", self.q2), ("q3", self.q3), ("q7", self.q7)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "".join(parts) or "1"

    @property
    def norm(self) -> int:
        return 8**self.q2 * 27**self.q3 * 7**self.q7

    def as_dict(self) -> dict[str, int]:
        return {"q2": self.q2, "q3": self.q3, "q7": self.q7}

    def untwisted(self) -> "KLevel":
        return KLevel(self.q2, self.q3, self.q7)

    @classmethod
    def parse(cls, label: str) -> "KLevel":
        s = label.strip().replace("*", "").replace(".", "").replace("_", "")
        if s in ("", "1"):
            return cls()
        exps = {"2": 0, "3": 0, "7": 0}
        pos = 0
        for m in re.finditer(r"q([237])(?:\^?(\d+))?", s):
            if m.start() != pos:
                raise ValueError(f"cannot parse level {label!r}")
            exps[m.group(1)] = int(m.group(2) or 1)
            pos = m.end()
        if pos != len(s):
            raise ValueError(f"cannot parse level {label!r}")
        return cls(exps["2"], exps["3"], exps["7"])

    def __str__(self) -> str:
        return self.label + (" (x chi7)" if self.chi7_twist else "")


def serre_level_F(case: CaseDescriptor, d: int | None = None) -> KLevel:
    d = case.d if d is None else d
    s = 1 if case.two_case is TwoCase.ODD_AB else 3
    t = 1 if case.seven_divides else 0
    return KLevel(s, 1 if d == 3 else 0, t)


def serre_level_J(case: CaseDescriptor, d: int | None = None) -> KLevel:
    """Level for J; needs the normalisation a = 0 mod 2, b = 1 mod 4 (so ab even)."""
    d = case.d if d is None else d
    if case.two_case is TwoCase.ODD_AB:
        raise CaseError("J needs a = 0 mod 2 and b = 1 mod 4, so ab must be even")
    if d == 1:
        return KLevel(2, 0, 2)
    if case.seven_divides:
        return KLevel(2, 1, 1, chi7_twist=True)
    return KLevel(2, 1, 2)


def check_J_normalisation(a: int, b: int) -> None:
    if a % 2 != 0 or b % 4 != 1:
        raise CaseError("J needs a = 0 mod 2 and b = 1 mod 4")


def serre_level_E(a: int, b: int) -> int:
    return 2 ** conductor_exponent_E_at_2(a, b) * 49


def _delta_class_mod_q2sq(delta: KElement) -> str:
    c = tuple(int(x) % 4 for x in delta.coords)
    if c == (1, 0, 0):
        return "one"
    if c == tuple(x % 4 for x in OMEGA2.coords):
        return "omega2"
    return "other"


def conductor_F_at_q2_q7(a: int, b: int, delta: KElement) -> tuple[int, int]:
    """(v_q2, v_q7) of the conductor of F_{a,b}^{(delta)}."""
    if math.gcd(a, b) != 1:
        raise CaseError("a and b must be coprime")
    if not delta.is_integral() or not delta:
        raise CaseError("delta must be a nonzero integral element")
    v7 = k_valuation(delta, 7)
    s = a + b
    if v7 == 0:
        t = 1 if divides(7, s) else 2
    elif v7 % 2 == 1 and not divides(7, s):
        t = 0
    else:
        raise CaseError("unsupported delta at q7")
    cls = _delta_class_mod_q2sq(delta)
    ab = a * b
    if cls == "one":
        if ab % 2 == 1:
            if exactly_divides(4, 2, s):
                u = 0
            elif divides(8, s):
                u = 1
            else:
                u = 4  # 2 || a+b
        elif divides(4, ab):
            u = 3
        else:
            u = 4
    elif cls == "omega2" and exactly_divides(2, 2, ab):
        u = 3
    else:
        raise CaseError("unsupported delta congruence class mod q2^2")
    return u, t


# ---------------------------------------------------------------------------
# reduction type at primes of good residue characteristic
# ---------------------------------------------------------------------------


class ReductionType(str, enum.Enum):
    GOOD = "good"
    MULTIPLICATIVE = "multiplicative"


def classify_reduction(curve: FreyE | FreyF, prime: PrimeIdealK | int) -> ReductionType:
    if isinstance(curve, FreyE):
        q = prime.q if isinstance(prime, PrimeIdealK) else int(prime)
        if q in (2, 7):
            raise ValueError("residue characteristic must avoid 2 and 7")
        return ReductionType.MULTIPLICATIVE if phi7(curve.a, curve.b) % q == 0 else ReductionType.GOOD
    if not isinstance(prime, PrimeIdealK):
        raise TypeError("F is classified at primes of K")
    if prime.q in (2, 7):
        raise ValueError("residue characteristic must avoid 2 and 7")
    return ReductionType.MULTIPLICATIVE if prime.divides(curve.bad_factor()) else ReductionType.GOOD


# ---------------------------------------------------------------------------
# routing
# ---------------------------------------------------------------------------


class ObjectKind(str, enum.Enum):
    E = "E"
    F = "F"
    J = "J"


@dataclass(frozen=True)
class PlanStep:
    """One Frey object to run for a case, with its level and auxiliary data."""

    kind: ObjectKind
    delta: KElement | None
    level: KLevel | int
    technique: str
    aux_primes: tuple[int, ...] = ()
    refined: tuple[int, ...] = ()

    @property
    def name(self) -> str:
        if self.kind is ObjectKind.F:
            if self.delta == KElement(1):
                return "F"
            return f"F^({delta_label(self.delta)})"
        return self.kind.value

    @property
    def level_label(self) -> str:
        return str(self.level) if isinstance(self.level, int) else self.level.label


def delta_label(delta: KElement | None) -> str:
    if delta is None:
        return "-"
    names = {
        KElement(1): "1",
        KElement(-7): "-7",
        OMEGA2: "w2",
        -7 * OMEGA2: "-7w2",
    }
    return names.get(delta, repr(delta))


_T = TwoCase
_S = SevenCase

# entries: object kind, using the bold/selected option of each table
ROUTE_TABLES: dict[Route, dict[tuple[TwoCase, SevenCase], ObjectKind]] = {
    Route.ELLIPTIC_ONLY: {
        (_T.ODD_AB, _S.COPRIME): ObjectKind.F,
        (_T.ODD_AB, _S.DIVIDES): ObjectKind.F,
        (_T.TWO_EXACT, _S.COPRIME): ObjectKind.F,
        (_T.TWO_EXACT, _S.DIVIDES): ObjectKind.F,
        (_T.FOUR_DIVIDES, _S.COPRIME): ObjectKind.F,
        (_T.FOUR_DIVIDES, _S.DIVIDES): ObjectKind.F,
    },
    Route.J_MAX: {
        (_T.ODD_AB, _S.COPRIME): ObjectKind.F,
        (_T.ODD_AB, _S.DIVIDES): ObjectKind.F,
        (_T.TWO_EXACT, _S.COPRIME): ObjectKind.J,
        (_T.TWO_EXACT, _S.DIVIDES): ObjectKind.J,
        (_T.FOUR_DIVIDES, _S.COPRIME): ObjectKind.J,
        (_T.FOUR_DIVIDES, _S.DIVIDES): ObjectKind.J,
    },
    Route.FASTEST: {
        (_T.ODD_AB, _S.COPRIME): ObjectKind.E,
        (_T.ODD_AB, _S.DIVIDES): ObjectKind.F,
        (_T.TWO_EXACT, _S.COPRIME): ObjectKind.E,
        (_T.TWO_EXACT, _S.DIVIDES): ObjectKind.J,
        (_T.FOUR_DIVIDES, _S.COPRIME): ObjectKind.F,
        (_T.FOUR_DIVIDES, _S.DIVIDES): ObjectKind.J,
    },
}

#: default auxiliary primes and refined-elimination primes for F, per case
F_AUX: dict[tuple[TwoCase, SevenCase], tuple[tuple[int, ...], tuple[int, ...]]] = {
    (_T.ODD_AB, _S.COPRIME): ((5, 13, 29), ()),
    (_T.TWO_EXACT, _S.COPRIME): ((13, 29, 41), (13,)),
    (_T.FOUR_DIVIDES, _S.COPRIME): ((5, 13, 29, 41), (13,)),
    (_T.ODD_AB, _S.DIVIDES): ((5, 13, 29, 41), (29,)),
    (_T.TWO_EXACT, _S.DIVIDES): ((5, 13, 29, 41), (83, 29)),
    (_T.FOUR_DIVIDES, _S.DIVIDES): ((5, 13, 29, 41), (83, 41, 29)),
}

J_AUX_PLAIN = (5, 11, 13, 17, 29)
J_AUX_TWISTED = (5, 11, 13)
J_AUX_D1 = (3, 13)
J_REFINED = (29,)


def e_aux_primes(bound: int = 40) -> tuple[int, ...]:
    """Primes q <= bound, q not in {2, 7}, q != 1 mod 7 (E has good reduction there)."""
    from sympy import primerange

    return tuple(q for q in primerange(3, bound + 1) if q != 7 and q % 7 != 1)


def route_case(case: CaseDescriptor) -> list[PlanStep]:
    """Ordered plan for one case of one route."""
    key = (case.two_case, case.seven_case)
    kind = ROUTE_TABLES[case.route][key]
    if kind is ObjectKind.E:
        # the E elimination leaves only E_{1,0} (4 | ab, 7 coprime) and
        # E_{1,-1} (4 coprime to ab, 7 | a+b); neither fits the cases routed here
        levels = (4 * 49, 8 * 49)
        return [PlanStep(ObjectKind.E, None, levels[0], "standard", e_aux_primes()),
                PlanStep(ObjectKind.E, None, levels[1], "standard", e_aux_primes())]
    if kind is ObjectKind.F:
        delta = delta_for_case(case)
        aux, refined = F_AUX[key]
        return [PlanStep(ObjectKind.F, delta, serre_level_F(case), "standard+refined", aux, refined)]
    level = serre_level_J(case)
    if case.d == 1:
        aux = J_AUX_D1
    elif case.seven_divides:
        aux = J_AUX_TWISTED
    else:
        aux = J_AUX_PLAIN
    return [PlanStep(ObjectKind.J, None, level, "trace-set", aux, J_REFINED)]


def route_table(route: Route | str, d: int = 3) -> dict[str, str]:
    """Human-readable view of a routing table: case key -> object name."""
    out = {}
    for case in all_cases(d, Route(route)):
        out[case.key] = route_case(case)[0].name
    return out


def E_case_compatible(survivor: tuple[int, int], case: CaseDescriptor) -> bool:
    """Can a solution in ``case`` have rho_E isomorphic to that of E_survivor?

    E_{1,0} needs alpha = 2 (so 4 | ab) and e_7 = 6 (so 7 coprime to a+b);
    E_{1,-1} needs alpha = 3 (4 coprime to ab) and e_7 = 3 (7 | a+b).
    """
    a0, b0 = survivor
    alpha0 = conductor_exponent_E_at_2(a0, b0)
    e7_0 = semistability_defects_E(a0, b0)[1]
    four_div = case.two_case is TwoCase.FOUR_DIVIDES
    alpha_ok = (alpha0 == 2) == four_div
    e7_ok = (e7_0 == 3) == case.seven_divides
    return alpha_ok and e7_ok


