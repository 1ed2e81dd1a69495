"""Newform eigenvalue records: loading, validation and structural analyses.

A record is a newform orbit (one Hecke constituent) given by its Hecke field
Q[y]/(f) and a table of eigenvalues on the power basis of that field.  Base
field is either Q or K = Q(zeta_7)^+ (LMFDB label 3.3.49.1).
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import jsonschema
import mpmath

from .frey import FreyC7, FreyE, FreyF, KLevel, conductor_E
from .numfield import (
    K_POLY,
    InconclusiveError,
    KElement,
    NFElement,
    NumberFieldSpec,
    PrimeIdealK,
    find_K_embeddings,
    k_in_field,
    split_prime,
)
from .traces import BadReduction, chi7_sign, count_points_E, count_points_F, trace_set

K_LABEL = "3.3.49.1"
Q_FIELD = NumberFieldSpec((0, 1))
K_FIELD = NumberFieldSpec(tuple(K_POLY))

PrimeKey = PrimeIdealK | int


class SchemaError(ValueError):
    """Input does not match the record schema."""


class MissingEigenvalue(KeyError):
    """A requested eigenvalue is not in the record."""


class AmbiguousPairing(ValueError):
    """Twist pairing is not determined by the available eigenvalues."""


RECORD_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["field", "level", "weight", "forms"],
    "additionalProperties": False,
    "properties": {
        "field": {"type": "string"},
        "level": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["q2", "q3", "q7"],
                    "additionalProperties": False,
                    "properties": {k: {"type": "integer", "minimum": 0} for k in ("q2", "q3", "q7")},
                },
                {
                    "type": "object",
                    "required": ["N"],
                    "additionalProperties": False,
                    "properties": {"N": {"type": "integer", "minimum": 1}},
                },
            ]
        },
        "weight": {
            "oneOf": [
                {"type": "array", "items": {"const": 2}, "minItems": 3, "maxItems": 3},
                {"type": "array", "items": {"const": 2}, "minItems": 1, "maxItems": 1},
            ]
        },
        "forms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "hecke_poly", "eigenvalues", "complete_below_norm"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string"},
                    "hecke_poly": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                    "complete_below_norm": {"type": "integer", "minimum": 0},
                    "eigenvalues": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["q", "f", "root", "ap"],
                            "additionalProperties": False,
                            "properties": {
                                "q": {"type": "integer", "minimum": 2},
                                "f": {"type": "integer", "enum": [1, 3]},
                                "root": {"type": ["integer", "null"]},
                                "ap": {
                                    "type": "array",
                                    "items": {
                                        "type": "array",
                                        "items": {"type": "integer"},
                                        "minItems": 2,
                                        "maxItems": 2,
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


# ---------------------------------------------------------------------------
# record model
# ---------------------------------------------------------------------------


def prime_key_norm(key: PrimeKey) -> int:
    return key if isinstance(key, int) else key.norm


def _key_sort(key: PrimeKey) -> tuple:
    if isinstance(key, int):
        return (key, 0, 0)
    return (key.norm, key.q, key.index)


def prime_from_json(q: int, f: int, root: int | None) -> PrimeIdealK:
    primes = split_prime(q)
    if primes[0].f != f:
        raise SchemaError(f"prime {q} has residue degree {primes[0].f}, record says {f}")
    if f == 3 or primes[0].ramified:
        return primes[0]
    for P in primes:
        if P.root == root % q:
            return P
    raise SchemaError(f"{root} is not a root of the cubic mod {q}")


@dataclass(frozen=True, eq=False)
class NewformRecord:
    """One newform orbit with its eigenvalue table."""

    label: str
    base_field: str
    level: KLevel | int
    hecke_field: NumberFieldSpec
    eigenvalues: Mapping[PrimeKey, NFElement]
    provenance: str = "fixture"
    complete_below_norm: int = 0
    # primes where a synthetic record carries a level-lowering stand-in
    exempt: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.base_field not in ("Q", K_LABEL):
            raise SchemaError(f"unknown base field {self.base_field}")
        if self.provenance not in ("lmfdb", "fixture", "synthetic"):
            raise SchemaError(f"unknown provenance {self.provenance}")
        for a in self.eigenvalues.values():
            if a.field != self.hecke_field:
                raise SchemaError("eigenvalue outside the Hecke field")

    @property
    def over_K(self) -> bool:
        return self.base_field == K_LABEL

    @property
    def weight(self) -> tuple[int, ...]:
        return (2, 2, 2) if self.over_K else (2,)

    @property
    def degree(self) -> int:
        return self.hecke_field.degree

    def primes(self) -> list[PrimeKey]:
        return sorted(self.eigenvalues, key=_key_sort)

    def ap(self, key: PrimeKey) -> NFElement:
        try:
            return self.eigenvalues[key]
        except KeyError:
            raise MissingEigenvalue(f"{self.label}: no eigenvalue at {key}") from None

    def has(self, key: PrimeKey) -> bool:
        return key in self.eigenvalues

    def level_norm(self) -> int:
        return self.level if isinstance(self.level, int) else self.level.norm

    def is_good(self, key: PrimeKey) -> bool:
        if isinstance(key, int):
            assert isinstance(self.level, int)
            return self.level % key != 0
        assert isinstance(self.level, KLevel)
        exps = {2: self.level.q2, 3: self.level.q3, 7: self.level.q7}
        return exps.get(key.q, 0) == 0

    def good_primes(self) -> list[PrimeKey]:
        return [k for k in self.primes() if self.is_good(k)]

    def fingerprint(self) -> str:
        """Degree plus traces of the first three good eigenvalues."""
        tr = []
        for key in self.good_primes()[:3]:
            tr.append(str(_trace(self.eigenvalues[key])))
        return f"d{self.degree}:" + ",".join(tr)

    def check_weil(self, tol: float = 1e-8) -> list[PrimeKey]:
        """Good primes whose eigenvalue violates |a| <= 2 sqrt(N q) somewhere."""
        bad = []
        for key in self.good_primes():
            if key in self.exempt:
                continue
            bound = 2 * math.sqrt(prime_key_norm(key)) * (1 + tol)
            for v in self.eigenvalues[key].embeddings(128):
                if abs(complex(v)) > bound:
                    bad.append(key)
                    break
        return bad

    def check_complete(self, bound: int | None = None) -> list[PrimeKey]:
        """Primes of norm below the bound that are missing."""
        b = self.complete_below_norm if bound is None else bound
        missing: list[PrimeKey] = []
        for q in _primes_below(b):
            if self.over_K:
                for P in split_prime(q):
                    if P.norm < b and P not in self.eigenvalues:
                        missing.append(P)
            elif q not in self.eigenvalues:
                missing.append(q)
        return missing

    def validate(self) -> None:
        bad = self.check_weil()
        if bad:
            raise SchemaError(f"{self.label}: Weil bound fails at {bad}")
        missing = self.check_complete()
        if missing:
            raise SchemaError(f"{self.label}: eigenvalues missing at {missing}")

    def with_eigenvalues(self, eig: Mapping[PrimeKey, NFElement], **kw) -> "NewformRecord":
        args = dict(
            label=self.label,
            base_field=self.base_field,
            level=self.level,
            hecke_field=self.hecke_field,
            eigenvalues=dict(eig),
            provenance=self.provenance,
            complete_below_norm=self.complete_below_norm,
            exempt=self.exempt,
        )
        args.update(kw)
        return NewformRecord(**args)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NewformRecord):
            return NotImplemented
        return (
            self.label == other.label
            and self.base_field == other.base_field
            and self.level == other.level
            and self.hecke_field == other.hecke_field
            and dict(self.eigenvalues) == dict(other.eigenvalues)
            and self.complete_below_norm == other.complete_below_norm
        )

    def __hash__(self) -> int:
        return hash((self.label, self.base_field, self.hecke_field.poly))

    def __repr__(self) -> str:
        return f"NewformRecord({self.label!r}, deg={self.degree}, {len(self.eigenvalues)} eigenvalues)"


def _trace(a: NFElement) -> Fraction:
    cp = a.charpoly()
    return -Fraction(cp[-2])


@lru_cache(maxsize=None)
def _primes_below(b: int) -> tuple[int, ...]:
    from sympy import primerange

    return tuple(primerange(2, max(b, 2)))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _level_from_json(obj: Mapping[str, int]) -> KLevel | int:
    if "N" in obj:
        return int(obj["N"])
    return KLevel(obj["q2"], obj["q3"], obj["q7"])


def _level_to_json(level: KLevel | int) -> dict[str, int]:
    if isinstance(level, int):
        return {"N": level}
    return {"q2": level.q2, "q3": level.q3, "q7": level.q7}


def records_from_json(data: Mapping[str, Any], provenance: str = "fixture") -> list[NewformRecord]:
    try:
        jsonschema.validate(data, RECORD_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"schema violation: {exc.message}") from exc
    base = data["field"]
    if base not in ("Q", K_LABEL):
        raise SchemaError(f"unsupported field {base!r}")
    level = _level_from_json(data["level"])
    if (base == "Q") != isinstance(level, int):
        raise SchemaError("level shape does not match the base field")
    if len(data["weight"]) != (1 if base == "Q" else 3):
        raise SchemaError("weight length does not match the base field")
    out = []
    for form in data["forms"]:
        spec = NumberFieldSpec(tuple(form["hecke_poly"]))
        eig: dict[PrimeKey, NFElement] = {}
        for e in form["eigenvalues"]:
            if len(e["ap"]) > spec.degree:
                raise SchemaError(f"{form['label']}: eigenvalue has too many coordinates")
            if any(den == 0 for _, den in e["ap"]):
                raise SchemaError(f"{form['label']}: zero denominator")
            coords = [Fraction(n, d) for n, d in e["ap"]]
            if base == "Q":
                if e["f"] != 1 or e["root"] is not None:
                    raise SchemaError("classical eigenvalues need f = 1 and root = null")
                key: PrimeKey = int(e["q"])
            else:
                key = prime_from_json(e["q"], e["f"], e["root"])
            if key in eig:
                raise SchemaError(f"{form['label']}: duplicate eigenvalue at {key}")
            eig[key] = NFElement(spec, coords)
        out.append(
            NewformRecord(
                label=form["label"],
                base_field=base,
                level=level,
                hecke_field=spec,
                eigenvalues=eig,
                provenance=provenance,
                complete_below_norm=form["complete_below_norm"],
            )
        )
    return out


def records_to_json(records: Sequence[NewformRecord]) -> dict[str, Any]:
    if not records:
        raise ValueError("nothing to serialize")
    first = records[0]
    for r in records:
        if r.base_field != first.base_field or r.level != first.level:
            raise ValueError("records must share base field and level")
    forms = []
    for r in records:
        eig = []
        for key in r.primes():
            a = r.eigenvalues[key]
            coords = list(a.coords) or [Fraction(0)]
            ap = [[Fraction(c).numerator, Fraction(c).denominator] for c in coords]
            if isinstance(key, int):
                eig.append({"q": key, "f": 1, "root": None, "ap": ap})
            else:
                root = key.root if key.f == 1 and not key.ramified else None
                if key.ramified:
                    root = key.root
                eig.append({"q": key.q, "f": key.f, "root": root, "ap": ap})
        forms.append(
            {
                "label": r.label,
                "hecke_poly": list(r.hecke_field.poly),
                "eigenvalues": eig,
                "complete_below_norm": r.complete_below_norm,
            }
        )
    return {
        "field": first.base_field,
        "level": _level_to_json(first.level),
        "weight": list(first.weight),
        "forms": forms,
    }


def load_records(source: str | Path | Mapping[str, Any], provenance: str | None = None) -> list[NewformRecord]:
    """Records from a JSON file, a parsed JSON object or an ``lmfdb:N`` query."""
    if isinstance(source, Mapping):
        return records_from_json(source, provenance or "fixture")
    s = str(source)
    if s.startswith("lmfdb:"):
        from .lmfdb import fetch_classical_records

        return fetch_classical_records(int(s.split(":", 1)[1]))
    with open(s, encoding="utf-8") as fh:
        data = json.load(fh)
    return records_from_json(data, provenance or "fixture")


def dump_records(records: Sequence[NewformRecord], path: str | Path) -> None:
    data = records_to_json(records)
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# synthetic records
# ---------------------------------------------------------------------------


def _rational(x: int | Fraction, spec: NumberFieldSpec = Q_FIELD) -> NFElement:
    return NFElement(spec, (x,))


def synthesize_record_from_curve(curve, primes: Iterable[int], label: str | None = None) -> NewformRecord:
    """A synthetic record whose eigenvalues are traces of the given Frey object.

    ``curve`` is a FreyE, a FreyF or a FreyC7 (standing for its Jacobian).  At
    primes where a Frey curve has multiplicative reduction the record stores
    +-(N(q) + 1), which is what level lowering makes a congruent form look
    like modulo p.
    """
    primes = sorted(set(primes))
    if isinstance(curve, FreyE):
        eig: dict[PrimeKey, NFElement] = {}
        for q in primes:
            eig[q] = _rational(count_points_E(curve.a, curve.b, q))
        return NewformRecord(
            label=label or f"E({curve.a},{curve.b})",
            base_field="Q",
            level=conductor_E(curve.a, curve.b),
            hecke_field=Q_FIELD,
            eigenvalues=eig,
            provenance="synthetic",
        )
    if isinstance(curve, FreyF):
        eig = {}
        exempt = set()
        for q in primes:
            for P in split_prime(q):
                try:
                    a = count_points_F(curve.a, curve.b, curve.delta, P)
                except BadReduction:
                    a = _multiplicative_sign(curve, P) * (P.norm + 1)
                    exempt.add(P)
                eig[P] = _rational(a)
        return NewformRecord(
            label=label or f"F({curve.a},{curve.b})",
            base_field=K_LABEL,
            level=KLevel(0, 0, 0),
            hecke_field=Q_FIELD,
            eigenvalues=eig,
            provenance="synthetic",
            exempt=frozenset(exempt),
        )
    if isinstance(curve, FreyC7):
        eig = {}
        gen = K_FIELD.gen()
        for q in primes:
            ts = trace_set(curve.a, curve.b, q)
            Ps = split_prime(q)
            u0 = ts.sorted()[0]
            for i, P in enumerate(Ps):
                eig[P] = k_in_field(u0.sigma(i), gen)
        return NewformRecord(
            label=label or f"J({curve.a},{curve.b})",
            base_field=K_LABEL,
            level=KLevel(0, 0, 0),
            hecke_field=K_FIELD,
            eigenvalues=eig,
            provenance="synthetic",
        )
    raise TypeError(f"cannot synthesize a record from {type(curve).__name__}")


def _multiplicative_sign(curve: FreyF, P: PrimeIdealK) -> int:
    # the singular cubic still counts fine: split node gives +1, non-split -1
    from .traces import _trace_from_roots

    r1, r2 = curve.twisted_roots
    F = P.residue_field
    e1, e2 = P.residue(r1), P.residue(r2)
    a = _trace_from_roots(F, e1, e2)
    if a not in (1, -1):
        raise BadReduction(f"additive reduction at {P.label}", kind="additive")
    return a


# ---------------------------------------------------------------------------
# K inside the Hecke field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContainsK:
    status: str  # "yes", "no" or "inconclusive"
    roots: tuple[NFElement, ...] = ()

    def __bool__(self) -> bool:
        return self.status == "yes"


@lru_cache(maxsize=256)
def _contains_K_poly(poly: tuple[int, ...]) -> ContainsK:
    spec = NumberFieldSpec(poly)
    if spec.degree % 3:
        return ContainsK("no")
    try:
        roots = find_K_embeddings(spec)
    except InconclusiveError:
        return ContainsK("inconclusive")
    if not roots:
        return ContainsK("no")
    return ContainsK("yes", tuple(roots))


def contains_K(record: NewformRecord) -> ContainsK:
    """Does the Hecke field contain K?  Roots of the cubic are verified exactly."""
    return _contains_K_poly(record.hecke_field.poly)


# ---------------------------------------------------------------------------
# Galois action and twists
# ---------------------------------------------------------------------------


def galois_conjugate_record(record: NewformRecord, k: int = 1) -> NewformRecord:
    """f^sigma with a_q(f^sigma) = a_{sigma q}(f), sigma = sigma_0^k."""
    if not record.over_K:
        raise ValueError("Galois action needs base field K")
    eig = {}
    for P, a in record.eigenvalues.items():
        src = P.sigma(k)
        if src not in record.eigenvalues:
            continue
        eig[P] = record.eigenvalues[src]
    exempt = frozenset(P for P in record.eigenvalues if P.sigma(k) in record.exempt)
    return record.with_eigenvalues(eig, exempt=exempt)


def is_base_change(record: NewformRecord) -> bool:
    """Necessary test: a_{sigma q} = a_q at every available split prime."""
    split = [P for P in record.primes() if isinstance(P, PrimeIdealK) and P.f == 1 and not P.ramified]
    if not split:
        raise ValueError("no split prime available")
    for P in split:
        for k in (1, 2):
            Q = P.sigma(k)
            if Q in record.eigenvalues and record.eigenvalues[Q] != record.eigenvalues[P]:
                return False
    return True


def _combo_charpoly(elements: Sequence[NFElement], coeffs: Sequence[int]) -> tuple:
    if not elements:
        return ()
    acc = elements[0] * 0
    for c, a in zip(coeffs, elements):
        acc = acc + a * c
    return tuple(acc.charpoly())


def _same_system(xs: Sequence[NFElement], ys: Sequence[NFElement], trials: int = 3) -> bool:
    """Is there a field isomorphism sending every x_i to y_i?  (charpoly test)"""
    if len(xs) != len(ys):
        return False
    if not xs:
        return True
    if xs[0].field.degree != ys[0].field.degree:
        return False
    for x, y in zip(xs, ys):
        if x.charpoly() != y.charpoly():
            return False
    rng = random.Random(len(xs) * 7919 + xs[0].field.degree)
    for _ in range(trials):
        c = [rng.randint(-50, 50) for _ in xs]
        if _combo_charpoly(xs, c) != _combo_charpoly(ys, c):
            return False
    return True


def galois_orbit_size(record: NewformRecord) -> int:
    """1 if the constituent is stable under sigma_0, else 3."""
    shared = [P for P in record.primes() if P.sigma(1) in record.eigenvalues]
    xs = [record.eigenvalues[P.sigma(1)] for P in shared]
    ys = [record.eigenvalues[P] for P in shared]
    return 1 if _same_system(xs, ys) else 3


@dataclass(frozen=True)
class Constituent:
    record: NewformRecord
    degree: int
    galois_orbit_size: int

    @classmethod
    def of(cls, record: NewformRecord) -> "Constituent":
        return cls(record, record.degree, galois_orbit_size(record))


@dataclass(frozen=True)
class TwistPair:
    """h' is the chi_7 twist of h: a_q(h') = chi7_sign(q) a_q(h)."""

    h: NewformRecord
    h_twist: NewformRecord
    cross_level: bool = False
    character: str = "chi7"

    def check(self) -> bool:
        shared = [P for P in self.h.primes() if P in self.h_twist.eigenvalues]
        return _twist_related(self.h, self.h_twist, shared)


def _twist_related(h: NewformRecord, g: NewformRecord, shared: Sequence[PrimeIdealK]) -> bool:
    xs = [h.eigenvalues[P] * chi7_sign(P) for P in shared]
    ys = [g.eigenvalues[P] for P in shared]
    return _same_system(xs, ys)


def _informative(h: NewformRecord, shared: Sequence[PrimeIdealK]) -> bool:
    return any(chi7_sign(P) == -1 and h.eigenvalues[P] for P in shared)


def detect_twist_pairs(
    records: Sequence[NewformRecord], others: Sequence[NewformRecord] = ()
) -> tuple[list[TwistPair], list[NewformRecord]]:
    """Pair up records that are chi_7 twists of each other.

    ``others`` are records from other levels; matches there are returned with
    ``cross_level=True``.  Comparison uses all primes good for both records.
    """
    pool = list(records) + list(others)
    level_of = {id(r): (r in records) for r in pool}
    pairs: list[TwistPair] = []
    used: set[int] = set()
    for i, h in enumerate(records):
        if id(h) in used:
            continue
        cands = []
        for g in pool:
            if g is h or id(g) in used or g.degree != h.degree:
                continue
            shared = [P for P in h.primes() if P in g.eigenvalues and h.is_good(P) and g.is_good(P)]
            if not shared or not _twist_related(h, g, shared):
                continue
            if not _informative(h, shared):
                raise AmbiguousPairing(
                    f"{h.label} and {g.label}: no shared prime with chi_7 = -1 and nonzero eigenvalue"
                )
            cands.append(g)
        if len(cands) > 1:
            raise AmbiguousPairing(f"{h.label} matches {[c.label for c in cands]}; more eigenvalues needed")
        if cands:
            g = cands[0]
            used.update({id(h), id(g)})
            pairs.append(TwistPair(h, g, cross_level=not level_of[id(g)]))
    unmatched = [r for r in records if id(r) not in used]
    return pairs, unmatched


def twist_record(record: NewformRecord, label: str | None = None) -> NewformRecord:
    """Synthetic chi_7 twist: multiply each eigenvalue by chi7_sign."""
    eig = {P: a * chi7_sign(P) for P, a in record.eigenvalues.items()}
    return record.with_eigenvalues(eig, label=label or record.label + "^chi7", provenance="synthetic")


def weil_ok(a: NFElement, norm: int) -> bool:
    b = 2 * mpmath.sqrt(norm) * (1 + mpmath.mpf(10) ** -8)
    return all(abs(v) <= b for v in a.embeddings(128))
