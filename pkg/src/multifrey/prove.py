"""Proof orchestration: run route plans against eigenvalue fixtures and
assemble a deterministic elimination certificate."""

from __future__ import annotations

import hashlib
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import jsonschema

from . import __version__
from .eliminate import (
    AuxiliaryPrimePlan,
    SurvivorReport,
    _bound_for,
    bound_entry,
    survivor_sweep,
)
from .frey import (
    CaseDescriptor,
    E_case_compatible,
    KLevel,
    ObjectKind,
    PlanStep,
    Route,
    SevenCase,
    TwoCase,
    all_cases,
    delta_label,
    route_case,
)
from .heckedata import (
    AmbiguousPairing,
    NewformRecord,
    contains_K,
    detect_twist_pairs,
    file_sha256,
    load_records,
    twist_record,
)
from .numfield import KElement, NFElement, k_in_field, split_prime
from .traces import BadReduction, count_points_E, trace_set

THEOREMS = ("main-elliptic", "main-jmax", "main-fastest", "overQ", "other-part1", "other-part2")
THEOREM_ROUTES = {
    "main-elliptic": Route.ELLIPTIC_ONLY,
    "main-jmax": Route.J_MAX,
    "main-fastest": Route.FASTEST,
}
DEFAULT_AUX = (5, 11, 13, 17, 29, 41, 83)
SCHEMA_ID = "multifrey-certificate/1"
E_SURVIVOR_CURVES = ((1, 0), (1, -1))

# hypotheses the computation relies on but does not establish
IMPORTED_FACTS: dict[str, str] = {
    "reduction-n-p": "Exponents n with no prime factor p >= 5, p != 7 are settled by earlier results; n = p is assumed.",
    "modularity": "The Frey objects are modular and level lowering applies at the stated Serre levels.",
    "irreducibility": "The residual representations of E, F and J are irreducible for the exponents considered.",
    "conductor-types": "Conductor exponent at 2 and semistability defect at 7 of E determine the case of (a, b).",
    "K-in-Kg": "A form congruent to J has K inside its coefficient field.",
    "twist-unramified": "A form whose chi_7 twist has level prime to q7 cannot match J, which is ramified at q7.",
    "minimality": "The Serre level equals the conductor away from p for the given twist.",
}


class MissingFixtures(LookupError):
    def __init__(self, levels: Sequence[str]):
        self.levels = sorted(set(levels))
        super().__init__("missing eigenvalue fixtures for levels: " + ", ".join(self.levels))


class CapExceeded(ValueError):
    """A plan would enumerate more residue pairs than --max-enum allows."""


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def level_key(level: KLevel | int) -> str:
    return str(level) if isinstance(level, int) else level.untwisted().label


@dataclass
class FixtureStore:
    records: dict[str, list[NewformRecord]] = field(default_factory=dict)
    hashes: dict[str, str] = field(default_factory=dict)

    def add(self, name: str, digest: str, recs: Iterable[NewformRecord]) -> None:
        self.hashes[name] = digest
        for r in recs:
            self.records.setdefault(level_key(r.level), []).append(r)

    def get(self, level: KLevel | int) -> list[NewformRecord] | None:
        return self.records.get(level_key(level))

    def has(self, level: KLevel | int) -> bool:
        return level_key(level) in self.records

    @classmethod
    def load(cls, directory: str | Path | None = None, bundled: bool = True) -> "FixtureStore":
        store = cls()
        if bundled:
            for name in ("classical_196.json", "classical_392.json"):
                ref = resources.files("multifrey") / "data" / name
                raw = ref.read_bytes()
                store.add(f"bundled/{name}", hashlib.sha256(raw).hexdigest(), load_records(json.loads(raw)))
        if directory is not None:
            for path in sorted(Path(directory).glob("*.json")):
                recs = load_records(path)
                # a user file for a level replaces the bundled copy
                for key in {level_key(r.level) for r in recs}:
                    store.records.pop(key, None)
                store.add(path.name, file_sha256(path), recs)
        return store


# ---------------------------------------------------------------------------
# options and plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProveOptions:
    aux_primes: tuple[int, ...] | None = None
    max_enum: int = 10_000
    witness_bound: int = 60
    jobs: int = 1

    def as_dict(self) -> dict[str, Any]:
        return {
            "aux_primes": list(self.aux_primes) if self.aux_primes else None,
            "max_enum": self.max_enum,
            "witness_bound": self.witness_bound,
        }


def _plans(step: PlanStep, opts: ProveOptions) -> list[AuxiliaryPrimePlan]:
    qs = step.aux_primes
    if opts.aux_primes:
        bad = {2, 7}
        if isinstance(step.level, KLevel) and step.level.q3:
            bad.add(3)
        qs = tuple(q for q in opts.aux_primes if q not in bad)
        if step.kind is ObjectKind.E:
            qs = tuple(q for q in qs if q % 7 != 1)
    for q in qs + step.refined:
        if q * q > opts.max_enum:
            raise CapExceeded(f"q = {q} needs {q * q} residue pairs, above the cap {opts.max_enum}")
    plans = [AuxiliaryPrimePlan(q) for q in qs]
    plans += [AuxiliaryPrimePlan(q, mode="refined") for q in step.refined]
    return plans


def _step_dict(step: PlanStep, plans: Sequence[AuxiliaryPrimePlan]) -> dict[str, Any]:
    return {
        "object": step.name,
        "delta": delta_label(step.delta),
        "level": step.level_label if isinstance(step.level, int) else str(step.level),
        "technique": step.technique,
        "plans": [{"q": p.q, "S": list(p.S), "mode": p.mode} for p in plans],
    }


# ---------------------------------------------------------------------------
# identification of self-survivors
# ---------------------------------------------------------------------------


def matches_E(form: NewformRecord, a0: int, b0: int) -> bool:
    """Every available good eigenvalue equals the trace of E_{a0,b0}."""
    if form.degree != 1:
        return False
    seen = False
    for q in form.good_primes():
        try:
            t = count_points_E(a0, b0, q)
        except BadReduction:
            continue
        if form.ap(q) != NFElement(form.hecke_field, (t,)):
            return False
        seen = True
    return seen


def matches_J(form: NewformRecord, pair: tuple[int, int], bound: int = 40) -> bool:
    """For some embedding of K, a_q(form) lies in +-T_q(pair) at every good q below the bound."""
    ck = contains_K(form)
    if not ck:
        return False
    x, y = pair
    qs = sorted({P.q for P in form.good_primes() if P.q < bound})
    for iota in ck.roots:
        ok = bool(qs)
        for q in qs:
            if q in (2, 7) or (x**7 + y**7) % q == 0:
                continue
            P0 = split_prime(q)[0]
            if P0 not in form.eigenvalues:
                continue
            T = trace_set(x, y, q)
            a = form.ap(P0)
            if not any(k_in_field(s * u, iota) == a for u in T.elements for s in (1, -1)):
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# running one step
# ---------------------------------------------------------------------------


def _check_complete(forms: Sequence[NewformRecord], plans: Sequence[AuxiliaryPrimePlan]) -> None:
    for f in forms:
        for pl in plans:
            keys = [pl.q] if not f.over_K else list(split_prime(pl.q))
            missing = [k for k in keys if k not in f.eigenvalues]
            if missing:
                raise MissingFixtures([f"{level_key(f.level)} (form {f.label} lacks eigenvalues above {pl.q}; completeness bound too low)"])


def _form_entry(rep: SurvivorReport | None, form: NewformRecord, status: str, note: str = "") -> dict[str, Any]:
    d = rep.as_dict() if rep is not None else {
        "label": form.label,
        "fingerprint": form.fingerprint(),
        "self_survivor": False,
        "survivors": [],
        "status": {},
        "unfactored": [],
        "flagged": [],
        "bounds": {},
    }
    d["degree"] = form.degree
    d["outcome"] = status
    d["note"] = note
    return d


def run_step(
    step: PlanStep,
    store: FixtureStore,
    opts: ProveOptions,
    case: CaseDescriptor | None = None,
    designated: str | None = None,
) -> dict[str, Any]:
    """Run one plan step; ``designated`` names an expected self-survivor ('E' or 'J01')."""
    forms = store.get(step.level)
    if forms is None:
        raise MissingFixtures([level_key(step.level)])
    plans = _plans(step, opts)
    _check_complete(forms, plans)
    if isinstance(step.level, KLevel) and step.level.chi7_twist:
        forms = [twist_record(f) for f in forms]
    entries: list[dict[str, Any]] = []
    citations: set[str] = {"modularity", "irreducibility", "minimality"}
    notes: list[str] = []
    pending = list(forms)

    if step.kind is ObjectKind.J:
        citations.add("K-in-Kg")
        keep = []
        for f in pending:
            ck = contains_K(f)
            if ck.status == "no":
                entries.append(_form_entry(None, f, "eliminated", "K not in coefficient field"))
            elif ck.status == "inconclusive":
                entries.append(_form_entry(None, f, "survives", "embedding search inconclusive"))
            else:
                keep.append(f)
        pending = keep
        lower = store.get(KLevel(step.level.q2, step.level.q3, 0)) if step.level.q7 == 2 else None
        if lower and pending:
            try:
                pairs, _ = detect_twist_pairs(pending, [r for r in lower if contains_K(r)])
            except AmbiguousPairing as exc:
                # no rule-based elimination; every form goes through the sweep
                pairs = []
                notes.append(f"twist pairing skipped: {exc}")
            crossed = {id(tp.h) for tp in pairs if tp.cross_level}
            if crossed:
                citations.add("twist-unramified")
            for f in pending:
                if id(f) in crossed:
                    entries.append(_form_entry(None, f, "eliminated", "chi_7 twist has level prime to q7"))
            pending = [f for f in pending if id(f) not in crossed]

    reports = survivor_sweep(plans, pending, step.kind, step.delta, witness_bound=opts.witness_bound)
    for f, rep in zip(pending, reports):
        if rep.self_survivor:
            entries.append(_classify_self_survivor(f, rep, step, case, designated, citations))
        elif rep.eliminated:
            entries.append(_form_entry(rep, f, "eliminated"))
        else:
            entries.append(_form_entry(rep, f, "survives"))

    entries.sort(key=lambda e: (e["fingerprint"], e["label"]))
    done = all(e["outcome"] in ("eliminated", "designated") for e in entries)
    return {
        "step": _step_dict(step, plans),
        "forms": entries,
        "imported": sorted(citations),
        "notes": notes,
        "conclusion": "eliminated" if done else "incomplete",
    }


def _classify_self_survivor(f, rep, step, case, designated, citations) -> dict[str, Any]:
    if step.kind is ObjectKind.E:
        for pair in E_SURVIVOR_CURVES:
            if matches_E(f, *pair):
                name = f"E_{{{pair[0]},{pair[1]}}}"
                if case is not None and not E_case_compatible(pair, case):
                    citations.add("conductor-types")
                    return _form_entry(rep, f, "eliminated", f"matches {name}, incompatible with the case")
                if designated == "E":
                    return _form_entry(rep, f, "designated", f"matches {name}")
                return _form_entry(rep, f, "survives", f"matches {name}")
    if step.kind is ObjectKind.J and designated == "J01" and matches_J(f, (0, 1)):
        return _form_entry(rep, f, "designated", "matches J(0,1)")
    return _form_entry(rep, f, "survives", "bound vanishes")


# ---------------------------------------------------------------------------
# theorems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Job:
    key: str
    step: PlanStep
    case: CaseDescriptor | None
    designated: str | None


def theorem_jobs(theorem: str, route: Route | str | None = None) -> list[Job]:
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}")
    if theorem == "overQ":
        steps = route_case(CaseDescriptor(3, TwoCase.ODD_AB, SevenCase.COPRIME, Route.FASTEST))
        return [Job(f"overQ/level{s.level}", s, None, "E") for s in steps]
    if theorem == "other-part1":
        cases = [CaseDescriptor(1, TwoCase.ODD_AB, SevenCase.COPRIME, Route.ELLIPTIC_ONLY)]
        cases += [CaseDescriptor(1, t, SevenCase.DIVIDES, Route.ELLIPTIC_ONLY) for t in TwoCase]
        designated = None
    elif theorem == "other-part2":
        cases = [CaseDescriptor(1, t, SevenCase.COPRIME, Route.J_MAX) for t in (TwoCase.TWO_EXACT, TwoCase.FOUR_DIVIDES)]
        designated = "J01"
    else:
        r = Route.parse(route) if isinstance(route, str) else (route or THEOREM_ROUTES[theorem])
        cases = all_cases(3, r)
        designated = None
    jobs = []
    for case in cases:
        for i, s in enumerate(route_case(case)):
            jobs.append(Job(f"{case.key}/{i}", s, case, designated))
    return jobs


def required_levels(jobs: Sequence[Job]) -> list[str]:
    return sorted({level_key(j.step.level) for j in jobs})


def _run_job(args: tuple[Job, FixtureStore, ProveOptions]) -> dict[str, Any]:
    job, store, opts = args
    out = run_step(job.step, store, opts, job.case, job.designated)
    out["case"] = job.key
    return out


def prove(theorem: str, store: FixtureStore, opts: ProveOptions = ProveOptions(), route: str | None = None) -> dict[str, Any]:
    """Build the certificate.  Raises MissingFixtures before any computation."""
    jobs = theorem_jobs(theorem, route)
    missing = [lv for lv in required_levels(jobs) if lv not in store.records]
    if missing:
        raise MissingFixtures(missing)
    work = [(j, store, opts) for j in jobs]
    if opts.jobs > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as ex:
            results = list(ex.map(_run_job, work))
    else:
        results = [_run_job(w) for w in work]
    results.sort(key=lambda r: r["case"])
    fixtures = dict(sorted(store.hashes.items()))
    complete = all(r["conclusion"] == "eliminated" for r in results)
    if theorem in ("overQ", "other-part2"):
        complete = complete and any(e["outcome"] == "designated" for r in results for e in r["forms"])
    cited = sorted({"reduction-n-p"} | {c for r in results for c in r["imported"]})
    route_name = None
    if theorem in THEOREM_ROUTES:
        route_name = (Route.parse(route) if route else THEOREM_ROUTES[theorem]).value
    return {
        "schema": SCHEMA_ID,
        "theorem": theorem,
        "route": route_name,
        "tool": {"name": "multifrey", "version": __version__},
        "options": opts.as_dict(),
        "fixtures": fixtures,
        "levels": required_levels(jobs),
        "imported_facts": [{"id": c, "statement": IMPORTED_FACTS[c]} for c in cited],
        "cases": results,
        "conclusion": "complete" if complete else "incomplete",
    }


def dumps_certificate(cert: dict[str, Any]) -> str:
    return json.dumps(cert, indent=1, sort_keys=True) + "\n"


def certificate_schema() -> dict[str, Any]:
    return json.loads((resources.files("multifrey") / "data" / "certificate.schema.json").read_text())


def validate_certificate(cert: dict[str, Any]) -> None:
    jsonschema.validate(cert, certificate_schema())


# ---------------------------------------------------------------------------
# re-verification
# ---------------------------------------------------------------------------


def _delta_from_label(label: str) -> KElement | None:
    from .frey import OMEGA2

    table = {"1": KElement(1), "-7": KElement(-7), "w2": OMEGA2, "-7w2": -7 * OMEGA2, "-": None}
    return table[label]


def reverify(
    cert: dict[str, Any],
    store: FixtureStore,
    fraction: float = 0.1,
    seed: int | None = None,
) -> tuple[int, list[str]]:
    """Recompute a random sample of recorded bounds; returns (checked, mismatches)."""
    validate_certificate(cert)
    items = []
    for case in cert["cases"]:
        step = case["step"]
        for form in case["forms"]:
            for key in sorted(form["bounds"]):
                items.append((case, step, form, key))
    if not items:
        return 0, []
    rng = random.Random(seed)
    k = max(1, math.ceil(fraction * len(items)))
    sample = rng.sample(items, k)
    bad = []
    for case, step, form, key in sample:
        level = step["level"]
        lv: KLevel | int
        twisted = level.endswith("(x chi7)")
        lv = int(level) if level.isdigit() else KLevel.parse(level.replace(" (x chi7)", ""))
        recs = store.get(lv) or []
        match = [r for r in recs if r.label == form["label"] or r.label + "^chi7" == form["label"]]
        if not match:
            bad.append(f"{case['case']}: form {form['label']} not found in fixtures")
            continue
        rec = twist_record(match[0]) if twisted else match[0]
        qs, mode = key.split(":")
        plan = AuxiliaryPrimePlan(int(qs[2:]), mode=mode)
        kind = ObjectKind(step["object"][0])
        B = _bound_for(rec, plan, kind, _delta_from_label(step["delta"]))
        if bound_entry(B) != form["bounds"][key]:
            bad.append(f"{case['case']}: {form['label']} {key} differs")
    return len(sample), bad
