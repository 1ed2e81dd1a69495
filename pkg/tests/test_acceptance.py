"""Acceptance criteria 1 to 7, one test each.

Each test records a pass/fail/skipped line that conftest prints in the
terminal summary.  Run directly (``python tests/test_acceptance.py``) to get
just the seven lines.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import pytest
import sympy

from multifrey.ffield import build_extension
from multifrey.frey import FreyC7, FreyE
from multifrey.heckedata import Q_FIELD
from multifrey.numfield import KElement, NFElement, residue_degree, split_prime, unit_gcd_primes
from multifrey.traces import count_points_C7, count_points_F, lpoly_C7, trace_set

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = {}

HERE = Path(__file__).resolve().parent
FIXTURE_ENV = "MULTIFREY_HILBERT_FIXTURES"


def _record(n: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[n] = ("pass" if ok else "fail", detail)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _enumerate_odd_model(coeffs, q: int, k: int) -> int:
    """Plain enumeration of y^2 = f(x) over F_{q^k}, one point at infinity."""
    F = build_extension(q, k)
    cs = [F.from_int(c) for c in coeffs]
    squares = Counter(F.mul(y, y) for y in range(F.size))
    return 1 + sum(squares[F.poly_eval(cs, x)] for x in range(F.size))


def test_criterion_1_unit_gcd_primes():
    got, dt = _timed(lambda: unit_gcd_primes(84))
    ok = got == {13, 29, 43, 127, 337, 757, 2017} and dt < 1
    _record(1, ok, f"{sorted(got)} in {dt:.2f}s")
    assert ok


def test_criterion_2_splitting_table():
    def run():
        split = all(residue_degree(q) == 1 and len(split_prime(q)) == 3 for q in (13, 29, 43, 83))
        inert = all(residue_degree(q) == 3 and len(split_prime(q)) == 1 for q in (5, 11, 17))
        norms = [split_prime(q)[0].norm for q in (2, 3, 7)]
        return split, inert, norms

    (split, inert, norms), dt = _timed(run)
    ok = split and inert and norms == [8, 27, 7] and dt < 1
    _record(2, ok, f"split={split} inert={inert} norms={norms} in {dt:.2f}s")
    assert ok


def test_criterion_3_trace_facts_at_q3():
    def run():
        P3 = split_prime(3)[0]
        pairs = [(1, 1), (-1, -1), (1, 0), (-1, 0), (0, 1), (0, -1)]
        traces = {pr: count_points_F(*pr, KElement(1), P3) for pr in pairs}
        X = sympy.symbols("X")
        irreducible = all(
            sympy.Poly(X**2 + s * 4 * X + 27, X, modulus=11).is_irreducible
            and all((x * x + s * 4 * x + 27) % 11 for x in range(11))
            for s in (1, -1)
        )
        return traces, irreducible

    (traces, irreducible), dt = _timed(run)
    ok = all(abs(t) == 4 for t in traces.values()) and irreducible and dt < 5
    _record(3, ok, f"traces={sorted(set(traces.values()))} irreducible={irreducible} in {dt:.2f}s")
    assert ok


def test_criterion_4_cm_trace_chain():
    def run():
        n1 = count_points_C7(0, 1, 13, 1)
        ts = trace_set(0, 1, 13)
        L = lpoly_C7(0, 1, 13)
        predicted = L.point_counts(3)[1:]
        coeffs = FreyC7(0, 1).coefficients
        enumerated = [_enumerate_odd_model(coeffs, 13, k) for k in (2, 3)]
        return n1, ts, L, predicted, enumerated

    (n1, ts, L, predicted, enumerated), dt = _timed(run)
    ok = (
        n1 == 14
        and ts.elements == frozenset({KElement(0)})
        and L.coeffs == (1, 0, 39, 0, 507, 0, 2197)
        and predicted == [248, 2198]
        and enumerated == predicted
        and dt < 30
    )
    _record(4, ok, f"N1={n1} T={ts} L={L.coeffs} predicted={predicted} enumerated={enumerated} in {dt:.1f}s")
    assert ok


def test_criterion_5_classical_route(store):
    from multifrey.prove import matches_E, prove

    def run():
        return prove("overQ", store)

    cert, dt = _timed(run)
    kept = {f["label"] for c in cert["cases"] for f in c["forms"] if f["outcome"] != "eliminated"}
    forms = {r.label: r for lv in ("196", "392") for r in store.records[lv]}
    e10 = {lab for lab, r in forms.items() if matches_E(r, 1, 0)}
    e11 = {lab for lab, r in forms.items() if matches_E(r, 1, -1)}
    ok = cert["conclusion"] == "complete" and kept == e10 | e11 and len(e10) == len(e11) == 1 and dt < 60
    _record(5, ok, f"survivors={sorted(kept)} (E_1,0: {sorted(e10)}, E_1,-1: {sorted(e11)}) in {dt:.1f}s")
    assert ok
    # the survivors really are the curves: brute-force a_q of E_{a,b}
    for lab, (a, b) in ((next(iter(e10)), (1, 0)), (next(iter(e11)), (1, -1))):
        a2, a4, a6 = FreyE(a, b).coefficients
        for q in (3, 5, 11, 13, 17):
            n = 1 + sum(1 for x in range(q) for y in range(q) if (y * y - x**3 - a2 * x * x - a4 * x - a6) % q == 0)
            assert forms[lab].ap(q) == NFElement(Q_FIELD, (q + 1 - n,))


HILBERT_COUNTS = {
    "q2q3": (2, None),
    "q2^3q3": (47, None),
    "q2q3q7": (5, None),
    "q2^3q3q7": (121, 818),
    "q2^2q3q7^2": (61, 698),
    "q2^2q7^2": (9, 27),
}
JMAX_DEGREES = Counter({3: 12, 9: 2, 12: 2, 15: 1, 18: 2, 21: 2, 36: 2, 54: 2})


# (case, exponent) -> number of forms that survive standard elimination only there
STRAGGLERS = {
    "d3/two_exact/7_not_div/0": Counter({5: 1}),
    "d3/four_divides/7_not_div/0": Counter({5: 1}),
    "d3/odd_ab/7_div/0": Counter({5: 1, 13: 1}),
    "d3/two_exact/7_div/0": Counter({5: 2}),
    "d3/four_divides/7_div/0": Counter({5: 3}),
}


def _straggler_problems(cert) -> list[str]:
    """Exponents left by standard elimination must be exactly the expected ones."""
    out = []
    for case in cert["cases"]:
        seen = Counter()
        for form in case["forms"]:
            for p, status in form["status"].items():
                seen[int(p)] += 1
                if not status.startswith("eliminated-by"):
                    out.append(f"{case['case']}: {form['label']} p={p} {status}")
        expect = STRAGGLERS.get(case["case"], Counter())
        if seen != expect:
            out.append(f"{case['case']}: stragglers {dict(seen)}, expected {dict(expect)}")
    return out


def test_criterion_6_hilbert_fixtures():
    root = os.environ.get(FIXTURE_ENV)
    if not root or not Path(root).is_dir():
        ACCEPTANCE[6] = ("skipped", f"no Hilbert fixtures (set {FIXTURE_ENV})")
        pytest.skip("Hilbert eigenvalue fixtures not supplied")
    from multifrey.heckedata import contains_K
    from multifrey.prove import FixtureStore, prove

    st = FixtureStore.load(root)
    problems = []
    for lv, (count, dim) in HILBERT_COUNTS.items():
        recs = st.records.get(lv, [])
        if len(recs) != count:
            problems.append(f"{lv}: {len(recs)} forms, expected {count}")
        if dim is not None and sum(r.degree for r in recs) != dim:
            problems.append(f"{lv}: dimension {sum(r.degree for r in recs)}, expected {dim}")
    jmax = st.records.get("q2^2q3q7^2", [])
    withK = [r for r in jmax if contains_K(r)]
    if len(withK) != 25 or Counter(r.degree for r in withK) != JMAX_DEGREES:
        problems.append(f"q2^2q3q7^2: {len(withK)} forms contain K with degrees {sorted(r.degree for r in withK)}")
    for thm in ("main-elliptic", "main-jmax", "main-fastest", "other-part1", "other-part2"):
        cert = prove(thm, st)
        if cert["conclusion"] != "complete":
            problems.append(f"{thm}: incomplete")
        if thm == "main-elliptic":
            problems += _straggler_problems(cert)
    _record(6, not problems, "; ".join(problems) or "all counts and eliminations match")
    assert not problems


def test_criterion_7_property_suites():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_properties.py")],
        capture_output=True,
        text=True,
        cwd=HERE.parent,
    )
    dt = time.perf_counter() - t0
    sys.path.insert(0, str(HERE))
    import test_properties

    cases = sum(test_properties.EXAMPLES.values())
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0 and cases >= 1000 and dt < 300
    _record(7, ok, f"{cases} cases, {tail} in {dt:.0f}s")
    assert ok, proc.stdout[-3000:]


def main() -> int:
    from multifrey.prove import FixtureStore

    st = FixtureStore.load()
    tests = [
        test_criterion_1_unit_gcd_primes,
        test_criterion_2_splitting_table,
        test_criterion_3_trace_facts_at_q3,
        test_criterion_4_cm_trace_chain,
        lambda: test_criterion_5_classical_route(st),
        test_criterion_6_hilbert_fixtures,
        test_criterion_7_property_suites,
    ]
    for t in tests:
        try:
            t()
        except pytest.skip.Exception:
            pass
        except AssertionError:
            pass
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        print(f"criterion {n}: {status.upper()} {detail}")
    return 0 if all(s != "fail" for s, _ in ACCEPTANCE.values()) and len(ACCEPTANCE) == 7 else 1


if __name__ == "__main__":
    sys.exit(main())
