from __future__ import annotations

import copy
import json

import pytest

from multifrey.frey import FreyC7, FreyE, FreyF, KLevel
from multifrey.heckedata import (
    K_FIELD,
    K_LABEL,
    AmbiguousPairing,
    MissingEigenvalue,
    NewformRecord,
    SchemaError,
    TwistPair,
    contains_K,
    detect_twist_pairs,
    dump_records,
    file_sha256,
    galois_conjugate_record,
    galois_orbit_size,
    is_base_change,
    load_records,
    records_from_json,
    records_to_json,
    synthesize_record_from_curve,
    twist_record,
)
from multifrey.numfield import NFElement, NumberFieldSpec, split_prime
from multifrey.traces import chi7_sign

PRIMES = [5, 11, 13, 29, 41]


@pytest.fixture(scope="module")
def J13():
    rec = synthesize_record_from_curve(FreyC7(1, 3), PRIMES)
    return rec.with_eigenvalues(rec.eigenvalues, level=KLevel(2, 0, 2))


def classical_json():
    return {
        "field": "Q",
        "level": {"N": 11},
        "weight": [2],
        "forms": [
            {
                "label": "11.a",
                "hecke_poly": [0, 1],
                "complete_below_norm": 6,
                "eigenvalues": [
                    {"q": 2, "f": 1, "root": None, "ap": [[-2, 1]]},
                    {"q": 3, "f": 1, "root": None, "ap": [[-1, 1]]},
                    {"q": 5, "f": 1, "root": None, "ap": [[1, 1]]},
                ],
            }
        ],
    }


class TestSerialization:
    def test_roundtrip_over_K(self, J13, tmp_path):
        path = tmp_path / "j.json"
        dump_records([J13], path)
        (back,) = load_records(path)
        assert back == J13
        assert back.provenance == "fixture"
        assert len(file_sha256(path)) == 64

    def test_roundtrip_classical(self):
        (rec,) = records_from_json(classical_json())
        assert rec.level == 11 and rec.ap(3) == NFElement(rec.hecke_field, (-1,))
        assert records_to_json([rec]) == classical_json()

    def test_dump_is_canonical(self, J13, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        dump_records([J13], a)
        dump_records(load_records(a), b)
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.pop("weight"),
            lambda d: d["forms"][0]["eigenvalues"][0].update(f=2),
            lambda d: d["forms"][0]["eigenvalues"][0].update(root=3),
            lambda d: d["forms"][0]["eigenvalues"][0].update(ap=[[1, 0]]),
            lambda d: d["forms"][0]["eigenvalues"].append(d["forms"][0]["eigenvalues"][0]),
            lambda d: d.update(level={"q2": 1, "q3": 0, "q7": 0}),
            lambda d: d.update(field="2.2.5.1"),
            lambda d: d["forms"][0].update(extra=1),
        ],
    )
    def test_schema_errors(self, mutate):
        data = copy.deepcopy(classical_json())
        mutate(data)
        with pytest.raises(SchemaError):
            records_from_json(data)

    def test_mixed_levels_refused(self, J13):
        other = J13.with_eigenvalues(J13.eigenvalues, level=KLevel(1, 0, 0))
        with pytest.raises(ValueError):
            records_to_json([J13, other])

    def test_json_is_plain(self, J13):
        text = json.dumps(records_to_json([J13]))
        assert K_LABEL in text


class TestRecord:
    def test_missing_eigenvalue(self):
        (rec,) = records_from_json(classical_json())
        with pytest.raises(MissingEigenvalue):
            rec.ap(7)

    def test_completeness(self):
        (rec,) = records_from_json(classical_json())
        assert rec.check_complete() == []
        assert rec.check_complete(8) == [7]

    def test_weil_violation(self):
        data = classical_json()
        data["forms"][0]["eigenvalues"][2]["ap"] = [[5, 1]]  # |a_5| > 2 sqrt 5
        (rec,) = records_from_json(data)
        with pytest.raises(SchemaError):
            rec.validate()

    def test_fingerprint_ignores_label(self, J13):
        assert J13.fingerprint() == J13.with_eigenvalues(J13.eigenvalues, label="x").fingerprint()
        assert J13.fingerprint().startswith("d3:")

    def test_foreign_eigenvalue_field(self):
        spec = NumberFieldSpec((-2, 0, 1))
        with pytest.raises(SchemaError):
            NewformRecord("x", "Q", 11, K_FIELD, {3: NFElement(spec, (1,))})


class TestSynthetic:
    def test_E_record_is_rational(self):
        rec = synthesize_record_from_curve(FreyE(1, 0), [3, 5])
        assert rec.level == 196 and rec.degree == 1

    def test_F_record_marks_multiplicative_primes(self):
        # phi7(1, 2) = 43 splits in K
        rec = synthesize_record_from_curve(FreyF(1, 2), [43])
        assert rec.exempt
        for P in rec.exempt:
            a = rec.ap(P).coords[0]
            assert abs(a) == P.norm + 1

    def test_unsupported_object(self):
        with pytest.raises(TypeError):
            synthesize_record_from_curve("E", [3])


class TestContainsK:
    def test_K_itself(self, J13):
        ck = contains_K(J13)
        assert ck and len(ck.roots) == 3

    def test_degree_not_divisible_by_three(self):
        spec = NumberFieldSpec((-2, 0, 1))
        rec = NewformRecord("x", K_LABEL, KLevel(1, 0, 0), spec, {})
        assert contains_K(rec).status == "no"

    def test_other_cubic(self):
        spec = NumberFieldSpec((-3, -3, 0, 1))  # discriminant 81, not 49
        rec = NewformRecord("x", K_LABEL, KLevel(1, 0, 0), spec, {})
        assert not contains_K(rec)


class TestGaloisAndTwists:
    def test_conjugation_permutes_split_primes(self, J13):
        g = galois_conjugate_record(J13, 1)
        for P in split_prime(13):
            assert g.ap(P) == J13.ap(P.sigma(1))
        assert galois_conjugate_record(J13, 3) == J13

    def test_not_base_change_but_sigma_stable(self, J13):
        assert not is_base_change(J13)
        assert galois_orbit_size(J13) == 1

    def test_rational_base_change(self):
        rec = synthesize_record_from_curve(FreyE(1, 0), [13, 29])
        lifted = NewformRecord(
            "bc", K_LABEL, KLevel(2, 0, 2), rec.hecke_field, {P: rec.ap(q) for q in (13, 29) for P in split_prime(q)}
        )
        assert is_base_change(lifted)
        assert galois_orbit_size(lifted) == 1

    def test_twist_record(self, J13):
        t = twist_record(J13)
        for P in J13.primes():
            assert t.ap(P) == J13.ap(P) * chi7_sign(P)
        assert t.provenance == "synthetic"

    def test_detect_pair(self, J13):
        t = twist_record(J13)
        pairs, unmatched = detect_twist_pairs([J13, t])
        assert unmatched == []
        (pair,) = pairs
        assert isinstance(pair, TwistPair) and pair.check() and not pair.cross_level

    def test_cross_level_pair(self, J13):
        t = twist_record(J13).with_eigenvalues(twist_record(J13).eigenvalues, level=KLevel(2, 0, 0))
        pairs, unmatched = detect_twist_pairs([J13], others=[t])
        assert pairs[0].cross_level and unmatched == []

    def test_unpaired_form(self, J13):
        other = synthesize_record_from_curve(FreyC7(1, 11), PRIMES)
        pairs, unmatched = detect_twist_pairs([J13, other])
        assert pairs == [] and len(unmatched) == 2

    def test_ambiguous_when_uninformative(self, J13):
        # keep only primes with chi7 = +1: the twist looks identical
        eig = {P: a for P, a in J13.eigenvalues.items() if chi7_sign(P) == 1}
        h = J13.with_eigenvalues(eig)
        with pytest.raises(AmbiguousPairing):
            detect_twist_pairs([h, twist_record(h)])

    def test_ambiguous_with_two_candidates(self, J13):
        t1 = twist_record(J13, label="t1")
        t2 = twist_record(J13, label="t2")
        with pytest.raises(AmbiguousPairing):
            detect_twist_pairs([J13, t1, t2])
