from __future__ import annotations

import math

import mpmath
import pytest
import sympy

from multifrey.eliminate import (
    AuxiliaryPrimePlan,
    Bound,
    EmbeddingUnavailable,
    bound_E,
    bound_entry,
    bound_J,
    factor_bound,
    m_factor_J,
    reducibility_witness,
    refined_eliminate,
    standard_survivors,
    survivor_sweep,
)
from multifrey.frey import FreyC7, KLevel, ObjectKind
from multifrey.heckedata import K_LABEL, Q_FIELD, NewformRecord, synthesize_record_from_curve, twist_record
from multifrey.modsym import classical_newforms
from multifrey.numfield import NFElement, NumberFieldSpec, split_prime

PRIMES = [5, 11, 13, 29, 41]


@pytest.fixture(scope="module")
def J13():
    return synthesize_record_from_curve(FreyC7(1, 3), PRIMES)


@pytest.fixture(scope="module")
def perturbed(J13):
    eig = {P: (a + 2 if P.q in (13, 29) else a) for P, a in J13.eigenvalues.items()}
    return J13.with_eigenvalues(eig, label="h", level=KLevel(2, 0, 2))


def rational_form(label: str, aps: dict[int, int], level: int = 196) -> NewformRecord:
    return NewformRecord(label, "Q", level, Q_FIELD, {q: NFElement(Q_FIELD, (a,)) for q, a in aps.items()})


def k_norm_numeric(coords) -> int:
    """Norm from K to Q via the three real embeddings 2 cos(2 pi k / 7)."""
    c = list(coords) + [0] * (3 - len(coords))
    prod = mpmath.mpf(1)
    for k in (1, 2, 3):
        w = 2 * mpmath.cos(2 * mpmath.pi * k / 7)
        prod *= c[0] + c[1] * w + c[2] * w * w
    return int(mpmath.nint(prod))


class TestFactorBound:
    def test_small(self):
        assert factor_bound(2**7 * 83 * 167).primes == {2, 83, 167}

    def test_zero(self):
        with pytest.raises(ValueError):
            factor_bound(0)

    def test_large_prime_cofactor(self):
        f = factor_bound(6 * 1000000000039)
        assert f.primes == {2, 3, 1000000000039} and f.unfactored == ()

    def test_unfactored_mass(self):
        # two primes far apart: out of reach of trial division and Fermat
        n = sympy.nextprime(10**13) * sympy.nextprime(10**19)
        f = factor_bound(35 * n)
        assert f.primes == {5, 7} and f.unfactored == (n,)

    def test_square_cofactor(self):
        # near-square cofactors once tripped sympy's factor cache
        n = 2**5 * (10**6 + 3) ** 2 * 1000000000039 * 1000000000061
        f = factor_bound(n)
        assert 2 in f.primes and math.prod(f.unfactored) * 32 == n


class TestBound:
    def test_zero_term(self):
        B = Bound(11)
        B.add(6, 3)
        B.add(0)
        assert B.zero and B.value == 0 and B.support() == 0
        with pytest.raises(ValueError):
            B.survivors()

    def test_value_and_support(self):
        B = Bound(13)
        B.add(12, 2)
        B.add(-18)
        B.add(1, 5)
        assert B.value == 144 * 18 and B.support() == 36
        assert B.survivors().primes == {13}

    def test_entry_digest_tracks_support(self):
        B = Bound(13)
        B.add(10**70 + 1)
        e = bound_entry(B)
        assert "digits" in e["value"] and len(e["sha256"]) == 64


class TestEllipticBound:
    def test_rational_curve_has_zero_bound(self, store):
        f = {r.label: r for r in store.records["196"]}["196.a"]
        assert bound_E(f, 11).zero

    def test_multiplicative_term(self):
        # 29 = 1 mod 7: phi7 has six projective roots mod 29
        f = rational_form("t", {29: 4})
        B = bound_E(f, 29)
        assert B.terms[abs(16 - 30**2)] == 6 * 28

    def test_standard_survivors(self, store):
        f = {r.label: r for r in store.records["196"]}["196.c"]
        primes, all_zero = standard_survivors(f, [3, 5, 11], bound_E)
        assert not all_zero and primes <= {5, 11}

    def test_excluded_q(self):
        with pytest.raises(ValueError):
            bound_E(rational_form("t", {7: 0}), 7)


class TestJBound:
    def test_m_factor_matches_numeric_norm(self, J13):
        for q in (13, 29):
            P = split_prime(q)[0]
            a = J13.ap(P)
            expect = k_norm_numeric((a * a - (q + 1) ** 2).coords)
            assert m_factor_J(J13, q) == abs(expect)

    def test_m_factor_inert(self, J13):
        a = J13.ap(split_prime(11)[0]).coords[0]  # rational at an inert prime
        assert m_factor_J(J13, 11) == abs(a * a - 1332**2) ** 3

    @pytest.mark.parametrize(
        "q,variant",
        [(7, "plain"), (13, "cubic"), (11, "symmetric"), (29, "twistpair"), (43, "symmetric")],
    )
    def test_variant_errors(self, J13, q, variant):
        with pytest.raises(ValueError):
            bound_J(J13, q, (0,), variant)

    def test_no_embedding(self):
        spec = NumberFieldSpec((-2, 0, 1))
        rec = NewformRecord("x", K_LABEL, KLevel(2, 0, 2), spec, {P: NFElement(spec, (1,)) for P in split_prime(13)})
        with pytest.raises(EmbeddingUnavailable):
            bound_J(rec, 13)

    def test_variants_agree_on_survivors(self, perturbed):
        sets = {v: bound_J(perturbed, 13, (0,), v).survivors().primes for v in ("plain", "symmetric", "squared")}
        assert sets["plain"] == sets["symmetric"] == sets["squared"]

    def test_twistpair_covers_both_twists(self, perturbed):
        t = twist_record(perturbed)
        assert bound_J(perturbed, 13, (0,), "twistpair").value == bound_J(t, 13, (0,), "twistpair").value
        assert not bound_J(perturbed, 13, (0,), "twistpair").zero

    def test_true_jacobian_has_zero_bound(self, J13):
        for q in (5, 13, 29):
            assert bound_J(J13, q).zero


class TestSweep:
    def plans(self):
        return [
            AuxiliaryPrimePlan(13),
            AuxiliaryPrimePlan(29),
            AuxiliaryPrimePlan(13, mode="refined"),
            AuxiliaryPrimePlan(29, mode="refined"),
        ]

    def test_self_survivor(self, J13):
        (rep,) = survivor_sweep(self.plans(), [J13], "J")
        assert rep.self_survivor and not rep.eliminated
        assert all(e["value"] == "0" for e in rep.bounds.values())

    def test_refined_and_flags(self, perturbed):
        (rep,) = survivor_sweep(self.plans(), [perturbed], "J")
        assert rep.eliminated
        assert rep.status == {13: "eliminated-by(refined q=29)", 29: "eliminated-by(refined q=13)"}
        assert "p=13 equals an auxiliary prime" in rep.flagged

    def test_zero_at_one_prime_is_not_self_survivor(self, J13):
        eig = {P: (a + 2 if P.q == 13 else a) for P, a in J13.eigenvalues.items()}
        h = J13.with_eigenvalues(eig, label="h13")
        (rep,) = survivor_sweep([AuxiliaryPrimePlan(13), AuxiliaryPrimePlan(29)], [h], "J")
        assert rep.bounds["q=29:standard"]["value"] == "0"
        assert not rep.self_survivor and rep.survivors

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            AuxiliaryPrimePlan(13, mode="fast")

    def test_as_dict_is_json_ready(self, perturbed):
        (rep,) = survivor_sweep(self.plans(), [perturbed], "J")
        d = rep.as_dict()
        assert list(d["status"]) == ["13", "29"]
        assert d["label"] == "h"


class TestRefined:
    def test_p_equals_q(self, perturbed):
        assert refined_eliminate(perturbed, 13, 13, ObjectKind.J).status == "survives"

    def test_index_divisor_caveat(self):
        spec = NumberFieldSpec((3, 0, 1))  # Z[sqrt(-3)], index 2
        f = NewformRecord("x", "Q", 196, spec, {5: NFElement(spec, (0, 1))})
        assert refined_eliminate(f, 2, 5, ObjectKind.E).status == "survives-with-caveat"

    def test_E_refined_kills_wrong_trace(self):
        f = rational_form("t", {5: 5})  # |a_5| too big for any E_{x,y}
        assert refined_eliminate(f, 11, 5, ObjectKind.E).eliminated


class TestEisensteinWitness:
    def test_11a_is_eisenstein_mod_5(self):
        (f,) = classical_newforms(11, 40)
        w = reducibility_witness(f, 5, 40)
        assert w.status == "witnessed" and w.primes_above_p == 1

    def test_refuted(self):
        (f,) = classical_newforms(11, 40)
        w = reducibility_witness(f, 13, 40)
        assert w.status == "refuted" and w.failing is not None

    def test_inconclusive_without_primes(self):
        f = rational_form("t", {}, level=11)
        assert reducibility_witness(f, 5, 40).status == "inconclusive"
