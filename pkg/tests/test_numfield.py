from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

from multifrey.numfield import (
    OMEGA,
    IndexDivisorError,
    KElement,
    NFElement,
    NumberFieldSpec,
    find_K_embeddings,
    k_in_field,
    k_norm,
    nf_norm,
    residue_maps_mod_p,
    split_prime,
    unit_gcd_primes,
)

K_POLY = (-1, -2, 1, 1)


def test_omega_satisfies_cubic():
    w = OMEGA
    assert w * w * w + w * w - 2 * w - 1 == KElement(0)


def test_sigma_has_order_three():
    u = KElement(3, -1, 4)
    assert u.sigma(3) == u
    assert u.sigma(1) != u
    assert (u + u.sigma(1) + u.sigma(2)).coords[1:] == (0, 0)


@pytest.mark.parametrize("u,v", [(KElement(1, 2, 3), KElement(-4, 0, 7)), (KElement(5), KElement(0, 1, 1))])
def test_norm_is_multiplicative(u, v):
    assert k_norm(u * v) == k_norm(u) * k_norm(v)


def test_norm_of_rational():
    assert k_norm(KElement(5)) == 125


def test_unit_gcd_primes_exponent_84():
    assert unit_gcd_primes(84) == {13, 29, 43, 127, 337, 757, 2017}


class TestPrimes:
    def test_split_roots_are_an_orbit(self):
        Ps = split_prime(13)
        assert len({P.root for P in Ps}) == 3
        assert Ps[0].sigma(3) == Ps[0]

    def test_residue_is_a_ring_map(self):
        P = split_prime(29)[1]
        u, v = KElement(2, -3, 5), KElement(-1, 4, 1)
        assert P.residue(u * v) == P.residue(u) * P.residue(v) % 29
        assert P.residue(u + v) == (P.residue(u) + P.residue(v)) % 29

    def test_inert_residue_field(self):
        (P,) = split_prime(5)
        assert P.f == 3 and P.norm == 125
        F = P.residue_field
        u, v = KElement(1, 1, 0), KElement(0, 2, 3)
        assert P.residue(u * v) == F.mul(P.residue(u), P.residue(v))

    def test_ramified_seven(self):
        (P,) = split_prime(7)
        assert P.ramified and P.norm == 7

    def test_not_prime(self):
        with pytest.raises(ValueError):
            split_prime(15)


class TestHeckeFields:
    def test_K_contains_itself_three_ways(self):
        spec = NumberFieldSpec(K_POLY)
        roots = find_K_embeddings(spec)
        assert len(roots) == 3
        for r in roots:
            assert r * r * r + r * r - 2 * r - 1 == NFElement(spec, (0,))

    def test_sextic_compositum(self):
        # K(i): minimal polynomial of omega + i
        x = sympy.symbols("x")
        mp = sympy.minimal_polynomial(2 * sympy.cos(2 * sympy.pi / 7) + sympy.I, x)
        spec = NumberFieldSpec(tuple(int(c) for c in reversed(sympy.Poly(mp, x).all_coeffs())))
        assert spec.degree == 6
        roots = find_K_embeddings(spec)
        assert len(roots) == 3
        u = KElement(1, 2, -1)
        images = {k_in_field(u, r) for r in roots}
        assert len(images) == 3
        assert all(nf_norm(z) == k_norm(u) ** 2 for z in images)

    def test_field_without_K(self):
        spec = NumberFieldSpec((-2, 0, 0, 1))  # Q(2^(1/3))
        assert find_K_embeddings(spec) == []

    def test_residue_maps_split_and_inert(self):
        spec = NumberFieldSpec(K_POLY)
        assert len(residue_maps_mod_p(spec, 13)) == 3
        assert len(residue_maps_mod_p(spec, 5)) == 1

    def test_index_divisor(self):
        # Z[sqrt(-3)] has index 2 in the maximal order
        with pytest.raises(IndexDivisorError):
            residue_maps_mod_p(NumberFieldSpec((3, 0, 1)), 2)

    def test_nfelement_arithmetic(self):
        spec = NumberFieldSpec((-2, 0, 1))
        a = NFElement(spec, (1, 1))
        assert a * a == NFElement(spec, (3, 2))
        assert a**3 == a * a * a
        assert nf_norm(a) == -1
        assert a.charpoly() == [-1, -2, 1]
        assert NFElement(spec, (Fraction(1, 2),)) * 2 == NFElement(spec, (1,))
