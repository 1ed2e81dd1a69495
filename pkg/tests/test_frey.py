from __future__ import annotations

import pytest

from multifrey.frey import (
    CaseDescriptor,
    CaseError,
    E_case_compatible,
    FreyC7,
    FreyE,
    FreyF,
    KLevel,
    ObjectKind,
    ReductionType,
    Route,
    SevenCase,
    TwoCase,
    all_cases,
    check_shape_d3,
    classify_reduction,
    conductor_E,
    conductor_exponent_E_at_2,
    conductor_F_at_q2_q7,
    phi7,
    route_case,
    route_table,
    serre_level_F,
    serre_level_J,
)
from multifrey.numfield import KElement, split_prime


def test_phi7_factor():
    for a, b in [(1, 2), (3, -5), (4, 1)]:
        assert phi7(a, b) * (a + b) == a**7 + b**7


class TestE:
    def test_survivor_conductors(self):
        assert conductor_E(1, 0) == 196
        assert conductor_E(1, -1) == 392

    @pytest.mark.parametrize("a,b,alpha", [(4, 1, 2), (2, 1, 3), (1, 3, 3), (1, 1, 4)])
    def test_conductor_at_2(self, a, b, alpha):
        assert conductor_exponent_E_at_2(a, b) == alpha

    def test_not_coprime(self):
        with pytest.raises(CaseError):
            conductor_exponent_E_at_2(2, 4)

    def test_multiplicative_primes(self):
        E = FreyE(1, 2)  # phi7(1, 2) = 43
        assert classify_reduction(E, 43) is ReductionType.MULTIPLICATIVE
        assert classify_reduction(E, 13) is ReductionType.GOOD


class TestF:
    def test_twist_scales_c4_c6(self):
        F = FreyF(2, 1)
        d = KElement(-7)
        T = F.twist(d)
        assert T.c4 == d * d * F.c4
        assert T.c6 == d * d * d * F.c6

    def test_closed_form_C(self):
        F = FreyF(3, 1)
        assert F.C == F.C_closed_form()

    def test_conductor_small_exponents(self):
        # ab odd, 4 || a + b: good at q2; 7 coprime to a + b: additive at q7
        assert conductor_F_at_q2_q7(1, 3, KElement(1)) == (0, 2)
        assert conductor_F_at_q2_q7(1, 1, KElement(1)) == (4, 2)
        # twisting by -7 removes the additive part at q7
        assert conductor_F_at_q2_q7(1, 3, KElement(-7))[1] == 0

    def test_reduction_at_K_primes(self):
        F = FreyF(1, 2)
        P43 = split_prime(43)
        kinds = {classify_reduction(F, P) for P in P43}
        assert ReductionType.MULTIPLICATIVE in kinds


class TestC7:
    def test_bad_primes(self):
        C = FreyC7(1, 2)
        assert not C.has_good_reduction(43)  # 43 | 1 + 2^7 = 129
        assert C.has_good_reduction(13)
        assert FreyC7(0, 1).has_cm

    def test_discriminant_sign(self):
        assert FreyC7(1, 1).discriminant < 0


class TestCases:
    def test_from_solution(self):
        c = CaseDescriptor.from_solution(1, 2, d=3)
        assert c.two_case is TwoCase.TWO_EXACT and not c.seven_divides

    def test_shape_d3(self):
        with pytest.raises(CaseError):
            check_shape_d3(1, 1)  # 3 does not divide a + b
        with pytest.raises(CaseError):
            check_shape_d3(1, 5)  # 2 || 6
        check_shape_d3(1, 23)

    def test_levels(self):
        odd = CaseDescriptor(3, TwoCase.ODD_AB, SevenCase.COPRIME)
        assert serre_level_F(odd) == KLevel(1, 1, 0)
        assert serre_level_F(odd, d=1) == KLevel(1, 0, 0)
        four7 = CaseDescriptor(3, TwoCase.FOUR_DIVIDES, SevenCase.DIVIDES)
        assert serre_level_J(four7) == KLevel(2, 1, 1, chi7_twist=True)
        assert serre_level_J(CaseDescriptor(1, TwoCase.TWO_EXACT, SevenCase.COPRIME)) == KLevel(2, 0, 2)
        with pytest.raises(CaseError):
            serre_level_J(odd)

    def test_level_labels(self):
        for lv in (KLevel(1, 1, 0), KLevel(3, 1, 1), KLevel(2, 1, 2), KLevel(2, 0, 2)):
            assert KLevel.parse(lv.label) == lv
        assert KLevel.parse("q2_3q3") == KLevel(3, 1, 0)
        assert KLevel(2, 1, 2).norm == 64 * 27 * 49
        with pytest.raises(ValueError):
            KLevel.parse("q5")

    def test_fastest_route(self):
        table = route_table(Route.FASTEST)
        assert table["d3/odd_ab/7_not_div"] == "E"
        assert table["d3/four_divides/7_div"] == "J"
        assert len(all_cases()) == 6

    def test_elliptic_only_uses_F(self):
        for case in all_cases(3, Route.ELLIPTIC_ONLY):
            (step,) = route_case(case)
            assert step.kind is ObjectKind.F
            assert step.level == serre_level_F(case)

    def test_E_survivors_never_fit_routed_cases(self):
        for case in all_cases(3, Route.FASTEST):
            if route_case(case)[0].kind is ObjectKind.E:
                assert not E_case_compatible((1, 0), case)
                assert not E_case_compatible((1, -1), case)
        assert E_case_compatible((1, 0), CaseDescriptor(3, TwoCase.FOUR_DIVIDES, SevenCase.COPRIME))
