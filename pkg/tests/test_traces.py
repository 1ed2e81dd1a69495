from __future__ import annotations

import io
from importlib.resources import files

import pytest

from multifrey.frey import FreyC7
from multifrey.heckedata import load_records
from multifrey.numfield import KElement, NFElement, split_prime
from multifrey.traces import (
    BadReduction,
    LPoly,
    chi7_sign,
    count_points_C7,
    count_points_E,
    count_points_F,
    dump_trace_sets_csv,
    inert_trace_via_lpoly,
    lpoly_C7,
    lpoly_from_counts,
    projective_classes,
    projective_normalize,
    symmetry_sign,
    trace_set,
    trace_set_table,
    weil_relations_text,
)


def bundled(level: int):
    return {r.label: r for r in load_records(files("multifrey") / "data" / f"classical_{level}.json")}


class TestEllipticCounts:
    def test_E10_matches_196a(self):
        rec = bundled(196)["196.a"]
        for q in (3, 5, 11, 13, 17, 19, 23):
            assert rec.ap(q) == NFElement(rec.hecke_field, (count_points_E(1, 0, q),))

    def test_bad_reduction(self):
        with pytest.raises(BadReduction):
            count_points_E(1, 2, 43)  # 43 = phi7(1, 2)
        with pytest.raises(ValueError):
            count_points_E(1, 0, 7)

    def test_F_hasse_bound(self):
        for P in split_prime(29):
            t = count_points_F(1, 2, KElement(1), P)
            assert t * t <= 4 * 29


class TestLPoly:
    def test_from_counts_roundtrip(self):
        L = lpoly_C7(1, 2, 11)
        assert lpoly_from_counts(L.point_counts(3), 11) == L

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            LPoly(5, (1, 2, 3))

    def test_weil_relations_agree_with_coefficients(self):
        assert weil_relations_text() == ["c1 = -e1", "c2 = e2 + 3*q", "c3 = -2*e1*q - e3"]
        for q in (5, 13):
            L = lpoly_C7(1, 3, q)
            e1, e2, e3 = L.real_weil_cubic()
            assert L.coeffs[1:4] == (-e1, e2 + 3 * q, -2 * e1 * q - e3)

    def test_count_extension_degree_guard(self):
        with pytest.raises(ValueError):
            count_points_C7(1, 2, 5, 4)
        with pytest.raises(BadReduction):
            count_points_C7(1, 2, 43)


class TestTraceSets:
    def test_split_has_three_elements(self):
        T = trace_set(1, 2, 13)
        assert len(T) == 3 and T.residue_degree == 1

    @pytest.mark.parametrize("x,y", [(1, 2), (1, 3), (2, 5), (0, 1)])
    def test_inert_shortcut_matches_base_change(self, x, y):
        (a,) = trace_set(x, y, 11).elements
        assert a == KElement(inert_trace_via_lpoly(x, y, 11))

    def test_projective_normalisation(self):
        (x, y), lam = projective_normalize(3, 6, 13)
        assert (x, y) == (1, 2)
        assert trace_set(3, 6, 13) == trace_set(1, 2, 13).signed(1 if pow(lam, 6, 13) == 1 else -1)
        assert len(projective_classes(13)) == 14

    def test_table_marks_bad_pairs(self):
        table = trace_set_table(13, [(1, 2), (1, 12)])
        assert table[(1, 12)] is None  # 1 + 12^7 = 0 mod 13
        assert table[(1, 2)] is not None

    def test_csv(self):
        buf = io.StringIO()
        assert dump_trace_sets_csv(13, buf, [(0, 1), (1, 12)]) == 2
        rows = buf.getvalue().splitlines()
        assert rows[0] == "q,x,y,trace_set"
        assert rows[1] == '13,0,1,"(0,0,0)"'
        assert rows[2].endswith("bad")

    def test_cm_curve_has_zero_trace_at_13(self):
        # y^2 = x^7 + 1 has CM by Q(zeta_7) and 13 is not 1 mod 7
        assert trace_set(0, 1, 13).elements == frozenset({KElement(0)})


class TestSigns:
    def test_chi7_ramified(self):
        with pytest.raises(ValueError):
            chi7_sign(7)

    @pytest.mark.parametrize("q,sign", [(13, -1), (29, 1), (43, 1), (41, -1), (3, -1), (5, -1), (11, 1)])
    def test_chi7_values(self, q, sign):
        assert chi7_sign(q) == sign

    def test_symmetry_needs_odd_q(self):
        with pytest.raises(ValueError):
            symmetry_sign(2)

    def test_symmetry_values(self):
        assert symmetry_sign(13) == 1
        assert symmetry_sign(43) == -1
        assert symmetry_sign(3) == -1  # 27 = 3 mod 4


def test_curve_coefficients_constant_first():
    assert FreyC7(0, 1).coefficients[0] != 0
    assert len(FreyC7(1, 2).coefficients) == 8
