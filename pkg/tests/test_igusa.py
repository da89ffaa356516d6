from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from k3chi10 import forms, igusa
from k3chi10.series import HalfLaurent, SeriesError, TruncSeries


def _jac(s):
    return s.map(lambda c: c * forms.ONE)


def test_three_constructions_agree_small_box():
    P, H, L = igusa.chi10_product(4, 4), igusa.chi10_exp_hecke(4, 4), igusa.chi10_additive_lift(4, 4)
    d = igusa.siegel_to_dict(P)
    assert d == igusa.siegel_to_dict(H) == igusa.siegel_to_dict(L)
    assert igusa.siegel_swap_symmetric(P)


def test_first_fourier_jacobi_coefficient_is_minus_F2_Delta():
    P = igusa.chi10_product(4, 3)
    K = forms.theta_K(4)
    ref = K * K * _jac(forms.delta(4))  # -F^2 Delta
    assert P[1].equal_upto(ref, 4)


def test_leading_monomials():
    d = igusa.chi10_product_dict(3, 3)
    # qt q (p - 2 + 1/p)
    assert {k: v for (dd, h, k), v in d.items() if (dd, h) == (1, 1)} == {1: 1, 0: -2, -1: 1}


@given(st.integers(1, 5), st.integers(1, 5))
def test_product_dict_is_p_symmetric(Nq, Nqt):
    d = igusa.chi10_product_dict(Nq, Nqt)
    assert all(d.get((a, b, -k)) == v for (a, b, k), v in d.items())


@pytest.mark.parametrize("d", [-1, 0, 1, 2])
def test_psi_closed_forms(d):
    fam = igusa.inverse_chi10(5, 5, (-8, 8))
    ref = igusa.psi_closed_form(d, 3, (-8, 8))
    for n in range(-1, 3):
        assert fam.psi[d][n].agrees_with(ref[n], 17)


def test_psi_minus_one_leading():
    # chi_10 = qt K^2 Delta + ..., so psi_{-1} = 1/(K^2 Delta) with q^-1 coefficient t^2/(1-t^2)^2
    fam = igusa.inverse_chi10(4, 3, (-6, 6))
    c = fam.psi[-1][-1]
    assert c.agrees_with(HalfLaurent({2 * k: k for k in range(1, 7)}), 13)


def test_windows_restrict_consistently():
    small = igusa.inverse_chi10(5, 4, (-5, 5))
    big = igusa.inverse_chi10(5, 4, (-9, 9))
    for d in (-1, 0, 1):
        for n in range(-1, 3):
            assert big.psi[d][n].agrees_with(small.psi[d][n], 11)


@pytest.mark.parametrize("d", [-1, 0, 1, 2])
def test_polar_part_matches_product_expansion(d):
    # a(d) G^(d+1)/(F^2 Delta) against the qt-expansion of prod (1 - (qt G)^n)^-24
    w = (-8, 8)
    corr = igusa.correction_series(3, 4, w)
    pol = igusa.polar_part(d, 3, w)
    for n in range(-1, 3):
        assert corr[d][n].agrees_with(pol[n], 17)


def test_finite_parts():
    w = (-10, 10)
    fam = igusa.inverse_chi10(6, 5, w)
    for d in (-1, 0, 1, 2):
        H = igusa.hilb_H(d, 4, w, fam=fam)
        assert all(c.exact for _, c in H.items())
    H1 = igusa.hilb_H_points(1, 4, w, fam=fam)
    ref = _jac(forms.eisenstein(2, 5) * forms.delta_inverse(4) * -2)
    for n in range(-1, 4):
        assert H1[n] == ref[n]


def test_finite_part_detects_small_window():
    with pytest.raises(SeriesError):
        igusa.hilb_H(2, 4, (-2, 2), min_margin=3)


def test_margin_width_counts_top_zero_slots():
    s = TruncSeries("q", 0, [HalfLaurent({0: 1, 2: 3}, trunc=11)], 1)
    assert igusa.margin_width(s, 11) == 4  # p^2 .. p^5 vanish
