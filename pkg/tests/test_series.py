from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from k3chi10.series import (HalfLaurent, SeriesError, TruncSeries, UnknownCoefficient, scale_u,
                            series_from_json, series_to_json, substitute_y_to_u, t_precision)

coef = st.fractions(min_value=-20, max_value=20, max_denominator=7)
terms = st.dictionaries(st.integers(-6, 6), coef, max_size=5)


def naive_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


@given(terms, terms)
def test_laurent_product_matches_naive(a, b):
    assert (HalfLaurent(a) * HalfLaurent(b)).to_dict() == naive_mul(a, b)


@given(terms, terms, terms)
def test_laurent_ring_axioms(a, b, c):
    A, B, C = HalfLaurent(a), HalfLaurent(b), HalfLaurent(c)
    assert A * (B + C) == A * B + A * C
    assert (A * B) * C == A * (B * C)
    assert A - A == HalfLaurent({})


def test_windowed_inverse_is_geometric():
    with t_precision(21):
        inv = HalfLaurent({0: 1, 2: -1}).inverse()
    assert inv.trunc == 21
    assert inv.to_dict() == {2 * k: 1 for k in range(11)}
    with pytest.raises(UnknownCoefficient):
        inv[21]


@given(st.dictionaries(st.integers(1, 5), coef, max_size=4), coef.filter(lambda x: x != 0),
       st.integers(-3, 3))
def test_inverse_times_self_is_one(tail, lead, shift):
    h = HalfLaurent({shift: lead, **{shift + e: c for e, c in tail.items()}})
    with t_precision(15):
        inv = h.inverse()
    prod = h * inv
    assert prod.agrees_with(HalfLaurent({0: 1}), prod.trunc)


def test_truncation_is_honest():
    a = TruncSeries("q", 0, [1, 2, 3], 3)
    b = TruncSeries("q", 1, [1, 1], 5)
    p = a * b
    assert p.trunc == 4  # min(3 + 1, 5 + 0)
    with pytest.raises(UnknownCoefficient):
        p[4]


@given(st.lists(coef, min_size=1, max_size=6).filter(lambda c: c[0] != 0))
def test_series_inverse(cs):
    s = TruncSeries("q", 0, cs, 8)
    one = s * s.invert()
    assert one.equal_upto(TruncSeries("q", 0, [1], 8), 8)


@given(st.lists(coef, min_size=1, max_size=5))
def test_exp_log_roundtrip(cs):
    s = TruncSeries("x", 1, cs, 7)
    assert s.exp().log().equal_upto(s, 7)


def test_exp_rejects_constant_term():
    with pytest.raises(SeriesError):
        TruncSeries("x", 0, [1, 1], 4).exp()


def test_variable_mismatch():
    with pytest.raises(SeriesError):
        TruncSeries("q", 0, [1], 3) * TruncSeries("u", 0, [1], 3)


@given(terms, st.one_of(st.none(), st.integers(7, 12)))
def test_json_roundtrip_nested(a, trunc):
    h = HalfLaurent(a, trunc)
    inner = TruncSeries("q", -1, [h, 0, h * h], 4)
    outer = TruncSeries("qt", 0, [inner, inner * 2], 3)
    assert series_from_json(series_to_json(outer)) == outer


@given(st.dictionaries(st.integers(-4, 4), coef, max_size=4),
       st.dictionaries(st.integers(-4, 4), coef, max_size=4))
def test_u_substitution_is_multiplicative(a, b):
    A, B = HalfLaurent(a), HalfLaurent(b)
    lhs = substitute_y_to_u(A * B, 6)
    rhs = substitute_y_to_u(A, 6) * substitute_y_to_u(B, 6)
    assert lhs.equal_upto(rhs, 6)


def test_u_substitution_of_p_plus_inverse():
    # p + 1/p = 2 cos u = 2 - u^2 + u^4/12 - ...
    s = substitute_y_to_u(HalfLaurent({2: 1, -2: 1}), 5, require_real=True)
    assert [s[n] for n in range(5)] == [2, 0, -1, 0, Fraction(1, 12)]


def test_u_substitution_refuses_windowed():
    with pytest.raises(SeriesError):
        substitute_y_to_u(HalfLaurent({0: 1}, trunc=5), 3)


def test_scale_u():
    s = TruncSeries("u", -2, [1, 0, 3], 1)
    assert scale_u(s, 2) == TruncSeries("u", -2, [Fraction(1, 4), 0, 3], 1)
