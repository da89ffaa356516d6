import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from k3chi10 import enumerative as en
from k3chi10.series import SeriesError, TruncSeries


@pytest.fixture(scope="module")
def gw():
    return en.gw_disconnected(6, 4, 4)


def test_chi10_in_u_starts_at_u2():
    X = en.chi10_u(5, 3, 3)
    assert X.val == 2
    assert X[2][1][1] == -1  # -q qt u^2


def test_kkv_column():
    assert en.kkv_check(6, 4)


def test_yau_zaslow():
    assert en.yau_zaslow_row(5) == [1, 24, 324, 3200, 25650]


def test_q_qt_symmetry(gw):
    assert en.qqt_symmetric(gw)


def test_connect_roundtrip(gw):
    c = en.connect(gw)
    assert c.connected
    assert (en.disconnect(c).series - gw.series).is_zero()
    with pytest.raises(SeriesError):
        en.connect(c)


def test_connected_qt0_column():
    assert en.connected_qt0_check(6, 4)


def test_coefficient_accessor(gw):
    # genus 0, h = 1, d = 0 is the qt^-1 q^0 u^-2 coefficient: 24
    assert gw.coefficient(0, 1, 0) == 24


def subgroups_of_order(m):
    """Subgroups of (Z/m)^2 of order m, by closure of generator pairs."""
    elems = list(itertools.product(range(m), repeat=2))
    seen = set()
    for a, b in itertools.combinations_with_replacement(elems, 2):
        grp = frozenset(((i * a[0] + j * b[0]) % m, (i * a[1] + j * b[1]) % m)
                        for i in range(m) for j in range(m))
        if len(grp) == m:
            seen.add(grp)
    return len(seen)


@pytest.mark.parametrize("m", range(1, 7))
def test_hnf_count_against_subgroups(m):
    # index-m sublattices of Z^2 contain m Z^2, so they are order-m subgroups of (Z/m)^2
    assert en.sublattice_count(m) == subgroups_of_order(m)


@given(st.integers(1, 200))
def test_sublattices_are_divisor_sums(m):
    assert en.sublattice_count(m) == sum(k for k in range(1, m + 1) if m % k == 0)


@pytest.fixture(scope="module")
def table():
    return en.primitive_table(en.connect(en.gw_disconnected(4, 4, 3)))


def test_conjecture_B_trivial_multiple(table):
    assert (en.conjecture_B(1, 2, table) - table[2]).is_zero()


def test_conjecture_B_h0_keeps_only_k_equal_m(table):
    B = en.conjecture_B(3, 0, table)
    ref = en.scale_u(table[0], 3) * Fraction(1, 3)
    assert (B - ref).is_zero()


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_conjecture_B_genus1_elliptic_covers(table, m):
    B = en.conjecture_B(m, 1, table)
    assert B[0].equal_upto(table[1][0] * en.elliptic_cover_weight(m), 2)


def test_conjecture_B_missing_primitive(table):
    with pytest.raises(en.MissingPrimitive):
        en.conjecture_B(3, 2, table)


def test_c2_divisor_sums():
    fx = en.load_fixtures()
    g, dl, prim = en.fixture_primitive(fx, "tau0(p)|g=1")
    assert [en.conjecture_C2(m, g, dl, prim, 1) for m in range(1, 7)] == [1, 3, 4, 7, 6, 12]


def test_c2_genus2_and_geometry():
    fx = en.load_fixtures()
    g, dl, prim = en.fixture_primitive(fx, "tau0(p),tau0(p)|g=2")
    assert en.conjecture_C2(2, g, dl, prim, 2) == 8728 + 32 == 8760
    assert en.genus2_geometric_total(fx) == (6312, 1800, 648)


def test_fixtures_carry_provenance():
    fx = en.load_fixtures()
    for entry in fx["primitive"].values():
        assert all("provenance" in v for v in entry["values"].values())


def test_custom_fixture_file(tmp_path):
    p = tmp_path / "fx.json"
    p.write_text(json.dumps({"primitive": {"x": {"g": 1, "deltas": [2],
                                                 "values": {"1": {"value": 5, "provenance": "test"}}}}}))
    g, dl, prim = en.fixture_primitive(en.load_fixtures(str(p)), "x")
    assert en.conjecture_C2(4, g, dl, prim, 1) == 5 * 7


@pytest.fixture(scope="module")
def ky():
    return en.KYSeries(6, 5)


def test_ky_w_inversion_symmetry(ky):
    for wp in ky.terms.values():
        assert all(wp.get(-e, 0) == c for e, c in wp.items())


def test_ky_at_minus_one_is_psi_minus_one():
    assert en.ky_matches_psi_minus1(Ny=6, Nq=3, window=(-8, 8))


def test_ky_lowest_symmetry():
    assert en.ky_lowest_symmetric(3)


def test_ky_leading_terms(ky):
    # q^-1 y (1 + ...) and the (h, d) = (1, 0) lowest coefficient at q^0 y^0
    assert ky.coeff(-1, 1) == {0: 1}
    assert en.ky_lowest(ky, 1, 0) == ky.coeff(0, 0) == {1: 1, -1: 1}


def test_ky_out_of_range(ky):
    with pytest.raises(SeriesError):
        ky.coeff(10, 0)
