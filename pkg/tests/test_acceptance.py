"""The twelve acceptance criteria, each at its stated truncation and bit-exact."""
import time

import pytest

from k3chi10 import enumerative, fock, forms, igusa, verify
from k3chi10.series import HalfLaurent, TruncSeries, t_precision

from conftest import ACCEPTANCE_LINES


def record(n: int, title: str, budget: float, result: verify.CheckResult, extra: str = ""):
    in_time = result.seconds < budget
    ok = result.ok and in_time
    line = (f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} "
            f"({result.seconds:.1f}s / {budget:.0f}s budget){extra}")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.ok, result.details
    assert in_time, f"{result.seconds:.1f}s exceeds the {budget}s budget"


W = (-10, 10)


def test_criterion_01_weierstrass():
    record(1, "wp expansions and log-derivative identity", 5, verify.weierstrass(8, W))


def test_criterion_02_chi10_three_way():
    res = verify.chi10_three_way(5, 5)
    assert res.details["monomials"] > 0
    record(2, "chi_10 product = exponential Hecke = additive lift, swap-symmetric", 60, res)


def test_criterion_03_psi_closed_forms():
    record(3, "psi_-1 .. psi_2 closed forms", 60, verify.psi_closed_forms(5, W))


def test_criterion_04_hilbert_split():
    record(4, "H_d finite (margin >= 3), H for one point = -2E2/Delta", 30,
           verify.hilbert_split(5, W, margin=3))


def test_criterion_05_correction_identity():
    record(5, "-2E2/Delta + 24G/(F^2 Delta) = -24 wp/Delta", 5, verify.correction_identity(5, W))


def test_criterion_06_fock_examples():
    record(6, "Fock examples (i), (ii), (iii) for d <= 4", 120, verify.fock_examples(4, 5, W))


def test_criterion_07_trace():
    record(7, "trace of E^(0) on F_d, d <= 2, equals -psi_{d-1}", 300, verify.trace_identity(2, 5, W))


def test_criterion_08_wdvv():
    res = verify.wdvv(2, 4, W, mutations=True)
    unread = {tuple(k) for k in res.details["unreached_seeds"]}
    # the two m = 2 seeds with l < 0 are not read by any d <= 2 residual (ledger)
    assert unread == {(-2, 1), (-2, 2)}
    n_mut = sum(1 for k in res.details if k.startswith("mutation_"))
    record(8, "WDVV residuals vanish for (B,F), (B,B+F), d <= 2; mutations detected", 300, res,
           extra=f"; mutation control covers the {n_mut} seed orbits read at d <= 2,"
                 " phi_{2,-1} and phi_{2,-2} are unread there")


def test_criterion_08_unread_seeds_leave_residuals_unchanged():
    base = fock.printed_seeds(6)
    for key in [(2, -1), (2, -2)]:
        mutated = verify.mutate_seed(base, key)
        for d in (1, 2):
            a = fock.wdvv_check(d, "B", "F", 4, phi=mutated, window=(-6, 6))
            assert not any(a.values())


@pytest.mark.xfail(strict=True, reason="phi_{2,-1}, phi_{2,-2} do not enter any residual on F_d, d <= 2")
def test_criterion_08_literal_any_seed_mutation():
    mutated = verify.mutate_seed(fock.printed_seeds(6), (2, -1))
    broke = any(any(fock.wdvv_check(d, "B", "F", 4, phi=mutated, window=(-6, 6)).values())
                for d in (1, 2))
    assert broke


def test_criterion_09_a1_resolution():
    record(9, "E_B vacuum, leading coefficients, 20-2-2 product trace", 60, verify.a1_resolution(2, W))


def test_criterion_10_kkv():
    res = verify.kkv(8, 5)
    assert res.details["genus0_row"] == ["1", "24", "324", "3200"]
    record(10, "KKV column to u^8, q^5; genus-0 row 1, 24, 324, 3200", 30, res)


def test_criterion_11_multiple_cover():
    record(11, "C2 divisor sums, 8760 = 8728 + 32 = 6312 + 1800 + 648, elliptic covers m <= 4", 10,
           verify.multiple_cover(6, 4))


def test_criterion_12_motivic():
    record(12, "refined series at w = -1 and lowest-coefficient symmetry h, d <= 3", 60,
           verify.motivic(3, W))
