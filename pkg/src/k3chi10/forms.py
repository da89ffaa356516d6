"""Classical modular and Jacobi special functions as exact q-series.

Conventions: ``t**2 = p = exp(2 pi i z)``, ``y = -p``, ``q = exp(2 pi i tau)``.
The theta function is stored as ``K = iF``, which has rational coefficients
``K = (t - 1/t) prod_m (1 - p q^m)(1 - q^m/p) / (1 - q^m)^2``; ``F = -iK``
and ``F**2 = -K**2``.

Everything that is a genuine Laurent polynomial per q-order (K, G, Z, ...)
is exact.  Quantities with a pole at ``z = 0`` (``1/K``, ``wp``) are
windowed in t, expanded in ascending powers of p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import flint

from .series import (HalfLaurent, SeriesError, TruncSeries, UnknownCoefficient, substitute_y_to_u,
                     t_precision)

__all__ = [
    "JacobiSeries",
    "CoefficientTable",
    "eisenstein",
    "renormalized_eisenstein",
    "delta",
    "eta_power",
    "delta_inverse",
    "a_table",
    "theta_K",
    "theta_F_squared",
    "weierstrass_p",
    "weierstrass_p_times_K2",
    "weierstrass_p_u",
    "theta_F_u",
    "g_function",
    "z_function",
    "z_function_and_c",
    "hecke_V",
    "gottsche_product",
    "jacobi_to_u",
    "tpoly",
]


def tpoly(terms: dict) -> HalfLaurent:
    """Shorthand: exact HalfLaurent from ``{t_exponent: coefficient}``."""
    return HalfLaurent(terms)


ONE = HalfLaurent.monomial(0)


class JacobiSeries(TruncSeries):
    """q-series with HalfLaurent coefficients tagged with weight and index.

    Arithmetic returns plain :class:`TruncSeries`; re-tag with
    :meth:`tagged` when metadata is needed downstream.
    """

    __slots__ = ("weight", "index")

    def __init__(self, series: TruncSeries, weight=None, index=None):
        super().__init__(series.var, series.val, series.coeffs, series.trunc)
        self.weight = weight
        self.index = None if index is None else Fraction(index)

    def tagged(self, weight, index):
        return JacobiSeries(self, weight, index)

    def p_support_ok(self) -> bool:
        """Check ``|p-exponent| <= index + n`` style support is finite per q-order."""
        return all(isinstance(c, HalfLaurent) and c.exact for _, c in self.items())


@dataclass
class CoefficientTable:
    """``c(m)`` for ``m`` up to ``mmax``; zero below ``-1`` by construction."""

    c: dict = field(default_factory=dict)
    mmax: int = -1

    def __call__(self, m: int) -> int:
        if m < -1:
            return 0
        if m > self.mmax:
            raise UnknownCoefficient(f"c({m}) needs a longer Z expansion (have m <= {self.mmax})")
        return self.c.get(m, 0)


# ---------------------------------------------------------------------------
# modular forms in q


def _sigma(n: int, k: int) -> int:
    return int(flint.fmpz(n).divisor_sigma(k))


def eisenstein(k: int, N: int) -> TruncSeries:
    """``E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`` known for exponents < N."""
    if k < 2 or k % 2:
        raise SeriesError(f"Eisenstein weight must be even and >= 2, got {k}")
    b = flint.fmpq.bernoulli(k)
    factor = -Fraction(2 * k) / Fraction(int(b.p), int(b.q))
    coeffs = [Fraction(1)] + [factor * _sigma(n, k - 1) for n in range(1, N)]
    return TruncSeries("q", 0, coeffs[:N], N)


def renormalized_eisenstein(two_k: int, N: int) -> TruncSeries:
    """``C_{2k} = -B_{2k} / (2k (2k)!) E_{2k}``."""
    b = flint.fmpq.bernoulli(two_k)
    f = -Fraction(int(b.p), int(b.q)) / (two_k * math.factorial(two_k))
    return eisenstein(two_k, N) * f


def eta_power(e: int, N: int, var: str = "q") -> TruncSeries:
    """``prod_{n>=1} (1 - x^n)^e`` to order N (e may be negative)."""
    c = [0] * N
    if N:
        c[0] = 1
    # build prod (1 - x^n) by in-place shifts, then take the e-th power
    for n in range(1, N):
        for j in range(N - 1, n - 1, -1):
            c[j] -= c[j - n]
    base = TruncSeries(var, 0, c, N)
    return base ** e


def delta(N: int) -> TruncSeries:
    """``Delta = q prod (1 - q^n)^24``, coefficients known below q^N."""
    if N < 1:
        raise SeriesError("delta needs N >= 1")
    return eta_power(24, N - 1).shift(1)


def delta_inverse(N: int) -> TruncSeries:
    """``1/Delta`` known below q^N (valuation -1)."""
    return eta_power(-24, N + 1).shift(-1)


def a_table(dmax: int) -> dict:
    """``a(d)`` = coefficient of ``q^d`` in ``1/Delta`` for ``-1 <= d <= dmax``."""
    inv = delta_inverse(dmax + 1)
    return {d: inv[d] for d in range(-1, dmax + 1)}


def gottsche_product(N: int) -> TruncSeries:
    """``sum_d chi(S^[d]) qt^d = prod (1 - qt^n)^-24`` to order N."""
    return eta_power(-24, N, var="qt")


# ---------------------------------------------------------------------------
# Jacobi functions


def _scalar_to_jacobi(s: TruncSeries) -> TruncSeries:
    return s.map(lambda c: c * ONE)


def theta_K(Nq: int) -> JacobiSeries:
    """``K = iF`` with exact Laurent coefficients up to q^Nq (exclusive)."""
    acc = TruncSeries("q", 0, [tpoly({1: 1, -1: -1})], Nq)
    for m in range(1, Nq):
        # (1 - p q^m)(1 - q^m / p) = 1 - (p + 1/p) q^m + q^{2m}
        fac = TruncSeries("q", 0, [ONE] + [0] * (m - 1) + [tpoly({2: -1, -2: -1})]
                          + [0] * (m - 1) + [ONE])
        acc = acc * fac
    acc = acc * _scalar_to_jacobi(eta_power(-2, Nq))
    return JacobiSeries(acc, weight=-1, index=Fraction(1, 2))


def theta_F_squared(Nq: int) -> JacobiSeries:
    """``F**2 = -K**2`` (integer p-powers, weight -2, index 1)."""
    K = theta_K(Nq)
    return JacobiSeries(-(K * K), weight=-2, index=1)


def g_function(Nq: int) -> JacobiSeries:
    """``G = F d_z^2 F - (d_z F)^2 = -(K d_z^2 K - (d_z K)^2)``; exact."""
    K = theta_K(Nq)
    dK = K.derivative_z()
    ddK = dK.derivative_z()
    G = dK * dK - K * ddK
    return JacobiSeries(G, weight=0, index=1)


def weierstrass_p_times_K2(Nq: int) -> JacobiSeries:
    """``wp * K**2 = G + E_2 K**2 / 12`` (exact; equals ``-wp F**2``)."""
    K = theta_K(Nq)
    K2 = K * K
    return JacobiSeries(g_function(Nq) + K2 * eisenstein(2, Nq) * Fraction(1, 12),
                        weight=0, index=1)


def weierstrass_p(Nq: int, t_trunc: int = 42, method: str = "series") -> TruncSeries:
    """Weierstrass ``wp`` in the region ``|q| < |p| < 1``.

    ``method="series"`` uses ``1/12 + p/(1-p)^2 + sum_{k,r} k (p^k - 2 + p^-k) q^{kr}``;
    only the q^0 coefficient is windowed (known below ``t**t_trunc``).
    ``method="theta"`` uses ``G/K^2 + E_2/12`` through the windowed inverse of K.
    """
    if method == "theta":
        K = theta_K(Nq)
        G = g_function(Nq)
        E2 = _scalar_to_jacobi(eisenstein(2, Nq)) * Fraction(1, 12)
        prec = t_trunc + 4
        while True:
            with t_precision(prec):
                wp = G * (K * K).invert() + E2
            worst = min(c.trunc for _, c in wp.items())
            if worst >= t_trunc:
                return wp.map(lambda c: c.with_trunc(t_trunc))
            prec += t_trunc - worst
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    if t_trunc < 4:
        raise SeriesError("window too small to represent p/(1-p)^2")
    kmax = (t_trunc - 1) // 2
    q0 = HalfLaurent({0: Fraction(1, 12), **{2 * k: k for k in range(1, kmax + 1)}}, trunc=t_trunc)
    coeffs = [q0]
    for n in range(1, Nq):
        terms = {}
        for k in range(1, n + 1):
            if n % k == 0:
                terms[2 * k] = terms.get(2 * k, 0) + k
                terms[-2 * k] = terms.get(-2 * k, 0) + k
                terms[0] = terms.get(0, 0) - 2 * k
        coeffs.append(HalfLaurent(terms))
    return TruncSeries("q", 0, coeffs, Nq)


def z_function(Nq: int) -> JacobiSeries:
    """``Z = -24 wp F^2 = 24 G + 2 E_2 K^2`` (weak Jacobi, weight 0 index 1)."""
    return JacobiSeries(weierstrass_p_times_K2(Nq) * 24, weight=0, index=1)


def z_function_and_c(Nq: int):
    """Return ``(Z, table)`` where ``Z = sum c(4n - k^2) p^k q^n``.

    Raises :class:`SeriesError` if two slots with equal ``4n - k^2`` disagree.
    """
    Z = z_function(Nq)
    c: dict = {}
    for n in range(Nq):
        coeff = Z[n]
        if not isinstance(coeff, HalfLaurent):
            continue
        for e, v in coeff.items():
            if e % 2:
                raise SeriesError(f"odd t-power t^{e} in Z at q^{n}")
            k = e // 2
            m = 4 * n - k * k
            if v.denominator != 1:
                raise SeriesError(f"non-integral c({m}) = {v}")
            v = int(v)
            if m in c and c[m] != v:
                raise SeriesError(f"inconsistent c({m}): {c[m]} vs {v} at (n,k)=({n},{k})")
            c[m] = v
    mmax = 4 * (Nq - 1)
    # every m <= mmax is reached by some (n, k) with n < Nq; a missing key is a zero
    table = CoefficientTable({m: c.get(m, 0) for m in range(-1, mmax + 1)}, mmax)
    for m in c:
        if m < -1:
            raise SeriesError(f"c({m}) = {c[m]} nonzero below -1")
    return Z, table


def hecke_V(phi: TruncSeries, l: int, Nout: int, weight: int | None = None,
            index: int | None = None) -> JacobiSeries:
    """Hecke operator ``V_l`` on integer-index Jacobi-form coefficients.

    ``c'(n, r) = sum_{a | gcd(n, r, l)} a^(k-1) c(n l / a^2, r / a)``.
    The input must be known to q-order ``(Nout - 1) * l + 1``.
    """
    if weight is None:
        weight = getattr(phi, "weight", None)
    if index is None:
        index = getattr(phi, "index", None)
    if weight is None or index is None:
        raise SeriesError("hecke_V needs weight and index metadata")
    if Fraction(index).denominator != 1:
        raise SeriesError("hecke_V is implemented for integral index only")
    if l < 1:
        raise SeriesError("Hecke index must be positive")
    need = (Nout - 1) * l + 1
    if phi.trunc is not None and phi.trunc < need:
        raise UnknownCoefficient(f"V_{l} to q^{Nout} needs input to q^{need}, have q^{phi.trunc}")
    divs = [a for a in range(1, l + 1) if l % a == 0]
    out = []
    for n in range(Nout):
        terms: dict = {}
        for a in divs:
            if n % a:
                continue
            src = phi[n * l // (a * a)]
            if _is_zero_scalar(src):
                continue
            w = Fraction(a) ** (weight - 1)
            for e, v in src.items():
                if e % 2:
                    raise SeriesError("half-integral p-power in an integral-index Jacobi form")
                r = a * (e // 2)
                terms[2 * r] = terms.get(2 * r, 0) + w * v
        out.append(HalfLaurent(terms))
    return JacobiSeries(TruncSeries(phi.var, 0, out, Nout), weight=weight, index=Fraction(index) * l)


def _is_zero_scalar(c) -> bool:
    return not isinstance(c, HalfLaurent) and c == 0


# ---------------------------------------------------------------------------
# u-side (z = u / 2 pi) expansions


def jacobi_to_u(J: TruncSeries, Nu: int, require_real: bool = True) -> TruncSeries:
    """Substitute ``p = exp(iu)`` into each q-coefficient; returns a u-series of q-series."""
    cols: dict = {}
    for n, c in J.items():
        us = substitute_y_to_u(c if isinstance(c, HalfLaurent) else c * ONE, Nu, require_real)
        for k, v in us.items():
            cols.setdefault(k, {})[n] = v
    coeffs = []
    for k in range(Nu):
        d = cols.get(k, {})
        coeffs.append(TruncSeries.from_dict("q", d, J.trunc) if d else
                      TruncSeries("q", J.trunc or 0, [], J.trunc))
    return TruncSeries("u", 0, coeffs, Nu)


def theta_F_u(Nu: int, Nq: int) -> TruncSeries:
    """``F = u exp(-sum_k (-1)^k C_2k u^2k)`` as a u-series with q-series coefficients."""
    terms = {}
    for k in range(1, (Nu + 1) // 2 + 1):
        if 2 * k >= Nu:
            break
        terms[2 * k] = renormalized_eisenstein(2 * k, Nq) * (-(-1) ** k)
    arg = _u_series(terms, Nu - 1, Nq)
    return arg.exp().shift(1)


def weierstrass_p_u(Nu: int, Nq: int) -> TruncSeries:
    """``wp = -1/u^2 - sum_{k>=2} (-1)^k (2k-1) 2k C_2k u^(2k-2)``, known below u^Nu."""
    terms = {-2: TruncSeries("q", 0, [Fraction(-1)], Nq)}
    for k in range(2, Nu // 2 + 2):
        if 2 * k - 2 >= Nu:
            break
        terms[2 * k - 2] = renormalized_eisenstein(2 * k, Nq) * (-(-1) ** k * (2 * k - 1) * 2 * k)
    return _u_series(terms, Nu, Nq)


def _u_series(terms: dict, Nu: int, Nq: int) -> TruncSeries:
    zero = TruncSeries("q", Nq, [], Nq)
    lo = min(terms) if terms else 0
    return TruncSeries("u", lo, [terms.get(k, zero) for k in range(lo, Nu)], Nu)
