"""The Igusa cusp form chi_10, its inverse and the psi_d / phi_d / H_d family.

A Siegel series is a ``TruncSeries`` in ``qt`` whose coefficients are
``TruncSeries`` in ``q`` with :class:`HalfLaurent` coefficients in ``t``.
``chi_10`` itself has exact (finite) t-support on every monomial; ``1/chi_10``
is windowed in t and expanded in the region ``0 < |q| < |p| < 1``.

Windows are given in p-exponents ``(kmin, kmax)``.  Windowed objects here are
known for every t-exponent below ``2*kmax + 1``; the lower end only bounds
what gets reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import forms
from .series import HalfLaurent, SeriesError, TruncSeries, t_precision

__all__ = [
    "chi10_product",
    "chi10_product_dict",
    "chi10_exp_hecke",
    "chi10_additive_lift",
    "siegel_from_dict",
    "siegel_to_dict",
    "siegel_swap_symmetric",
    "inverse_chi10",
    "PsiFamily",
    "psi_closed_form",
    "polar_part",
    "correction_series",
    "hilb_H",
    "hilb_H_points",
    "margin_width",
]


def _binom(e: int, j: int) -> Fraction:
    """Generalized binomial coefficient C(e, j) for integer e."""
    num = 1
    for i in range(j):
        num *= e - i
    return Fraction(num, math.factorial(j))


def chi10_product_dict(Nq: int, Nqt: int) -> dict:
    """Borcherds product as a sparse map ``(d, h, k) -> int``.

    Keys are exponents of ``qt^d q^h p^k`` including the ``p q qt`` prefactor;
    all monomials with ``h < Nq`` and ``d < Nqt`` are exact.
    """
    H, D = Nq - 2, Nqt - 2  # factor exponents allowed before the q*qt shift
    if H < 0 or D < 0:
        return {}
    _, ctab = forms.z_function_and_c(max(H * D, 0) + 2)
    # h = d = 0 part: p * (1 - 1/p)^c(-1) with c(-1) = 2
    poly = {(0, 0, 1): 1, (0, 0, 0): -2, (0, 0, -1): 1}
    if ctab(-1) != 2:
        raise SeriesError("unexpected c(-1)")
    for d in range(D + 1):
        for h in range(H + 1):
            if h == 0 and d == 0:
                continue
            kmax = math.isqrt(4 * h * d + 1)
            for k in range(-kmax, kmax + 1):
                e = ctab(4 * h * d - k * k)
                if e == 0:
                    continue
                jmax = min(H // h if h else D // d, D // d if d else H // h)
                factor = [(j, _binom(e, j) * (-1) ** j) for j in range(jmax + 1)]
                new: dict = {}
                for (d0, h0, k0), v in poly.items():
                    for j, b in factor:
                        dd, hh = d0 + j * d, h0 + j * h
                        if dd > D or hh > H:
                            break
                        key = (dd, hh, k0 + j * k)
                        new[key] = new.get(key, 0) + v * b
                poly = {key: v for key, v in new.items() if v != 0}
    out = {}
    for (d, h, k), v in poly.items():
        if v.denominator != 1 if isinstance(v, Fraction) else False:
            raise SeriesError("non-integral chi_10 coefficient")
        out[(d + 1, h + 1, k)] = int(v)
    return out


def siegel_from_dict(dct: dict, Nq: int, Nqt: int) -> TruncSeries:
    """``{(d, h, k): c}`` (exponents of qt, q, p) to a nested series."""
    rows: dict = {}
    for (d, h, k), v in dct.items():
        if d < Nqt and h < Nq and v != 0:
            rows.setdefault(d, {}).setdefault(h, {})[2 * k] = v
    outer = {}
    for d, cols in rows.items():
        outer[d] = TruncSeries.from_dict("q", {h: HalfLaurent(ts) for h, ts in cols.items()}, Nq)
    zero = TruncSeries("q", Nq, [], Nq)
    lo = min(outer) if outer else Nqt
    return TruncSeries("qt", lo, [outer.get(d, zero) for d in range(lo, Nqt)], Nqt)


def siegel_to_dict(S: TruncSeries) -> dict:
    """Inverse of :func:`siegel_from_dict` for exact-in-t coefficients."""
    out = {}
    for d, inner in S.items():
        for h, c in inner.items():
            for e, v in c.items():
                if e % 2:
                    raise SeriesError("half-integral p-power in a Siegel coefficient")
                out[(d, h, e // 2)] = v
    return out


def chi10_product(Nq: int, Nqt: int) -> TruncSeries:
    return siegel_from_dict(chi10_product_dict(Nq, Nqt), Nq, Nqt)


def chi10_exp_hecke(Nq: int, Nqt: int) -> TruncSeries:
    """``-qt F^2 Delta exp(-sum_l qt^l (Z|V_l))``."""
    lmax = Nqt - 2
    Z = forms.z_function(max(1, (Nq - 1) * max(lmax, 1) + 1))
    zero = TruncSeries("q", Nq, [], Nq)
    terms = [zero]
    for l in range(1, lmax + 1):
        terms.append(-forms.hecke_V(Z, l, Nq))
    A = TruncSeries("qt", 1, terms[1:], lmax + 1)
    E = A.exp() if lmax >= 1 else TruncSeries("qt", 0, [1], 1)
    F2D = forms.theta_F_squared(Nq) * _jac(forms.delta(Nq))
    out = E.map(lambda c: (c * F2D) if isinstance(c, TruncSeries) else F2D * c)
    return (-out).shift(1).map(lambda c: c.truncate(Nq))


def chi10_additive_lift(Nq: int, Nqt: int) -> TruncSeries:
    """``-sum_{l>=1} qt^l (F^2 Delta |_{10,1} V_l)``."""
    lmax = Nqt - 1
    M = max(1, (Nq - 1) * lmax + 1)
    phi = forms.JacobiSeries(forms.theta_F_squared(M) * _jac(forms.delta(M)), weight=10, index=1)
    zero = TruncSeries("q", Nq, [], Nq)
    terms = [zero] + [-forms.hecke_V(phi, l, Nq) for l in range(1, lmax + 1)]
    return TruncSeries("qt", 0, terms, Nqt)


def _jac(s: TruncSeries) -> TruncSeries:
    return s.map(lambda c: c * forms.ONE)


def siegel_swap_symmetric(S: TruncSeries) -> bool:
    """``chi(q, qt) == chi(qt, q)`` on the square part of the box."""
    dct = siegel_to_dict(S)
    inner_trunc = min(c.trunc for _, c in S.items())
    n = min(S.trunc, inner_trunc)
    for (d, h, k), v in dct.items():
        if d < n and h < n and dct.get((h, d, k), 0) != v:
            return False
    return True


# ---------------------------------------------------------------------------
# the inverse


@dataclass
class PsiFamily:
    """``1/chi_10 = sum_d qt^d psi_d``, each psi_d windowed in t."""

    psi: dict
    window: tuple
    Nq: int
    phi: dict = field(default_factory=dict)
    H: dict = field(default_factory=dict)

    @property
    def t_trunc(self) -> int:
        return 2 * self.window[1] + 1


def _certified(S: TruncSeries) -> int:
    worst = None
    for _, c in S.items():
        if isinstance(c, TruncSeries):
            w = _certified(c)
        elif isinstance(c, HalfLaurent):
            w = c.trunc
        else:
            w = None
        if w is not None and (worst is None or w < worst):
            worst = w
    return worst if worst is not None else 10 ** 9


def _adaptive(build, target: int, start: int | None = None):
    """Run ``build()`` with growing t-precision until everything is certified to ``target``."""
    prec = start if start is not None else target + 8
    while True:
        with t_precision(prec):
            out = build()
        worst = _certified(out)
        if worst >= target:
            return out
        prec += max(4, target - worst)


def _cap(S: TruncSeries, tt: int) -> TruncSeries:
    def f(c):
        if isinstance(c, TruncSeries):
            return _cap(c, tt)
        if isinstance(c, HalfLaurent):
            return c.with_trunc(tt)
        return c
    return S.map(f)


def inverse_chi10(Nq: int, Nqt: int, window=(-10, 10), chi: TruncSeries | None = None) -> PsiFamily:
    """Windowed ``1/chi_10``; psi_d for ``-1 <= d <= Nqt - 3`` known below ``q^(Nq - 2)``.

    ``chi`` may be supplied (any of the three constructions); by default the
    product formula is used.
    """
    if chi is None:
        chi = chi10_product(Nq, Nqt)
    body = chi.shift(-1)  # chi = qt * body, body has qt-valuation 0
    target = 2 * window[1] + 1
    inv = _adaptive(lambda: body.invert(), target)
    inv = _cap(inv.shift(-1), target)
    psi = {d: inv[d] for d in range(-1, inv.trunc)}
    return PsiFamily(psi=psi, window=tuple(window), Nq=min(c.trunc for c in psi.values()))


def psi_closed_form(d: int, Nq: int, window=(-10, 10)) -> TruncSeries:
    """The classical closed forms for psi_{-1..2}, windowed to the same t-range."""
    target = 2 * window[1] + 1
    E4 = forms.eisenstein(4, Nq + 2)
    E6 = forms.eisenstein(6, Nq + 2)

    def build():
        K = forms.theta_K(Nq + 2)
        K2 = K * K
        Dinv = _jac(forms.delta_inverse(Nq))
        if d == -1:
            return K2.invert() * Dinv
        wp = forms.weierstrass_p(Nq + 2, t_trunc=_cur_prec())
        if d == 0:
            return wp * Dinv * 24
        if d == 1:
            return (wp * wp * 324 + _jac(E4) * Fraction(3, 4)) * K2 * Dinv
        if d == 2:
            return ((wp * wp * wp) * 3200 + _jac(E4) * wp * Fraction(64, 3)
                    + _jac(E6) * Fraction(10, 27)) * K2 * K2 * Dinv
        raise SeriesError(f"no closed form for psi_{d}")

    return _cap(_adaptive(build, target), target).truncate(Nq)


def _cur_prec() -> int:
    from .series import _T_TRUNC
    return _T_TRUNC[0]


def polar_part(d: int, Nq: int, window=(-10, 10)) -> TruncSeries:
    """``phi_d = a(d) G^(d+1) / (F^2 Delta) = -a(d) G^(d+1) / (K^2 Delta)``."""
    target = 2 * window[1] + 1
    a = forms.a_table(max(d, 0))[d]
    Nin = Nq + 2

    def build():
        K = forms.theta_K(Nin)
        G = forms.g_function(Nin)
        return (G ** (d + 1)) * (K * K).invert() * _jac(forms.delta_inverse(Nq)) * (-a)

    return _cap(_adaptive(build, target), target).truncate(Nq)


def correction_series(Nq: int, Nqt: int, window=(-10, 10)) -> TruncSeries:
    """``(1/(F^2 Delta)) qt^-1 prod_n (1 - (qt G)^n)^-24`` as a qt-series.

    Built by expanding the product with G as an opaque ring element, which is
    independent of the ``a(d) G^(d+1)`` coefficient formula.
    """
    target = 2 * window[1] + 1
    Nin = Nq + 2

    def build():
        G = forms.g_function(Nin)
        one = _jac(TruncSeries("q", 0, [1], Nin))
        # prod_n (1 - G^n qt^n) then invert, all in the nested ring
        prod = TruncSeries("qt", 0, [one], Nqt + 1)
        for n in range(1, Nqt + 1):
            fac = TruncSeries("qt", 0, [one] + [0] * (n - 1) + [-(G ** n)], Nqt + 1)
            prod = prod * fac
        P = prod ** -24
        K = forms.theta_K(Nin)
        pref = (K * K).invert() * _jac(forms.delta_inverse(Nq)) * -1
        return P.map(lambda c: c * pref).shift(-1)

    return _cap(_adaptive(build, target), target)


def margin_width(S: TruncSeries, t_trunc: int) -> int:
    """Number of consecutive top p-slots (below ``t_trunc``) vanishing at every q-order."""
    width = 0
    k = (t_trunc - 1) // 2
    while k > -10 ** 6:
        if any(not isinstance(c, HalfLaurent) or c[2 * k] != 0 or c[2 * k + 1] != 0
               if 2 * k + 1 < t_trunc else c[2 * k] != 0
               for _, c in S.items()):
            return width
        width += 1
        k -= 1
        if width > t_trunc + 100:
            return width
    return width


def hilb_H(d: int, Nq: int, window=(-10, 10), fam: PsiFamily | None = None,
           min_margin: int = 3) -> forms.JacobiSeries:
    """Finite part ``H_d = -psi_d - phi_d``, trimmed to exact Laurent coefficients.

    Raises :class:`SeriesError` when fewer than ``min_margin`` top p-slots of
    the window vanish.
    """
    if fam is None:
        fam = inverse_chi10(Nq + 2, d + 3, window)
    psi = fam.psi[d].truncate(Nq)
    phi = polar_part(d, Nq, window)
    Hw = -psi - phi
    tt = 2 * window[1] + 1
    m = margin_width(Hw, tt)
    if m < min_margin:
        raise SeriesError(f"H_{d}: only {m} vanishing margin slots in window {window}")
    exact = Hw.map(lambda c: HalfLaurent(c.to_dict()) if isinstance(c, HalfLaurent) else c)
    return forms.JacobiSeries(exact, weight=None, index=d)


def hilb_H_points(n: int, Nq: int, window=(-10, 10), fam: PsiFamily | None = None,
                  min_margin: int = 3) -> forms.JacobiSeries:
    """Finite part indexed by the number of points: ``n`` points sit at ``qt^(n-1)``."""
    return hilb_H(n - 1, Nq, window, fam, min_margin)
