"""Curve-counting combinators on top of chi_10.

Genus expansions use ``y = -exp(iu)``, i.e. ``p = exp(iu)``.  Every GW
number is obtained by substituting into the exact (finite in p) Fourier
coefficients of chi_10 and inverting in u, never from windowed y-series.

Series layout: a u-series whose coefficients are qt-series whose
coefficients are q-series over the rationals.

The motivic Poincare variable is called ``w`` here.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import forms, igusa
from .series import SeriesError, TruncSeries, scale_u

# ---------------------------------------------------------------------------
# GW series


@dataclass
class GWSeries:
    series: TruncSeries  # u -> qt -> q
    connected: bool

    def coefficient(self, g: int, h: int, d: int) -> Fraction:
        """``N_{g,h,d}``: coefficient of ``u^(2g-2) q^(h-1) qt^(d-1)``."""
        return self.series[2 * g - 2][d - 1][h - 1]

    def qt_column(self, e: int) -> TruncSeries:
        """u-series of q-series: the coefficient of ``qt^e``."""
        s = self.series
        return TruncSeries("u", s.val, [c[e] for c in s.coeffs], s.trunc)


def _zero_q(Nq):
    return TruncSeries("q", Nq, [], Nq)


def chi10_u(Nu: int, Nq: int, Nqt: int) -> TruncSeries:
    """chi_10 with ``p = exp(iu)``, known below ``u^Nu``; odd u-powers are checked to vanish."""
    dct = igusa.chi10_product_dict(Nq, Nqt)
    coeffs = []
    for n in range(Nu):
        rows: dict = {}
        for (d, h, k), c in dct.items():
            if k == 0 and n > 0:
                continue
            rows.setdefault(d, {})
            rows[d][h] = rows[d].get(h, 0) + c * k ** n
        if n % 2 or n == 0:
            # odd n: the imaginary part must cancel by p <-> 1/p symmetry;
            # n = 0: chi_10 vanishes at p = 1
            if any(v != 0 for r in rows.values() for v in r.values()):
                raise SeriesError(f"nonzero coefficient at u^{n}")
            continue
        f = Fraction((-1) ** (n // 2), math.factorial(n))
        inner = {d: TruncSeries.from_dict("q", {h: v * f for h, v in r.items() if v}, Nq)
                 for d, r in rows.items()}
        lo = min(inner) if inner else Nqt
        coeffs.append((n, TruncSeries("qt", lo, [inner.get(d, _zero_q(Nq)) for d in range(lo, Nqt)], Nqt)))
    zero = TruncSeries("qt", Nqt, [], Nqt)
    table = dict(coeffs)
    return TruncSeries("u", 2, [table.get(n, zero) for n in range(2, Nu)], Nu)


def _as_q(c, Nq):
    return c if isinstance(c, TruncSeries) else TruncSeries("q", 0, [c], Nq)


def gw_disconnected(Nu: int, Nq: int, Nqt: int) -> GWSeries:
    """``-1/chi_10`` in ``u``; coefficients known for ``u < Nu``, ``q^(<Nq-1)``, ``qt^(<Nqt-1)``."""
    X = chi10_u(Nu + 4, Nq + 2, Nqt + 2)
    lead = X[2]
    if lead.val != 1 or lead[1].val != 1 or lead[1][1] != -1:
        raise SeriesError("leading u^2 coefficient is not -q qt")
    inv = X.invert()
    N = -inv
    N = TruncSeries("u", N.val, [c.truncate(Nqt - 1).map(lambda s: s.truncate(Nq - 1))
                                 for c in N.coeffs], min(N.trunc, Nu))
    return GWSeries(N, connected=False)


def _times_eta(v: GWSeries, e: int) -> TruncSeries:
    s = v.series
    out = []
    for c in s.coeffs:
        eta = forms.eta_power(e, (c.trunc or 0) + 2, "qt")
        out.append((c * eta).truncate(c.trunc))
    return TruncSeries("u", s.val, out, s.trunc)


def connect(v: GWSeries) -> GWSeries:
    """Multiply by ``prod (1 - qt^n)^24``."""
    if v.connected:
        raise SeriesError("series is already connected")
    return GWSeries(_times_eta(v, 24), connected=True)


def disconnect(v: GWSeries) -> GWSeries:
    if not v.connected:
        raise SeriesError("series is already disconnected")
    return GWSeries(_times_eta(v, -24), connected=False)


def kkv_series(Nu: int, Nq: int) -> TruncSeries:
    """``(1/(u^2 Delta)) exp(sum_k u^2k |B_2k| / (k (2k)!) E_2k)`` as a u-series of q-series."""
    terms = {}
    for k in range(1, Nu // 2 + 2):
        if 2 * k >= Nu + 2:
            break
        b = abs(Fraction(int(forms.flint.fmpq.bernoulli(2 * k).p), int(forms.flint.fmpq.bernoulli(2 * k).q)))
        terms[2 * k] = forms.eisenstein(2 * k, Nq + 1) * (b / (k * math.factorial(2 * k)))
    T = Nu + 2
    arg = TruncSeries("u", 1, [terms.get(n, _zero_q(Nq + 1)) for n in range(1, T)], T)
    ex = arg.exp()
    dinv = forms.delta_inverse(Nq)
    return TruncSeries("u", -2, [(c * dinv).truncate(Nq) for c in ex.coeffs], Nu)


def kkv_check(Nu: int, Nq: int) -> bool:
    gw = gw_disconnected(Nu, Nq + 1, 3)
    col = gw.qt_column(-1)
    ref = kkv_series(Nu, Nq)
    for n in range(-2, Nu):
        if not _as_q(col[n], Nq).equal_upto(_as_q(ref[n], Nq), Nq):
            return False
    return True


def connected_qt0_closed_form(Nu: int, Nq: int) -> TruncSeries:
    """``-24 wp(u)/Delta - 24/(F(u)^2 Delta)``: the connected ``qt^0`` column."""
    F = forms.theta_F_u(Nu + 4, Nq + 2)
    inv_F2 = (F * F).invert()
    wp = forms.weierstrass_p_u(Nu, Nq + 2)
    dinv = forms.delta_inverse(Nq + 2)
    total = (wp + inv_F2) * (-24)
    return TruncSeries("u", total.val, [(_as_q(c, Nq + 2) * dinv).truncate(Nq) for c in total.coeffs],
                       min(total.trunc, Nu))


def connected_qt0_check(Nu: int, Nq: int) -> bool:
    col = connect(gw_disconnected(Nu, Nq + 1, 3)).qt_column(0)
    ref = connected_qt0_closed_form(Nu, Nq)
    return all(_as_q(col[n], Nq).equal_upto(_as_q(ref[n], Nq), Nq) for n in range(-2, Nu))


def yau_zaslow_row(Nq: int) -> list:
    """Genus-0, qt^-1 coefficients: ``[N_{0,h,0} for h = 0 .. Nq-1]``."""
    gw = gw_disconnected(2, Nq + 1, 3)
    row = gw.series[-2][-1]
    return [row[h - 1] for h in range(Nq)]


def qqt_symmetric(v: GWSeries) -> bool:
    """``N_{g,h,d} = N_{g,d,h}`` on the square part of the box."""
    for n, c in v.series.items():
        n_sq = min(c.trunc, min(x.trunc for x in c.coeffs) if c.coeffs else c.trunc)
        for a in range(-1, n_sq):
            for b in range(-1, n_sq):
                if _qq(c, a, b) != _qq(c, b, a):
                    return False
    return True


def _qq(c, d, h):
    x = c[d]
    return x[h] if isinstance(x, TruncSeries) else x


# ---------------------------------------------------------------------------
# multiple covers


class MissingPrimitive(KeyError):
    pass


def primitive_table(conn: GWSeries) -> dict:
    """``{h: N_h(u, qt)}`` read off a connected series (u-series of qt-series)."""
    if not conn.connected:
        raise SeriesError("primitive table needs the connected series")
    s = conn.series
    hmax = min(min(x.trunc for x in c.coeffs) for c in s.coeffs if c.coeffs)
    out = {}
    for h in range(0, hmax + 1):
        cols = []
        for c in s.coeffs:
            cols.append(TruncSeries("qt", c.val, [_as_q(x, hmax)[h - 1] for x in c.coeffs], c.trunc))
        out[h] = TruncSeries("u", s.val, cols, s.trunc)
    return out


def conjecture_B(m: int, h: int, tab: dict) -> TruncSeries:
    """``sum_{k|m} (1/k) N_{(m/k)^2 (h-1) + 1}(k u, qt)``; only ``k = m`` when ``h = 0``."""
    if m < 1 or h < 0:
        raise ValueError("need m >= 1 and h >= 0")
    total = None
    for k in _divisors(m):
        target = (m // k) ** 2 * (h - 1) + 1
        if target < 0:
            continue  # primitive classes of square < -2 contribute nothing
        if target not in tab:
            raise MissingPrimitive(f"N_{target} is not in the primitive table")
        term = scale_u(tab[target], k) * Fraction(1, k)
        total = term if total is None else total + term
    return total


def _divisors(m: int) -> list:
    return [k for k in range(1, m + 1) if m % k == 0]


def sublattice_count(m: int) -> int:
    """Index-m sublattices of Z^2, enumerated as Hermite normal forms ``[[a, b], [0, c]]``."""
    count = 0
    for a in range(1, m + 1):
        for c in range(1, m + 1):
            if a * c == m:
                count += c  # 0 <= b < c
    return count


def elliptic_cover_weight(m: int) -> Fraction:
    """Connected degree-m covers of an elliptic curve by elliptic curves, weighted by 1/|Aut|."""
    return Fraction(sublattice_count(m), m)


def load_fixtures(path: str | None = None) -> dict:
    if path is None:
        text = resources.files("k3chi10").joinpath("data/c2_fixtures.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)


def conjecture_C2(m: int, g: int, deltas, primitive: dict, h: int) -> Fraction:
    """``sum_{k|m} k^(2g-3+sum deltas) primitive[(m/k)^2 (h-1) + 1]``."""
    expo = 2 * g - 3 + sum(deltas)
    total = Fraction(0)
    for k in _divisors(m):
        target = (m // k) ** 2 * (h - 1) + 1
        if target < 0:
            continue
        if target not in primitive:
            raise MissingPrimitive(f"no primitive value for h = {target}")
        total += Fraction(k) ** expo * primitive[target]
    return total


def fixture_primitive(fx: dict, name: str) -> tuple:
    entry = fx["primitive"][name]
    vals = {int(h): Fraction(v["value"]) for h, v in entry["values"].items()}
    return entry["g"], entry["deltas"], vals


def genus2_geometric_total(fx: dict) -> tuple:
    """The three geometric contributions to the genus-2, twice-beta_2 invariant."""
    e = fx["imprimitive_geometry"]["tau0(p),tau0(p)|g=2|2*beta_2"]
    conics = Fraction(e["conics"]["raw"], e["conics"]["ordering_factor"])
    lines = e["tangent_line_pairs"]["node_choices"] * e["tangent_line_pairs"]["tangents_through_point"] ** 2
    bit = e["bitangent_plus_line"]["node_choices"] * e["bitangent_plus_line"]["bitangents"]
    return conics, Fraction(lines), Fraction(bit)


# ---------------------------------------------------------------------------
# Kawai-Yoshioka motivic series


class KYSeries:
    """``q^-1 / ((w y - 1)(1/w - 1/y)) prod_n 1/((1-q^n/(wy))(1-y q^n/w)(1-q^n)^20(1-w q^n/y)(1-w y q^n))``.

    Expansion region: ascending in y (|y| < 1), so the prefactor is
    ``sum_{a,b>=0} w^(a-b) y^(1+a+b)``.  Exact in w; known for q-exponents
    below ``Nq - 1`` and y-exponents below ``Ny``.  The ``q^-1`` makes the
    q-exponent match ``h - 1``.
    """

    def __init__(self, Ny: int, Nq: int):
        self.Ny, self.Nq = Ny, Nq
        Yint = Ny + Nq  # y can drop by at most one per unit of q
        poly = {}
        for a in range(Yint):
            for b in range(Yint - a):
                if 1 + a + b < Yint:
                    key = (0, 1 + a + b)
                    poly.setdefault(key, {})
                    poly[key][a - b] = poly[key].get(a - b, 0) + 1
        for n in range(1, Nq):
            for (wy, yy, mult) in ((-1, -1, 1), (-1, 1, 1), (0, 0, 20), (1, -1, 1), (1, 1, 1)):
                for _ in range(mult):
                    poly = _ky_geometric(poly, n, yy, wy, Nq, Yint)
        self.terms = {(q - 1, y): w for (q, y), w in poly.items() if y < Ny and any(w.values())}

    def coeff(self, q: int, y: int) -> dict:
        if q >= self.Nq - 1 or y >= self.Ny:
            raise SeriesError(f"q^{q} y^{y} outside the computed range")
        return {k: v for k, v in self.terms.get((q, y), {}).items() if v}

    def at_w(self, w0) -> dict:
        out = {}
        for key, wp in self.terms.items():
            v = sum(Fraction(w0) ** e * c for e, c in wp.items())
            if v:
                out[key] = v
        return out


def _ky_geometric(poly: dict, n: int, ydeg: int, wdeg: int, Nq: int, Yint: int) -> dict:
    """Multiply by ``1/(1 - w^wdeg y^ydeg q^n)``."""
    out: dict = {}
    for (q, y), wp in poly.items():
        j = 0
        while q + j * n < Nq:
            key = (q + j * n, y + j * ydeg)
            if key[1] < Yint:
                tgt = out.setdefault(key, {})
                for e, c in wp.items():
                    tgt[e + j * wdeg] = tgt.get(e + j * wdeg, 0) + c
            j += 1
    return out


def kawai_yoshioka(Nw: int | None, Ny: int, Nq: int) -> KYSeries:
    """The refined series; ``Nw`` is accepted for interface symmetry (w is kept exact)."""
    return KYSeries(Ny, Nq)


def ky_matches_psi_minus1(Ny: int = 6, Nq: int = 4, window=(-10, 10)) -> bool:
    """``KY(w=-1) = -psi_{-1} = 1/(F^2 Delta)`` coefficientwise with ``y = -t^2``."""
    ky = KYSeries(Ny, Nq + 1).at_w(-1)
    psi = igusa.psi_closed_form(-1, Nq, window)
    tt = 2 * window[1] + 1
    for h in range(-1, Nq):
        c = psi[h]
        for a in range(-(h + 1), Ny):
            if 2 * a >= tt:
                break
            if ky.get((h, a), 0) != -c[2 * a] * (-1) ** a:
                return False
    return True


def ky_lowest(ky: KYSeries, h: int, d: int) -> dict:
    """Predicted lowest y-coefficient at ``q^(h-1) qt^(d-1)``."""
    return ky.coeff(h - 1, 1 - h + d)


def ky_lowest_symmetric(hmax: int = 3) -> bool:
    ky = KYSeries(hmax + 2 + 1, hmax + 2)
    return all(ky_lowest(ky, h, d) == ky_lowest(ky, d, h)
               for h in range(hmax + 1) for d in range(hmax + 1))
