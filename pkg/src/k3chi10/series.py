"""Exact truncated series over rational and Gaussian-rational scalars.

Three carriers are provided:

* :class:`HalfLaurent` -- Laurent polynomial in ``t`` with ``t**2 = p = -y``.
  It is either *exact* (finite support, ``trunc is None``) or *windowed*:
  coefficients at t-exponents ``>= trunc`` are unknown and reading them
  raises :class:`UnknownCoefficient`.  Windowed objects are one-sided
  expansions around ``t = 0``, which is the expansion forced by ``|p| < 1``.
* :class:`TruncSeries` -- dense truncated Laurent series in one formal
  variable over any coefficient ring (scalars, ``HalfLaurent``, or another
  ``TruncSeries``).
* :class:`Gaussian` -- exact ``a + b*i`` with rational parts.

Products follow the truncation-safety rule
``N = min(N1 + v2, N2 + v1)`` so every object carries an honest bound.
The polynomial kernel behind ``HalfLaurent`` is FLINT's ``fmpq_poly``.
"""
from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from numbers import Rational

import flint

__all__ = [
    "UnknownCoefficient",
    "SeriesError",
    "Gaussian",
    "HalfLaurent",
    "TruncSeries",
    "to_fraction",
    "t_precision",
    "substitute_y_to_u",
    "scale_u",
    "series_to_json",
    "series_from_json",
]


class UnknownCoefficient(LookupError):
    """A coefficient beyond the certified truncation was requested."""


class SeriesError(ValueError):
    pass


_ZERO_POLY = flint.fmpq_poly()

# t-truncation used when an exact, non-monomial HalfLaurent must be inverted
_T_TRUNC = [48]


@contextlib.contextmanager
def t_precision(trunc: int):
    """Temporarily change the t-truncation used for windowed inverses."""
    old = _T_TRUNC[0]
    _T_TRUNC[0] = trunc
    try:
        yield
    finally:
        _T_TRUNC[0] = old


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    if isinstance(x, flint.fmpz):
        return flint.fmpq(x)
    if isinstance(x, str):
        return _fmpq(Fraction(x))
    raise TypeError(f"not a rational scalar: {x!r}")


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    if isinstance(x, Gaussian):
        if x.im != 0:
            raise SeriesError(f"nonzero imaginary part in {x}")
        return x.re
    raise TypeError(f"not a rational scalar: {x!r}")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, flint.fmpq, flint.fmpz))


def _exact_zero(c) -> bool:
    """True only for coefficients that are provably zero."""
    if _is_scalar(c):
        return c == 0
    return c.is_exact_zero()


# ---------------------------------------------------------------------------
# Gaussian rationals


class Gaussian:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_fraction(re)
        self.im = to_fraction(im)

    @staticmethod
    def _coerce(x) -> "Gaussian":
        if isinstance(x, Gaussian):
            return x
        return Gaussian(to_fraction(x), 0)

    def __add__(self, other):
        if not (isinstance(other, Gaussian) or _is_scalar(other)):
            return NotImplemented
        o = self._coerce(other)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not (isinstance(other, Gaussian) or _is_scalar(other)):
            return NotImplemented
        o = self._coerce(other)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return Gaussian(self.re, -self.im)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("Gaussian zero")
        return Gaussian(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if _is_scalar(other):
            return self.im == 0 and self.re == to_fraction(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def is_exact_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"


I = Gaussian(0, 1)


# ---------------------------------------------------------------------------
# Laurent polynomials / windowed series in t


class HalfLaurent:
    """Sum of ``c_e * t**e`` with ``t**2 = p``.

    ``shift`` is the t-exponent of ``poly``'s constant term.  ``trunc`` is
    ``None`` for exact objects, otherwise the first unknown t-exponent.
    """

    __slots__ = ("shift", "poly", "trunc", "_val")

    def __init__(self, terms=None, trunc: int | None = None):
        terms = dict(terms or {})
        if trunc is not None:
            terms = {e: c for e, c in terms.items() if e < trunc}
        nz = {e: _fmpq(c) for e, c in terms.items() if c != 0}
        if nz:
            lo = min(nz)
            coeffs = [0] * (max(nz) - lo + 1)
            for e, c in nz.items():
                coeffs[e - lo] = c
            self._set(lo, flint.fmpq_poly(coeffs), trunc)
        else:
            self._set(0, _ZERO_POLY, trunc)

    def _set(self, shift, poly, trunc):
        self.shift = shift
        self.poly = poly
        self.trunc = trunc
        self._val = None

    @classmethod
    def _make(cls, shift: int, poly, trunc: int | None) -> "HalfLaurent":
        if trunc is not None:
            keep = trunc - shift
            if keep <= 0:
                poly = _ZERO_POLY
            elif poly.length() > keep:
                poly = poly.truncate(keep)
        obj = cls.__new__(cls)
        if poly.is_zero():
            obj._set(0, _ZERO_POLY, trunc)
            return obj
        if poly[0] == 0:
            cs = poly.coeffs()
            k = 0
            while cs[k] == 0:
                k += 1
            poly = poly.right_shift(k)
            shift += k
        obj._set(shift, poly, trunc)
        return obj

    @classmethod
    def monomial(cls, e: int, c=1) -> "HalfLaurent":
        return cls._make(e, flint.fmpq_poly([_fmpq(c)]), None)

    @classmethod
    def from_p(cls, terms, trunc_p: int | None = None) -> "HalfLaurent":
        """Build from a map ``p-exponent -> coefficient``."""
        return cls({2 * k: c for k, c in dict(terms).items()},
                   None if trunc_p is None else 2 * trunc_p)

    # -- inspection --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.trunc is None

    def is_exact_zero(self) -> bool:
        return self.trunc is None and self.poly.is_zero()

    def is_zero(self) -> bool:
        """All *known* coefficients vanish."""
        return self.poly.is_zero()

    def valuation(self) -> int | None:
        if self.poly.is_zero():
            return None
        return self.shift

    def _veff(self):
        # lower bound for the true valuation; a windowed zero is zero below trunc
        if self.poly.is_zero():
            return self.trunc
        return self.shift

    def top(self) -> int | None:
        if self.poly.is_zero():
            return None
        return self.shift + self.poly.degree()

    def __getitem__(self, e: int) -> Fraction:
        if self.trunc is not None and e >= self.trunc:
            raise UnknownCoefficient(f"t^{e} beyond truncation t^{self.trunc}")
        i = e - self.shift
        if self.poly.is_zero() or i < 0 or i > self.poly.degree():
            return Fraction(0)
        return to_fraction(self.poly[i])

    def items(self):
        """Nonzero known terms as ``(t_exponent, Fraction)`` pairs."""
        if self.poly.is_zero():
            return []
        out = []
        for i, c in enumerate(self.poly.coeffs()):
            if c != 0:
                out.append((self.shift + i, to_fraction(c)))
        return out

    def to_dict(self) -> dict:
        return dict(self.items())

    def parity(self) -> str:
        ps = {e % 2 for e, _ in self.items()}
        if not ps:
            return "even"
        if len(ps) == 2:
            return "mixed"
        return "even" if ps == {0} else "odd"

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, HalfLaurent):
            return x
        if _is_scalar(x):
            return HalfLaurent._make(0, flint.fmpq_poly([_fmpq(x)]), None)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_exact_zero():
            return self
        if self.is_exact_zero():
            return o
        trunc = _min_trunc(self.trunc, o.trunc)
        if self.poly.is_zero():
            return HalfLaurent._make(o.shift, o.poly, trunc)
        if o.poly.is_zero():
            return HalfLaurent._make(self.shift, self.poly, trunc)
        s = min(self.shift, o.shift)
        poly = self.poly.left_shift(self.shift - s) + o.poly.left_shift(o.shift - s)
        return HalfLaurent._make(s, poly, trunc)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent._make(self.shift, -self.poly, self.trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            if other == 0 and self.trunc is None:
                return HalfLaurent()
            return HalfLaurent._make(self.shift, self.poly * _fmpq(other), self.trunc)
        if not isinstance(other, HalfLaurent):
            return NotImplemented
        o = other
        if self.is_exact_zero() or o.is_exact_zero():
            return HalfLaurent()
        v1, v2 = self._veff(), o._veff()
        t1 = None if self.trunc is None else self.trunc + v2
        t2 = None if o.trunc is None else o.trunc + v1
        trunc = _min_trunc(t1, t2)
        if self.poly.is_zero() or o.poly.is_zero():
            return HalfLaurent._make(0, _ZERO_POLY, trunc)
        s = self.shift + o.shift
        if trunc is None:
            poly = self.poly * o.poly
        else:
            n = trunc - s
            if n <= 0:
                return HalfLaurent._make(0, _ZERO_POLY, trunc)
            poly = self.poly.mul_low(o.poly, n)
        return HalfLaurent._make(s, poly, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _fmpq(other))
        if isinstance(other, HalfLaurent):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = HalfLaurent.monomial(0)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def inverse(self, trunc: int | None = None) -> "HalfLaurent":
        """Inverse expanded in ascending powers of t (region ``|p| < 1``).

        Exact monomials invert exactly.  Otherwise the result is windowed;
        ``trunc`` caps the t-truncation (default from :func:`t_precision`).
        """
        if self.poly.is_zero():
            raise ZeroDivisionError("HalfLaurent with no known nonzero coefficient")
        v = self.shift
        if self.trunc is None and self.poly.length() == 1:
            return HalfLaurent._make(-v, flint.fmpq_poly([1 / self.poly[0]]), None)
        target = _T_TRUNC[0] if trunc is None else trunc
        if self.trunc is not None:
            target = min(target, self.trunc - 2 * v)
        n = target + v  # number of terms of the unit part inverse
        if n <= 0:
            return HalfLaurent._make(0, _ZERO_POLY, target)
        return HalfLaurent._make(-v, _inv_series(self.poly, n), target)

    def derivative_z(self) -> "HalfLaurent":
        """``p d/dp``: the coefficient of ``t**e`` is multiplied by ``e/2``."""
        if self.poly.is_zero():
            return HalfLaurent._make(0, _ZERO_POLY, self.trunc)
        cs = self.poly.coeffs()
        half = flint.fmpq(1, 2)
        new = [c * (self.shift + i) * half for i, c in enumerate(cs)]
        return HalfLaurent._make(self.shift, flint.fmpq_poly(new), self.trunc)

    # y d/dy = p d/dp since y = -p
    y_d_dy = derivative_z

    def invert_t(self) -> "HalfLaurent":
        """Substitute ``t -> 1/t`` (exact objects only)."""
        if self.trunc is not None:
            raise SeriesError("t -> 1/t is undefined on a windowed expansion")
        return HalfLaurent({-e: c for e, c in self.items()})

    def with_trunc(self, trunc: int | None) -> "HalfLaurent":
        """Forget information at and above ``trunc``."""
        return HalfLaurent._make(self.shift, self.poly, _min_trunc(self.trunc, trunc))

    def agrees_with(self, other: "HalfLaurent", upto: int | None = None) -> bool:
        """Compare known coefficients below ``upto`` (default: common truncation)."""
        o = self._coerce(other)
        hi = _min_trunc(self.trunc, o.trunc)
        hi = _min_trunc(hi, upto)
        if upto is not None and hi is not None and hi < upto:
            raise UnknownCoefficient(f"comparison up to t^{upto} but only t^{hi} certified")
        d = (self - o) if hi is None else (self.with_trunc(hi) - o.with_trunc(hi))
        return d.poly.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.trunc == o.trunc and (self - o).poly.is_zero()

    def __hash__(self):
        return hash((self.shift, str(self.poly), self.trunc))

    def __repr__(self):
        terms = " + ".join(f"({c})*t^{e}" for e, c in self.items()) or "0"
        if self.trunc is not None:
            terms += f" + O(t^{self.trunc})"
        return f"HalfLaurent[{terms}]"


def _inv_series(a, n: int):
    # Newton iteration x <- x (2 - a x) doubling the known length each step
    x = flint.fmpq_poly([1 / a[0]])
    k = 1
    while k < n:
        k = min(2 * k, n)
        e = a.truncate(k).mul_low(x, k)
        x = x.mul_low(2 - e, k)
    return x


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# one-variable truncated series


def _coeff_inverse(c):
    if _is_scalar(c):
        if c == 0:
            raise ZeroDivisionError("leading coefficient is zero")
        return Fraction(1) / to_fraction(c)
    if isinstance(c, TruncSeries):
        return c.invert()
    return c.inverse()


class TruncSeries:
    """``sum_{n >= val} c_n x**n`` known for ``n < trunc`` (``None``: exact)."""

    __slots__ = ("var", "val", "trunc", "coeffs")

    def __init__(self, var: str, val: int, coeffs, trunc: int | None = None):
        coeffs = list(coeffs)
        if trunc is not None:
            coeffs = coeffs[: max(0, trunc - val)]
        # strip provable leading and trailing zeros
        k = 0
        while k < len(coeffs) and _exact_zero(coeffs[k]):
            k += 1
        if k == len(coeffs):
            self.var, self.val, self.trunc, self.coeffs = var, (trunc if trunc is not None else 0), trunc, ()
            if trunc is None:
                self.val = 0
            return
        coeffs = coeffs[k:]
        val += k
        if trunc is None:
            while _exact_zero(coeffs[-1]):
                coeffs.pop()
        self.var, self.val, self.trunc, self.coeffs = var, val, trunc, tuple(coeffs)

    @classmethod
    def from_dict(cls, var, terms: dict, trunc=None):
        if not terms:
            return cls(var, 0 if trunc is None else trunc, [], trunc)
        lo = min(terms)
        hi = max(terms) if trunc is None else trunc - 1
        return cls(var, lo, [terms.get(n, 0) for n in range(lo, hi + 1)], trunc)

    @classmethod
    def constant(cls, var, c, trunc=None):
        return cls(var, 0, [c], trunc)

    @classmethod
    def monomial(cls, var, n, c=1, trunc=None):
        return cls(var, n, [c], trunc)

    # -- inspection --------------------------------------------------------
    def __getitem__(self, n: int):
        if self.trunc is not None and n >= self.trunc:
            raise UnknownCoefficient(f"{self.var}^{n} beyond truncation {self.var}^{self.trunc}")
        i = n - self.val
        if i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    def items(self):
        return [(self.val + i, c) for i, c in enumerate(self.coeffs) if not _exact_zero(c)]

    def exponents(self):
        hi = self.val + len(self.coeffs) if self.trunc is None else self.trunc
        return range(self.val, hi)

    def is_exact_zero(self) -> bool:
        return self.trunc is None and not self.coeffs

    def is_zero(self) -> bool:
        for c in self.coeffs:
            if _is_scalar(c):
                if c != 0:
                    return False
            elif not c.is_zero():
                return False
        return True

    def _check(self, other):
        if isinstance(other, TruncSeries) and other.var != self.var:
            raise SeriesError(f"variable mismatch: {self.var} vs {other.var}")

    def map(self, f) -> "TruncSeries":
        return TruncSeries(self.var, self.val, [f(c) for c in self.coeffs], self.trunc)

    def truncate(self, trunc: int) -> "TruncSeries":
        return TruncSeries(self.var, self.val, self.coeffs, _min_trunc(self.trunc, trunc))

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncSeries) or other.var != self.var:
            if isinstance(other, TruncSeries) and other.var != self.var:
                self._check(other)
            other = TruncSeries.constant(self.var, other)
        trunc = _min_trunc(self.trunc, other.trunc)
        lo = min(self.val, other.val) if (self.coeffs and other.coeffs) else (
            self.val if self.coeffs else other.val)
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        if trunc is not None:
            hi = min(hi, trunc)
        out = []
        for n in range(lo, hi):
            a, b = self[n] if _known(self, n) else 0, other[n] if _known(other, n) else 0
            out.append(a + b)
        return TruncSeries(self.var, lo, out, trunc)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.var, self.val, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries) or other.var != self.var:
            if isinstance(other, TruncSeries):
                raise SeriesError(f"variable mismatch: {self.var} vs {other.var}")
            return TruncSeries(self.var, self.val, [c * other for c in self.coeffs], self.trunc)
        a, b = self, other
        if a.is_exact_zero() or b.is_exact_zero():
            return TruncSeries(self.var, 0, [], None)
        va = a.val if a.coeffs else a.trunc
        vb = b.val if b.coeffs else b.trunc
        t1 = None if a.trunc is None else a.trunc + vb
        t2 = None if b.trunc is None else b.trunc + va
        trunc = _min_trunc(t1, t2)
        if not a.coeffs or not b.coeffs:
            return TruncSeries(self.var, trunc, [], trunc)
        val = a.val + b.val
        hi = val + len(a.coeffs) + len(b.coeffs) - 1
        if trunc is not None:
            hi = min(hi, trunc)
        ac, bc = a.coeffs, b.coeffs
        la, lb = len(ac), len(bc)
        out = []
        for k in range(hi - val):
            s = 0
            for i in range(max(0, k - lb + 1), min(k + 1, la)):
                x, y = ac[i], bc[k - i]
                if _is_scalar(x) and x == 0 or _is_scalar(y) and y == 0:
                    continue
                s = s + x * y
            out.append(s)
        return TruncSeries(self.var, val, out, trunc)

    def __rmul__(self, other):
        return TruncSeries(self.var, self.val, [other * c for c in self.coeffs], self.trunc)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.invert()
        if _is_scalar(other):
            inv = Fraction(1) / to_fraction(other)
            return self.map(lambda c: c * inv)
        return self.map(lambda c: c * _coeff_inverse(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        out = TruncSeries.constant(self.var, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``var**k``."""
        return TruncSeries(self.var, self.val + k, self.coeffs,
                           None if self.trunc is None else self.trunc + k)

    def invert(self, trunc: int | None = None) -> "TruncSeries":
        """Two-sided inverse up to truncation; result valuation is ``-val``."""
        if not self.coeffs:
            raise ZeroDivisionError("series with no known nonzero coefficient")
        v = self.val
        a = self.coeffs
        if self.trunc is None:
            if trunc is None:
                if len(a) == 1:
                    return TruncSeries(self.var, -v, [_coeff_inverse(a[0])], None)
                raise SeriesError("inverse of an exact non-monomial series needs a truncation")
            target = trunc
        else:
            target = self.trunc - 2 * v if trunc is None else min(trunc, self.trunc - 2 * v)
        n = target + v
        b0 = _coeff_inverse(a[0])
        b = [b0]
        for k in range(1, n):
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                if _is_scalar(a[i]) and a[i] == 0:
                    continue
                s = s + a[i] * b[k - i]
            b.append(-(b0 * s) if not (_is_scalar(s) and s == 0) else 0)
        return TruncSeries(self.var, -v, b, target)

    def derivative(self) -> "TruncSeries":
        """``x d/dx``: coefficient of ``x**n`` multiplied by ``n``."""
        return TruncSeries(self.var, self.val,
                           [c * (self.val + i) for i, c in enumerate(self.coeffs)], self.trunc)

    derivative_q = derivative

    def derivative_z(self) -> "TruncSeries":
        return self.map(lambda c: c.derivative_z() if isinstance(c, (HalfLaurent, TruncSeries)) else 0)

    def exp(self, trunc: int | None = None) -> "TruncSeries":
        for n, c in self.items():
            if n <= 0 and not (c == 0 if _is_scalar(c) else c.is_zero()):
                raise SeriesError("exp needs strictly positive valuation")
        target = self.trunc if trunc is None else _min_trunc(self.trunc, trunc)
        if target is None:
            raise SeriesError("exp of an exact series needs a truncation")
        da = {n: c * n for n, c in self.items() if n > 0}
        b = [1]
        for n in range(1, target):
            s = 0
            for k, c in da.items():
                if k <= n:
                    s = s + c * b[n - k]
            b.append(s * Fraction(1, n) if not (_is_scalar(s) and s == 0) else 0)
        return TruncSeries(self.var, 0, b, target)

    def log(self, trunc: int | None = None) -> "TruncSeries":
        """Logarithm of a series with constant term 1."""
        if self.val != 0 or self[0] != 1:
            raise SeriesError("log needs constant term 1")
        target = self.trunc if trunc is None else _min_trunc(self.trunc, trunc)
        if target is None:
            raise SeriesError("log of an exact series needs a truncation")
        s = self.truncate(target)
        d = s.derivative() * s.invert(target)
        return TruncSeries(self.var, 0, [0] + [d[n] * Fraction(1, n) for n in range(1, target)], target)

    def equal_upto(self, other: "TruncSeries", trunc: int) -> bool:
        """Coefficientwise equality for exponents below ``trunc``."""
        self._check(other)
        for n in range(min(self.val, other.val), trunc):
            if _diff_nonzero(self[n], other[n]):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.var != other.var or self.trunc != other.trunc:
            return False
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        lo = min(self.val, other.val)
        return all(not _diff_nonzero(self[n], other[n]) for n in range(lo, hi))

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})*{self.var}^{n}" for n, c in self.items()) or "0"
        if self.trunc is not None:
            body += f" + O({self.var}^{self.trunc})"
        return body


def _known(s: TruncSeries, n: int) -> bool:
    return s.trunc is None or n < s.trunc


def _diff_nonzero(a, b) -> bool:
    d = a - b
    if _is_scalar(d) or isinstance(d, Gaussian):
        return d != 0
    return not d.is_zero()


# ---------------------------------------------------------------------------
# substitutions


def substitute_y_to_u(h: HalfLaurent, order: int, require_real: bool = False) -> TruncSeries:
    """Substitute ``t = exp(i u / 2)`` (so ``p = exp(i u)``, ``y = -exp(i u)``).

    Returns a u-series over :class:`Gaussian` known for exponents < ``order``.
    With ``require_real`` the result is over ``Fraction`` and any imaginary
    residue raises :class:`SeriesError`.
    """
    if not h.exact:
        raise SeriesError("u-substitution needs an exact (finite) HalfLaurent")
    terms = h.items()
    out = []
    for n in range(order):
        s = sum((c * Fraction(e, 2) ** n for e, c in terms), Fraction(0)) / math.factorial(n)
        # i**n
        r = n % 4
        g = Gaussian(s, 0) if r == 0 else Gaussian(0, s) if r == 1 else Gaussian(-s, 0) if r == 2 else Gaussian(0, -s)
        out.append(g)
    res = TruncSeries("u", 0, out, order)
    if require_real:
        return res.map(to_fraction)
    return res


def scale_u(a: TruncSeries, k: int) -> TruncSeries:
    """``a(u) -> a(k u)``."""
    if a.var != "u":
        raise SeriesError(f"scale_u expects a u-series, got {a.var}")
    return TruncSeries("u", a.val, [c * Fraction(k) ** (a.val + i) for i, c in enumerate(a.coeffs)],
                       a.trunc)


# ---------------------------------------------------------------------------
# canonical JSON


def _q_str(x) -> str:
    f = to_fraction(x)
    return f"{f.numerator}/{f.denominator}"


def _coeff_to_json(c):
    if isinstance(c, HalfLaurent):
        return {"t_poly": [[e, _q_str(v)] for e, v in c.items()], "t_trunc": c.trunc}
    if isinstance(c, TruncSeries):
        return {"series": series_to_json(c)}
    if isinstance(c, Gaussian):
        return {"gauss": [_q_str(c.re), _q_str(c.im)]}
    return {"scalar": _q_str(c)}


def series_to_json(s: TruncSeries) -> dict:
    return {
        "var": s.var,
        "val": s.val,
        "trunc": s.trunc,
        "coeffs": [[n, _coeff_to_json(c)] for n, c in s.items()],
    }


def _coeff_from_json(d):
    if "t_poly" in d:
        return HalfLaurent({int(e): Fraction(v) for e, v in d["t_poly"]}, d.get("t_trunc"))
    if "series" in d:
        return series_from_json(d["series"])
    if "gauss" in d:
        return Gaussian(Fraction(d["gauss"][0]), Fraction(d["gauss"][1]))
    return Fraction(d["scalar"])


def series_from_json(d: dict) -> TruncSeries:
    terms = {int(n): _coeff_from_json(c) for n, c in d["coeffs"]}
    trunc = d["trunc"]
    if not terms:
        return TruncSeries(d["var"], int(d["val"]), [], trunc)
    val = int(d["val"])
    hi = max(terms) + 1 if trunc is None else trunc
    return TruncSeries(d["var"], val, [terms.get(n, 0) for n in range(val, hi)], trunc)
