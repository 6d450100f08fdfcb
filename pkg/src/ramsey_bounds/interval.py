"""Outward-rounded interval arithmetic and derivative jets over intervals.

Endpoints are raw mpmath floats rounded with ``round_floor`` / ``round_ceiling``
through mpmath's ``libmpi`` kernels.  Transcendental results are additionally
widened by a few units in the last place, so an enclosure stays sound even if
the underlying library is off by an ulp.
"""

from __future__ import annotations

from numbers import Rational

import mpmath
from mpmath import mpf
from mpmath.libmp import (
    fnan,
    fninf,
    finf,
    fzero,
    from_float,
    from_int,
    from_rational,
    from_str,
    libmpi,
    mpf_abs,
    mpf_add,
    mpf_exp,
    mpf_le,
    mpf_log,
    mpf_lt,
    mpf_neg,
    mpf_shift,
    mpf_sign,
    mpf_sub,
    round_ceiling,
    round_floor,
)

from .exact import DEFAULT_PREC, ExactReal

__all__ = ["IntervalValue", "Jet", "interval", "hull"]


def _widen(a, b, prec):
    # relative slack of 2^(2-prec) on each side
    if a not in (fzero, fninf):
        a = mpf_sub(a, mpf_shift(mpf_abs(a), 2 - prec), prec, round_floor)
    if b not in (fzero, finf):
        b = mpf_add(b, mpf_shift(mpf_abs(b), 2 - prec), prec, round_ceiling)
    return a, b


def _endpoint(value, prec, rnd):
    if isinstance(value, int):
        return from_int(value, prec, rnd)
    if isinstance(value, Rational):
        return from_rational(value.numerator, value.denominator, prec, rnd)
    if isinstance(value, float):
        return from_float(value, prec, rnd)
    if isinstance(value, str):
        return from_str(value, prec, rnd)
    if isinstance(value, mpf):
        return mpf_add(value._mpf_, fzero, prec, rnd)
    if isinstance(value, ExactReal):
        return mpf_add(value.value._mpf_, fzero, prec, rnd)
    raise TypeError(f"cannot build an interval endpoint from {type(value).__name__}")


class IntervalValue:
    """Closed interval ``[lo, hi]`` with directed-rounded endpoints."""

    __slots__ = ("_a", "_b", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PREC):
        if isinstance(lo, IntervalValue) and hi is None:
            self._a, self._b, self.prec = lo._a, lo._b, prec
            return
        if hi is None:
            hi = lo
        self._a = _endpoint(lo, prec, round_floor)
        self._b = _endpoint(hi, prec, round_ceiling)
        self.prec = prec
        if mpf_lt(self._b, self._a):
            raise ValueError(f"empty interval [{lo}, {hi}]")

    @classmethod
    def _raw(cls, a, b, prec):
        if a == fnan or b == fnan:
            raise ArithmeticError("interval operation produced NaN")
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        obj.prec = prec
        return obj

    # endpoints -----------------------------------------------------------

    @property
    def lo(self) -> mpf:
        # make_mpf keeps every bit; mpf() would round to the ambient precision
        return mpmath.mp.make_mpf(self._a)

    @property
    def hi(self) -> mpf:
        return mpmath.mp.make_mpf(self._b)

    @property
    def width(self) -> mpf:
        with mpmath.workprec(self.prec):
            return mpf(self._b) - mpf(self._a)

    @property
    def mid(self) -> mpf:
        with mpmath.workprec(self.prec + 2):
            return (mpf(self._a) + mpf(self._b)) / 2

    def is_point(self) -> bool:
        return self._a == self._b

    def __contains__(self, value) -> bool:
        if isinstance(value, IntervalValue):
            return mpf_le(self._a, value._a) and mpf_le(value._b, self._b)
        v = _endpoint(value, self.prec + 64, round_floor)
        w = _endpoint(value, self.prec + 64, round_ceiling)
        return mpf_le(self._a, v) and mpf_le(w, self._b)

    def subset_of(self, other: IntervalValue) -> bool:
        return other.__contains__(self)

    def positive(self) -> bool:
        """True when every point of the interval is > 0."""
        return mpf_sign(self._a) > 0

    def negative(self) -> bool:
        return mpf_sign(self._b) < 0

    def lt(self, value) -> bool:
        """Certainly below ``value``."""
        return mpf_lt(self._b, _coerce(value, self.prec)._a)

    def ge(self, value) -> bool:
        """Certainly at least ``value``."""
        return mpf_le(_coerce(value, self.prec)._b, self._a)

    def split(self) -> tuple[IntervalValue, IntervalValue]:
        m = _endpoint(self.mid, self.prec, round_floor)
        return (IntervalValue._raw(self._a, m, self.prec), IntervalValue._raw(m, self._b, self.prec))

    def midpoint_interval(self) -> IntervalValue:
        m = _endpoint(self.mid, self.prec, round_floor)
        return IntervalValue._raw(m, m, self.prec)

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return IntervalValue._raw(*libmpi.mpi_add((self._a, self._b), (o._a, o._b), p), p)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return IntervalValue._raw(*libmpi.mpi_sub((self._a, self._b), (o._a, o._b), p), p)

    def __rsub__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        return _coerce(other, self.prec) - self

    def __neg__(self):
        return IntervalValue._raw(mpf_neg(self._b), mpf_neg(self._a), self.prec)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return IntervalValue._raw(*libmpi.mpi_mul((self._a, self._b), (o._a, o._b), p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = _coerce(other, self.prec)
        if mpf_sign(o._a) <= 0 <= mpf_sign(o._b):
            raise ZeroDivisionError(f"divisor interval {o} contains zero")
        p = max(self.prec, o.prec)
        return IntervalValue._raw(*libmpi.mpi_div((self._a, self._b), (o._a, o._b), p), p)

    def __rtruediv__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        return _coerce(other, self.prec) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise TypeError("interval powers are restricted to nonnegative integers")
        return IntervalValue._raw(*libmpi.mpi_pow_int((self._a, self._b), n, self.prec), self.prec)

    def exp(self) -> IntervalValue:
        a = mpf_exp(self._a, self.prec, round_floor)
        b = mpf_exp(self._b, self.prec, round_ceiling)
        a, b = _widen(a, b, self.prec)
        if mpf_sign(a) < 0:
            a = fzero
        return IntervalValue._raw(a, b, self.prec)

    def log(self) -> IntervalValue:
        if mpf_sign(self._a) <= 0:
            raise ValueError(f"log of an interval reaching {mpf(self._a)} <= 0")
        a = mpf_log(self._a, self.prec, round_floor)
        b = mpf_log(self._b, self.prec, round_ceiling)
        return IntervalValue._raw(*_widen(a, b, self.prec), self.prec)

    def hull(self, other: IntervalValue) -> IntervalValue:
        a = self._a if mpf_le(self._a, other._a) else other._a
        b = other._b if mpf_le(self._b, other._b) else self._b
        return IntervalValue._raw(a, b, max(self.prec, other.prec))

    def __repr__(self):
        return f"IntervalValue({mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)})"

    def to_json(self) -> list[str]:
        from .exact import format_decimal

        # enough digits that parsing at self.prec restores the exact endpoints
        digits = int(self.prec * 0.30103) + 2
        return [format_decimal(self.lo, self.prec, digits), format_decimal(self.hi, self.prec, digits)]


def _coerce(value, prec) -> IntervalValue:
    if isinstance(value, IntervalValue):
        return value
    return IntervalValue(value, value, prec)


def interval(lo, hi=None, prec: int = DEFAULT_PREC) -> IntervalValue:
    return IntervalValue(lo, hi, prec)


def hull(*parts: IntervalValue) -> IntervalValue:
    out = parts[0]
    for p in parts[1:]:
        out = out.hull(p)
    return out


class Jet:
    """Value and first ``order`` derivatives of a function, as intervals.

    Arithmetic propagates derivatives by the product/quotient/chain rules,
    giving forward-mode differentiation that is sound over an interval of
    the independent variable.
    """

    __slots__ = ("d",)

    def __init__(self, derivs):
        self.d = tuple(derivs)

    @classmethod
    def variable(cls, x: IntervalValue, order: int) -> Jet:
        d = [x]
        if order >= 1:
            d.append(_coerce(1, x.prec))
        d.extend(_coerce(0, x.prec) for _ in range(order - 1))
        return cls(d)

    @property
    def order(self) -> int:
        return len(self.d) - 1

    @property
    def value(self) -> IntervalValue:
        return self.d[0]

    def _lift(self, other) -> Jet:
        if isinstance(other, Jet):
            return other
        c = _coerce(other, self.d[0].prec)
        zero = _coerce(0, c.prec)
        return Jet((c,) + (zero,) * self.order)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(a + b for a, b in zip(self.d, o.d))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Jet(a - b for a, b in zip(self.d, o.d))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet(-a for a in self.d)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = _coerce(other, self.d[0].prec)
            return Jet(a * c for a in self.d)
        f, g = self.d, other.d
        out = [f[0] * g[0]]
        if self.order >= 1:
            out.append(f[1] * g[0] + f[0] * g[1])
        if self.order >= 2:
            out.append(f[2] * g[0] + 2 * (f[1] * g[1]) + f[0] * g[2])
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            c = _coerce(other, self.d[0].prec)
            return Jet(a / c for a in self.d)
        f, g = self.d, other.d
        h0 = f[0] / g[0]
        out = [h0]
        if self.order >= 1:
            h1 = (f[1] - h0 * g[1]) / g[0]
            out.append(h1)
        if self.order >= 2:
            out.append((f[2] - 2 * (h1 * g[1]) - h0 * g[2]) / g[0])
        return Jet(out)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def _chain(self, u0, u1, u2) -> Jet:
        # u = phi(f): u' = phi'(f) f', u'' = phi''(f) f'^2 + phi'(f) f''
        f = self.d
        out = [u0]
        if self.order >= 1:
            out.append(u1 * f[1])
        if self.order >= 2:
            out.append(u2 * (f[1] * f[1]) + u1 * f[2])
        return Jet(out)

    def exp(self) -> Jet:
        e = self.d[0].exp()
        return self._chain(e, e, e)

    def log(self) -> Jet:
        x = self.d[0]
        inv = 1 / x if self.order >= 1 else None
        return self._chain(x.log(), inv, -(inv * inv) if self.order >= 2 else None)

    def hull(self, other: Jet) -> Jet:
        return Jet(a.hull(b) for a, b in zip(self.d, other.d))
