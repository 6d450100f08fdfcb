"""Number carriers: precision-checked reals and exact arithmetic in Q(sqrt 5)."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable

import mpmath
from mpmath import mpf

DEFAULT_PREC = 128

# log of the largest finite double; anything above cannot be shown as a float
_FLOAT_LOG_MAX = mpf("709.78")


class DomainError(ValueError):
    """An argument lies outside the region where a formula is defined."""


class PrecisionError(ArithmeticError):
    """Re-evaluation at doubled precision disagreed with the working value."""


def to_mpf(value, prec: int = DEFAULT_PREC) -> mpf:
    """Convert ints, Fractions, decimal strings, floats or mpf to an mpf."""
    with mpmath.workprec(prec):
        if isinstance(value, Rational) and not isinstance(value, int):
            return mpf(value.numerator) / value.denominator
        if isinstance(value, ExactReal):
            return +value.value
        return mpf(value)


def to_fraction(value) -> Fraction:
    """Exact rational for ints, Fractions, floats, mpf and decimal strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float, str)):
        return Fraction(value)
    if isinstance(value, mpf):
        man, exp = mpmath.mpf(value).man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


@functools.total_ordering
@dataclass(frozen=True)
class ExactReal:
    """A positive or signed real computed at ``precision`` bits.

    ``log_value`` is carried for quantities that are naturally products of
    powers, so that huge bounds stay representable; ``overflow`` flags values
    whose linear form does not fit in a double.
    """

    value: mpf
    precision: int = DEFAULT_PREC
    log_value: mpf | None = None

    @property
    def overflow(self) -> bool:
        return self.log_value is not None and self.log_value > _FLOAT_LOG_MAX

    def __float__(self) -> float:
        if self.overflow:
            raise OverflowError(
                f"value exceeds double range (log-value {mpmath.nstr(self.log_value, 15)})"
            )
        return float(self.value)

    def _key(self, other):
        if isinstance(other, ExactReal):
            return other.value
        return to_mpf(other, self.precision)

    def __eq__(self, other):
        try:
            return self.value == self._key(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self.value < self._key(other)

    def __hash__(self):
        return hash(self.value)

    def __str__(self) -> str:
        return format_decimal(self.value, self.precision)


def format_decimal(value, prec: int = DEFAULT_PREC, digits: int | None = None) -> str:
    """Decimal string with an explicit precision suffix, e.g. ``3.7992@128``."""
    if digits is None:
        digits = max(15, int(prec * 0.30103) - 2)
    with mpmath.workprec(prec):
        return f"{mpmath.nstr(to_mpf(value, prec), digits, min_fixed=-5, max_fixed=8)}@{prec}"


def parse_decimal(text: str) -> mpf:
    """Inverse of :func:`format_decimal` (the precision tag is dropped)."""
    body, _, tag = text.partition("@")
    prec = int(tag) if tag else DEFAULT_PREC
    with mpmath.workprec(prec):
        return mpf(body)


def certified(fn: Callable[[int], mpf], prec: int = DEFAULT_PREC, *, log_space: bool = False) -> ExactReal:
    """Evaluate ``fn`` at ``prec`` and ``2*prec`` bits and demand agreement.

    ``fn(bits)`` must compute its result at the given working precision. With
    ``log_space`` the callable returns the logarithm of a positive quantity and
    the comparison is made on the logarithm, so huge values never overflow.
    """
    with mpmath.workprec(prec):
        lo_prec = fn(prec)
    with mpmath.workprec(2 * prec):
        hi_prec = fn(2 * prec)
    with mpmath.workprec(2 * prec):
        scale = max(mpf(1), abs(hi_prec))
        tol = scale * mpf(2) ** (-(prec // 2))
        if not abs(lo_prec - hi_prec) <= tol:
            raise PrecisionError(
                f"value unstable under doubled precision: {lo_prec} vs {hi_prec}"
            )
    with mpmath.workprec(prec):
        if log_space:
            return ExactReal(mpmath.exp(lo_prec), prec, log_value=+lo_prec)
        return ExactReal(+lo_prec, prec)


class QuadraticSurd:
    """Exact number ``a + b*sqrt(5)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = to_fraction(a)
        self.b = to_fraction(b)

    @classmethod
    def coerce(cls, value) -> QuadraticSurd:
        if isinstance(value, QuadraticSurd):
            return value
        return cls(to_fraction(value), 0)

    def __add__(self, other):
        other = QuadraticSurd.coerce(other)
        return QuadraticSurd(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-QuadraticSurd.coerce(other))

    def __rsub__(self, other):
        return QuadraticSurd.coerce(other) - self

    def __mul__(self, other):
        other = QuadraticSurd.coerce(other)
        return QuadraticSurd(
            self.a * other.a + 5 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> QuadraticSurd:
        return QuadraticSurd(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def __truediv__(self, other):
        other = QuadraticSurd.coerce(other)
        n = other.norm()
        if n == 0:
            # sqrt 5 is irrational, so the norm vanishes only at zero
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        num = self * other.conjugate()
        return QuadraticSurd(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return QuadraticSurd.coerce(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers stay inside Q(sqrt 5)")
        if exponent < 0:
            return 1 / (self ** -exponent)
        result = QuadraticSurd(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def sign(self) -> int:
        """Exact sign, decided by comparing a^2 with 5 b^2."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: the term with the larger square wins
        lhs = self.a * self.a
        rhs = 5 * self.b * self.b
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, other):
        try:
            other = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def to_mpf(self, prec: int = DEFAULT_PREC) -> mpf:
        with mpmath.workprec(prec + 10):
            v = mpf(self.a.numerator) / self.a.denominator + (
                mpf(self.b.numerator) / self.b.denominator
            ) * mpmath.sqrt(5)
        with mpmath.workprec(prec):
            return +v

    def __float__(self):
        return float(self.to_mpf(64))

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b})"

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt(5)"


SQRT5 = QuadraticSurd(0, 1)
PHI = QuadraticSurd(Fraction(1, 2), Fraction(1, 2))
