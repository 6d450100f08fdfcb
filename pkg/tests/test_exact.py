from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ramsey_bounds.exact import (
    PHI,
    SQRT5,
    ExactReal,
    PrecisionError,
    QuadraticSurd,
    certified,
    format_decimal,
    parse_decimal,
    to_fraction,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
surds = st.builds(QuadraticSurd, rationals, rationals)
nonzero_surds = surds.filter(lambda s: s.sign() != 0)


def as_sympy(s: QuadraticSurd):
    return sympy.Rational(s.a.numerator, s.a.denominator) + sympy.Rational(
        s.b.numerator, s.b.denominator
    ) * sympy.sqrt(5)


@given(surds, surds)
def test_surd_ring_ops_match_sympy(u, v):
    assert sympy.simplify(as_sympy(u + v) - (as_sympy(u) + as_sympy(v))) == 0
    assert sympy.simplify(as_sympy(u - v) - (as_sympy(u) - as_sympy(v))) == 0
    assert sympy.simplify(as_sympy(u * v) - as_sympy(u) * as_sympy(v)) == 0


@given(surds, nonzero_surds)
def test_surd_division_is_exact_inverse(u, v):
    assert (u / v) * v == u


@given(surds, surds)
def test_surd_order_agrees_with_high_precision(u, v):
    du = u.to_mpf(200) - v.to_mpf(200)
    if u == v:
        assert not (u < v) and not (v < u)
    else:
        assert (u < v) == (du < 0)


def test_surd_constants():
    assert SQRT5 * SQRT5 == 5
    assert PHI * PHI == PHI + 1
    assert abs(float(PHI) - (1 + 5**0.5) / 2) < 1e-15


def test_surd_power_and_sign():
    assert (SQRT5 - 2) ** 2 == QuadraticSurd(9, -4)
    assert (SQRT5 - 2) ** -1 == SQRT5 + 2
    assert QuadraticSurd(9, -4).sign() == 1  # 9 - 4 sqrt5 ~ 0.0557
    assert QuadraticSurd(-9, 4).sign() == -1


def test_to_fraction_decimal_strings_exact():
    assert to_fraction("0.045") == Fraction(9, 200)
    assert to_fraction(3) == 3
    assert to_fraction(mpmath.mpf(0.1)) == Fraction(0.1)
    with pytest.raises(TypeError):
        to_fraction(object())


def test_format_parse_roundtrip():
    v = mpmath.mpf(2) / 3
    text = format_decimal(v, 128)
    assert text.endswith("@128")
    with mpmath.workprec(128):
        assert abs(parse_decimal(text) - v) < mpmath.mpf(2) ** -100


def test_certified_rejects_unstable_values():
    # a value whose digits depend on working precision
    with pytest.raises(PrecisionError):
        certified(lambda bits: mpmath.mpf(2) ** (-bits // 3) * 2 ** 40, 64)


def test_certified_log_space_overflow_is_explicit():
    r = certified(lambda bits: mpmath.mpf(5000), 128, log_space=True)
    assert r.overflow
    with pytest.raises(OverflowError):
        float(r)


def test_exact_real_determinism():
    a = certified(lambda bits: mpmath.pi / 7, 128)
    b = certified(lambda bits: mpmath.pi / 7, 128)
    assert a == b and str(a) == str(b)
    assert isinstance(a, ExactReal)
