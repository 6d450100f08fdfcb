import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramsey_bounds.bounds import (
    GOLDEN_P_MIN,
    Alpha,
    ExponentStage,
    book_frontier,
    book_frontier_finite,
    bookcor_size_threshold,
    cor_easy2_bound,
    cor_easy_bound,
    crossover_exponent,
    crossover_root,
    diagonal_base,
    es_bound,
    es_product_bound,
    golden_optimal_p,
    golden_x,
    log_ratio_to_es,
    main_theorem_bound,
    multicolor_product_bound,
    stage_profile,
    theta,
    thm_easy2_bound,
    thm_easy_bound,
)
from ramsey_bounds.exact import DomainError, QuadraticSurd



def hp(fn):
    """Evaluate an oracle expression at 60 decimal digits."""
    with mpmath.workdps(60):
        return fn()


def close(a, b, rel=mpmath.mpf("1e-25")):
    with mpmath.workdps(60):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        return abs(a - b) <= rel * max(1, abs(b))


# -- Erdos-Szekeres ----------------------------------------------------------


def test_es_bound_values():
    assert es_bound(3, 3) == 6
    assert es_bound(4, 4) == 20
    assert es_bound(5, 3) == 15 == es_bound(3, 5)


@pytest.mark.parametrize("k,l", [(0, 3), (3, 0), (-1, 2)])
def test_es_bound_rejects_nonpositive(k, l):
    with pytest.raises(DomainError):
        es_bound(k, l)


def test_es_product_values():
    assert close(es_product_bound(3, 3, Fraction(1, 2)).value, 16)
    assert close(es_product_bound(2, 2, Fraction(1, 4)).value, hp(lambda: mpmath.mpf(16) / 3))
    x = Fraction(2, 7)
    assert close(es_product_bound(5, 1, x).value, hp(lambda: (mpmath.mpf(2) / 7) ** -4))
    with pytest.raises(DomainError):
        es_product_bound(3, 3, 1)


@pytest.mark.parametrize("k", range(3, 7))
@pytest.mark.parametrize("l", range(3, 7))
def test_es_product_grid_minimum_at_expected_x(k, l):
    step = Fraction(1, 500)
    grid = [step * i for i in range(1, 500)]
    best = min(grid, key=lambda x: es_product_bound(k, l, x, 64).log_value)
    assert abs(best - Fraction(k - 1, k + l - 2)) <= step


# -- golden-ratio shift --------------------------------------------------------


def test_golden_x_half():
    x = golden_x(Fraction(1, 2))
    assert x == QuadraticSurd(Fraction(3, 4), Fraction(-1, 4))
    p = QuadraticSurd(Fraction(1, 2))
    assert (1 - p) ** 2 == (1 - x) * (p - x) == Fraction(1, 4)


@pytest.mark.parametrize("p", [GOLDEN_P_MIN, QuadraticSurd(1), QuadraticSurd(Fraction(1, 5))])
def test_golden_x_rejects_boundary(p):
    with pytest.raises(DomainError):
        golden_x(p)


def test_golden_x_at_boundary_would_vanish():
    # the algebra behind the rejection: the formula sends the lower end to 0
    from ramsey_bounds.exact import PHI

    assert PHI * GOLDEN_P_MIN + (1 - PHI) == 0


golden_p = st.fractions(min_value=Fraction(382, 1000), max_value=Fraction(999, 1000), max_denominator=10**4).filter(
    lambda q: GOLDEN_P_MIN < q < 1
)


@given(golden_p)
def test_golden_identity_exact(p):
    x = golden_x(p)
    assert (1 - p) ** 2 == (1 - x) * (QuadraticSurd(p) - x)
    assert 0 < x < p


# -- easy bounds -----------------------------------------------------------------


def thm_easy_oracle(k, l, p):
    with mpmath.workdps(60):
        s5 = mpmath.sqrt(5)
        x = (1 + s5) / 2 * p + (1 - s5) / 2
        return 4 * (k + l) * x ** (-mpmath.mpf(k) / 2) * (1 - p) ** (-l)


def cor_easy_oracle(k, l, lead=4):
    with mpmath.workdps(60):
        k, l = mpmath.mpf(k), mpmath.mpf(l)
        return lead * (k + l) * ((mpmath.sqrt(5) + 1) * (k + 2 * l) / (4 * l)) ** l * ((k + 2 * l) / k) ** (k / 2)


def test_thm_easy_value():
    v = thm_easy_bound(3, 3, Fraction(1, 2))
    assert close(v.value, thm_easy_oracle(3, 3, mpmath.mpf(1) / 2))
    # 24 ((3 - sqrt5)/4)^(-3/2) 8, about 2300.43
    assert abs(float(v) - 2300.43) < 0.01


def test_thm_easy_diverges_as_p_to_one():
    logs = [thm_easy_bound(3, 3, 1 - Fraction(1, 10**j)).log_value for j in range(1, 8)]
    assert all(a < b for a, b in zip(logs, logs[1:]))
    huge = thm_easy_bound(3, 400, 1 - Fraction(1, 1000))
    assert huge.overflow
    with pytest.raises(OverflowError):
        float(huge)


def test_thm_easy_rejects_out_of_range():
    with pytest.raises(DomainError):
        thm_easy_bound(3, 3, Fraction(1, 5))


def golden_section_min(f, a, b, iters=200):
    with mpmath.workdps(50):
        g = (mpmath.sqrt(5) - 1) / 2
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        for _ in range(iters):
            c, d = b - g * (b - a), a + g * (b - a)
            if f(c) < f(d):
                b = d
            else:
                a = c
        return (a + b) / 2


@pytest.mark.parametrize("k,l", [(3, 3), (5, 3), (4, 2)])
def test_optimal_p_matches_golden_section(k, l):
    def log_thm(p):
        s5 = mpmath.sqrt(5)
        x = (1 + s5) / 2 * p + (1 - s5) / 2
        return -mpmath.mpf(k) / 2 * mpmath.log(x) - l * mpmath.log(1 - p)

    lo = float(GOLDEN_P_MIN) + 1e-9
    p_star = golden_section_min(log_thm, lo, 1 - 1e-9)
    assert abs(golden_optimal_p(k, l).to_mpf(160) - p_star) < 1e-9


def test_cor_easy_value_and_domain():
    v = cor_easy_bound(3, 3)
    assert close(v.value, cor_easy_oracle(3, 3))
    assert abs(float(v) - 1782.91) < 0.01
    with pytest.raises(DomainError):
        cor_easy_bound(3, 4)


def test_cor_easy_equals_thm_easy_at_substituted_p():
    for k, l in [(5, 3), (7, 7), (12, 4)]:
        a = cor_easy_bound(k, l)
        b = thm_easy_bound(k, l, golden_optimal_p(k, l))
        assert close(a.log_value, b.log_value, mpmath.mpf("1e-30"))


def test_log_ratio_to_es():
    r = log_ratio_to_es(3, 3)
    assert close(r.value, hp(lambda: mpmath.log(cor_easy_oracle(3, 3) / 6)))


def test_improvement_rate_near_zero():
    lam = mpmath.mpf("1e-12")
    rate = crossover_exponent(lam) / lam
    assert abs(rate - mpmath.log((mpmath.sqrt(5) + 1) / 4)) < 1e-9
    assert abs(float(rate) + 0.2119) < 1e-4


def test_crossover():
    root = crossover_root()
    assert 0.6985 <= float(root) <= 0.6995
    assert abs(crossover_exponent(root.value)) < 1e-8
    assert abs(float(crossover_exponent(1)) - 0.0497) < 1e-4
    assert crossover_exponent(Fraction(1, 2)) < 0


# -- multicolour ---------------------------------------------------------------------


def test_theta_values():
    assert theta((5,)) == 1
    assert theta((1, 1)) == 4
    assert theta((2, 1)) == Fraction(27, 4)
    assert theta((1, 1, 1)) == 27


@given(st.lists(st.integers(1, 6), min_size=2, max_size=4))
def test_theta_strictly_above_one_for_several_colors(parts):
    assert theta(parts) > 1


def test_multicolor_product():
    v = multicolor_product_bound(3, (2, 2), Fraction(1, 2), (Fraction(1, 4), Fraction(1, 4)))
    assert close(v.value, 64)
    single = multicolor_product_bound(4, (3,), Fraction(1, 3), (Fraction(2, 3),))
    assert single == es_product_bound(4, 3, Fraction(1, 3))
    ones = multicolor_product_bound(4, (1, 1), Fraction(1, 3), (Fraction(1, 5), Fraction(1, 7)))
    assert close(ones.value, hp(lambda: mpmath.mpf(27)))
    with pytest.raises(DomainError):
        multicolor_product_bound(3, (2, 2), Fraction(1, 2), (Fraction(1, 3), Fraction(1, 4)))


def test_cor_easy2_is_half_at_one_color():
    a = cor_easy2_bound(3, (3,))
    assert close(a.value, hp(lambda: cor_easy_bound(3, 3).value / 2))
    assert abs(float(a) - 891.46) < 0.01


def test_cor_easy2_theta_multiplier():
    # (2,1) has the same total as (3) and carries the theta factor 27/4
    a = cor_easy2_bound(3, (2, 1))
    b = cor_easy2_bound(3, (3,))
    assert close(a.value, hp(lambda: b.value * 27 / 4))
    assert close(a.value, hp(lambda: cor_easy_oracle(3, 3, lead=2) * 27 / 4))


def test_thm_easy2_reduces_to_thm_easy():
    p = Fraction(3, 5)
    assert close(thm_easy2_bound(4, (3,), p).value, thm_easy_bound(4, 3, p).value)


# -- book step ---------------------------------------------------------------------


def test_book_frontier_values():
    v = book_frontier(Fraction(1, 2), Fraction(1, 5))
    assert close(v.value, hp(lambda: mpmath.mpf("0.5") ** mpmath.mpf("1.25") * mpmath.mpf("0.8")))
    assert abs(float(v) - 0.33636) < 1e-5
    near = book_frontier(Fraction(1, 2), Fraction(1, 10**9))
    assert abs(float(near) - 0.5) < 1e-8
    with pytest.raises(DomainError):
        book_frontier(Fraction(1, 2), Fraction(1, 2))


GRID = [(p, p * m) for p in (Fraction(3, 10), Fraction(1, 2), Fraction(3, 5), Fraction(7, 10), Fraction(9, 10))
        for m in (Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(7, 10), Fraction(9, 10))]


@pytest.mark.parametrize("p,mu", GRID)
def test_book_finite_converges(p, mu):
    limit = book_frontier(p, mu).value
    assert limit < float(p)
    with mpmath.workprec(128):
        errs = [abs(book_frontier_finite(p, mu, 2**j).value - limit) for j in range(4, 21)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-4


def test_bookcor_threshold():
    assert close(bookcor_size_threshold(2, 2, *(Fraction(1, 2),) * 3).value, 8)
    with pytest.raises(DomainError):
        bookcor_size_threshold(2, 0, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    base = bookcor_size_threshold(3, 2, Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)).value
    for i in range(3):
        args = [Fraction(1, 3)] * 3
        args[i] = Fraction(1, 2)
        assert bookcor_size_threshold(3, 2, *args).value < base


# -- exponent stages --------------------------------------------------------------

PAPER_STAGES = [("0", "0.08"), ("0.09/e", "0.045"), ("0.125/e", "0.033"), ("0.137/e", "0.03")]


def psi_oracle(alpha, beta, lam):
    """Direct transcription of F, X, Y, psi at 60 digits."""
    with mpmath.workdps(60):
        lam, beta, alpha = mpmath.mpf(lam), mpmath.mpf(beta), mpmath.mpf(alpha)
        g = lambda t: (-mpmath.mpf("0.25") * t + beta * t**2 + mpmath.mpf("0.08") * t**3) * mpmath.exp(-t)
        F = lambda t: (t + 1) * mpmath.log(t + 1) - t * mpmath.log(t) + g(t)
        Fp = mpmath.diff(F, lam)
        M = lam * mpmath.exp(-lam)
        X = (1 - mpmath.exp(-Fp)) ** (1 / (1 - M)) * (1 - M)
        Y = mpmath.exp(alpha) * (1 - X) if X <= 0.5 else 1 - X * mpmath.exp(-alpha)
        Y = min(Y, 1)
        return F(lam) + (mpmath.log(X) + lam * mpmath.log(M) + lam * mpmath.log(Y)) / 2


def test_stage_profile_at_one():
    pr = stage_profile(ExponentStage.make("0", "0.08"), 1)
    assert close(pr.M, hp(lambda: 1 / mpmath.e))
    assert abs(pr.psi - psi_oracle(0, "0.08", 1)) < 1e-20
    assert abs(float(pr.psi) - 2.489e-3) < 1e-6
    g1 = stage_profile(ExponentStage.make("0.137/e", "0.03"), 1).G
    assert close(g1, hp(lambda: -mpmath.mpf("0.14") / mpmath.e))


@pytest.mark.parametrize("alpha,beta", PAPER_STAGES)
def test_stage_profile_matches_oracle(alpha, beta):
    stage = ExponentStage.make(alpha, beta)
    a = Alpha.parse(alpha).value(200)
    for lam in ("0.01", "0.2", "0.33", "0.5", "0.9"):
        assert abs(stage_profile(stage, Fraction(lam)).psi - psi_oracle(a, beta, lam)) < 1e-20


@pytest.mark.parametrize("alpha,beta", PAPER_STAGES)
def test_fprime_positive_and_x_in_unit_interval(alpha, beta):
    stage = ExponentStage.make(alpha, beta)
    for i in range(1, 1001):
        pr = stage_profile(stage, Fraction(i, 1000), 64)
        assert pr.Fprime > 0 and 0 < pr.X < 1 and 0 < pr.Y <= 1


def test_stage_profile_domain():
    with pytest.raises(DomainError):
        stage_profile(ExponentStage.make("0", "0.08"), 0)
    with pytest.raises(DomainError):
        ExponentStage.make("0", "0.17")


def test_diagonal_base_values():
    base = lambda b: float(diagonal_base(ExponentStage.make("0", b)))
    assert abs(base("0.03") - 3.79921) < 1e-5
    assert 3.8696 < base("0.08") <= 3.87
    # beta = 0.17 is outside the stage range; the closed form still gives 4 there
    with mpmath.workdps(40):
        assert 4 * mpmath.exp((mpmath.mpf("0.17") - mpmath.mpf("0.17")) / mpmath.e) == 4


def test_diagonal_base_equals_exp_F1():
    stage = ExponentStage.make("0.137/e", "0.03")
    assert close(diagonal_base(stage).value, hp(lambda: mpmath.exp(stage_profile(stage, 1, 192).F)), mpmath.mpf("1e-30"))


def test_main_theorem_bound():
    v = main_theorem_bound(10, 10)
    expect = hp(lambda: mpmath.exp(10 * (-mpmath.mpf("0.14")) / mpmath.e) * math.comb(20, 10))
    assert close(v.value, expect)
    with pytest.raises(DomainError):
        main_theorem_bound(3, 4)


def test_evaluators_deterministic():
    for f in (lambda: cor_easy_bound(9, 4), lambda: thm_easy_bound(5, 5, Fraction(2, 3)), crossover_root):
        assert str(f()) == str(f())
