"""Closed-form Ramsey upper bounds and the exponent functions behind them.

Every real-valued evaluator is computed in log space at the working precision,
then recomputed at twice that precision (see :func:`exact.certified`); the
result carries both its value and its logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from operator import mul

import mpmath
from mpmath import mpf

from .exact import (
    DEFAULT_PREC,
    PHI,
    SQRT5,
    DomainError,
    ExactReal,
    QuadraticSurd,
    certified,
    to_fraction,
    to_mpf,
)
from .interval import IntervalValue

# lower end of the admissible density range for the golden-ratio substitution
GOLDEN_P_MIN = (SQRT5 - 1) / (SQRT5 + 1)

CUBIC_COEFF = Fraction(2, 25)  # 0.08
LINEAR_COEFF = Fraction(-1, 4)  # -0.25
BETA_MAX = Fraction(1, 10)
# the correction G vanishes at lambda = 1 exactly when beta reaches this value
NEUTRAL_BETA = -(LINEAR_COEFF + CUBIC_COEFF)  # 0.17


def _check_positive_ints(**kwargs):
    for name, v in kwargs.items():
        if not isinstance(v, int) or v < 1:
            raise DomainError(f"{name} must be a positive integer, got {v!r}")


# ---------------------------------------------------------------------------
# two-colour bounds
# ---------------------------------------------------------------------------


def es_bound(k: int, l: int) -> int:
    """Erdős–Szekeres bound C(k+l-2, k-1), exact."""
    _check_positive_ints(k=k, l=l)
    return math.comb(k + l - 2, k - 1)


def es_product_bound(k: int, l: int, x, prec: int = DEFAULT_PREC) -> ExactReal:
    """x^(1-k) (1-x)^(1-l), valid for every 0 < x < 1."""
    _check_positive_ints(k=k, l=l)
    xf = to_mpf(x, 2 * prec)
    if not 0 < xf < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")

    def log_bound(bits):
        xv = to_mpf(x, bits)
        return (1 - k) * mpmath.log(xv) + (1 - l) * mpmath.log(1 - xv)

    return certified(log_bound, prec, log_space=True)


def _in_golden_range(p) -> bool:
    if isinstance(p, QuadraticSurd):
        return GOLDEN_P_MIN < p < 1
    try:
        q = to_fraction(p)
    except TypeError:
        q = None
    if q is not None:
        return GOLDEN_P_MIN < QuadraticSurd(q) < 1
    v = to_mpf(p, 256)
    return GOLDEN_P_MIN.to_mpf(256) < v < 1


def golden_x(p) -> QuadraticSurd:
    """x = phi*p + (1 - phi), chosen so that (1-p)^2 = (1-x)(p-x) exactly."""
    p = QuadraticSurd.coerce(p)
    if not GOLDEN_P_MIN < p < 1:
        raise DomainError(f"p must lie strictly between (sqrt5-1)/(sqrt5+1) and 1, got {p}")
    return PHI * p + (1 - PHI)


def golden_optimal_p(k: int, l: int) -> QuadraticSurd:
    """Density minimising :func:`thm_easy_bound` for fixed (k, l)."""
    _check_positive_ints(k=k, l=l)
    return ((SQRT5 + 1) * k + (2 * SQRT5 - 2) * l) / ((SQRT5 + 1) * (k + 2 * l))


def _p_to_mpf(p, bits):
    if isinstance(p, QuadraticSurd):
        return p.to_mpf(bits)
    return to_mpf(p, bits)


def thm_easy_bound(k: int, l: int, p, prec: int = DEFAULT_PREC) -> ExactReal:
    """4(k+l) x^(-k/2) (1-p)^(-l) with x the golden-ratio shift of p."""
    _check_positive_ints(k=k, l=l)
    if not _in_golden_range(p):
        raise DomainError(f"p = {p} outside ((sqrt5-1)/(sqrt5+1), 1)")

    def log_bound(bits):
        pv = _p_to_mpf(p, bits)
        phi = (1 + mpmath.sqrt(5)) / 2
        x = phi * pv + (1 - phi)
        return mpmath.log(4 * (k + l)) - mpf(k) / 2 * mpmath.log(x) - l * mpmath.log(1 - pv)

    return certified(log_bound, prec, log_space=True)


def _log_cor_easy(k, l, lead, bits):
    s5 = mpmath.sqrt(5)
    k_, l_ = mpf(k), mpf(l)
    return (
        mpmath.log(lead * (k_ + l_))
        + l_ * mpmath.log((s5 + 1) * (k_ + 2 * l_) / (4 * l_))
        + k_ / 2 * mpmath.log((k_ + 2 * l_) / k_)
    )


def cor_easy_bound(k: int, l: int, prec: int = DEFAULT_PREC) -> ExactReal:
    """4(k+l) ((sqrt5+1)(k+2l)/(4l))^l ((k+2l)/k)^(k/2), for k >= l."""
    _check_positive_ints(k=k, l=l)
    if l > k:
        raise DomainError(f"requires k >= l, got k={k}, l={l}")
    return certified(lambda bits: _log_cor_easy(k, l, 4, bits), prec, log_space=True)


def log_ratio_to_es(k: int, l: int, prec: int = DEFAULT_PREC) -> ExactReal:
    """log(cor_easy_bound / es_bound); negative means an improvement."""
    bound = cor_easy_bound(k, l, prec)
    with mpmath.workprec(prec):
        return ExactReal(bound.log_value - mpmath.log(es_bound(k, l)), prec)


def crossover_exponent(lam, prec: int = DEFAULT_PREC) -> mpf:
    """Per-k exponent of the corollary bound relative to Erdős–Szekeres at l = lam*k."""
    with mpmath.workprec(prec):
        lam = to_mpf(lam, prec)
        s5 = mpmath.sqrt(5)
        return lam * mpmath.log((s5 + 1) * (1 + 2 * lam) / (4 * (1 + lam))) + mpmath.log(
            (1 + 2 * lam) / (1 + lam) ** 2
        ) / 2


def crossover_root(tol=mpf("1e-9"), prec: int = DEFAULT_PREC) -> ExactReal:
    """Root in (0, 1) of :func:`crossover_exponent`, found by bisection."""

    def solve(bits):
        # the exponent is negative at 1/2 and positive at 1
        lo, hi = mpf("0.5"), mpf(1)
        assert crossover_exponent(lo, bits) < 0 < crossover_exponent(hi, bits)
        while hi - lo > tol / 4:
            mid = (lo + hi) / 2
            if crossover_exponent(mid, bits) < 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    return certified(solve, prec)


# ---------------------------------------------------------------------------
# multicolour bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MulticolorTarget:
    """Clique sizes l_1..l_c for the non-red colours."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise DomainError("a multicolour target needs at least one colour")
        for v in parts:
            if not isinstance(v, int) or v < 1:
                raise DomainError(f"target parts must be positive integers, got {parts}")

    @classmethod
    def of(cls, value) -> MulticolorTarget:
        if isinstance(value, MulticolorTarget):
            return value
        if isinstance(value, int):
            return cls((value,))
        return cls(tuple(value))

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def c(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def theta(target) -> Fraction:
    """Multinomial factor l^l / prod(l_i^l_i)."""
    target = MulticolorTarget.of(target)
    l = target.total
    return Fraction(l**l, reduce(mul, (v**v for v in target.parts), 1))


def multicolor_product_bound(k: int, target, x, ys, prec: int = DEFAULT_PREC) -> ExactReal:
    """x^(1-k) prod y_i^(1-l_i), valid when x + sum(y) <= 1."""
    _check_positive_ints(k=k)
    target = MulticolorTarget.of(target)
    ys = list(ys)
    if len(ys) != target.c:
        raise DomainError(f"need one y per colour ({target.c}), got {len(ys)}")
    xq = to_mpf(x, 2 * prec)
    yq = [to_mpf(y, 2 * prec) for y in ys]
    if not 0 < xq < 1 or any(y <= 0 for y in yq):
        raise DomainError("x must lie in (0,1) and every y_i must be positive")
    try:
        total = to_fraction(x) + sum(to_fraction(y) for y in ys)
        too_big = total > 1
    except TypeError:
        too_big = xq + sum(yq) > 1
    if too_big:
        raise DomainError("x + sum(y) must not exceed 1")

    def log_bound(bits):
        out = (1 - k) * mpmath.log(to_mpf(x, bits))
        for y, li in zip(ys, target.parts):
            out += (1 - li) * mpmath.log(to_mpf(y, bits))
        return out

    return certified(log_bound, prec, log_space=True)


def thm_easy2_bound(k: int, target, p, prec: int = DEFAULT_PREC) -> ExactReal:
    """Multicolour analogue of :func:`thm_easy_bound`, scaled by theta."""
    _check_positive_ints(k=k)
    target = MulticolorTarget.of(target)
    if not _in_golden_range(p):
        raise DomainError(f"p = {p} outside ((sqrt5-1)/(sqrt5+1), 1)")
    th = theta(target)

    def log_bound(bits):
        pv = _p_to_mpf(p, bits)
        phi = (1 + mpmath.sqrt(5)) / 2
        x = phi * pv + (1 - phi)
        return (
            mpmath.log(4 * (k + target.total))
            - mpf(k) / 2 * mpmath.log(x)
            - target.total * mpmath.log(1 - pv)
            + mpmath.log(mpf(th.numerator) / th.denominator)
        )

    return certified(log_bound, prec, log_space=True)


def cor_easy2_bound(k: int, target, prec: int = DEFAULT_PREC) -> ExactReal:
    """2(k+l) ((k+2l)/k)^(k/2) ((sqrt5+1)(k+2l)/(4l))^l * theta(target).

    The multicolour form has leading constant 2; the two-colour form has 4.
    """
    _check_positive_ints(k=k)
    target = MulticolorTarget.of(target)
    th = theta(target)

    def log_bound(bits):
        return _log_cor_easy(k, target.total, 2, bits) + mpmath.log(mpf(th.numerator) / th.denominator)

    return certified(log_bound, prec, log_space=True)


# ---------------------------------------------------------------------------
# book-step frontier
# ---------------------------------------------------------------------------


def _check_frontier_args(p, mu):
    pv, mv = to_mpf(p, 256), to_mpf(mu, 256)
    if not 0 < mv < pv < 1:
        raise DomainError(f"requires 0 < mu < p < 1, got p={p}, mu={mu}")


def book_frontier(p, mu, prec: int = DEFAULT_PREC) -> ExactReal:
    """p^(1/(1-mu)) (1-mu): supremum of admissible x for the book step."""
    _check_frontier_args(p, mu)

    def log_value(bits):
        pv, mv = to_mpf(p, bits), to_mpf(mu, bits)
        return mpmath.log(pv) / (1 - mv) + mpmath.log(1 - mv)

    return certified(log_value, prec, log_space=True)


def book_frontier_finite(p, mu, r, prec: int = DEFAULT_PREC) -> ExactReal:
    """(p^(1/r) - mu)^r (1-mu)^(1-r), whose r -> infinity limit is the frontier."""
    _check_frontier_args(p, mu)
    if r < 1:
        raise DomainError("r must be at least 1")

    def log_value(bits):
        pv, mv = to_mpf(p, bits), to_mpf(mu, bits)
        base = pv ** (mpf(1) / r) - mv
        if base <= 0:
            raise DomainError(f"p^(1/r) <= mu at r={r}")
        return r * mpmath.log(base) + (1 - mpf(r)) * mpmath.log(1 - mv)

    return certified(log_value, prec, log_space=True)


def bookcor_size_threshold(k: int, l: int, x, mu, y, prec: int = DEFAULT_PREC) -> ExactReal:
    """x^(-k/2) (mu*y)^(-l/2): vertex count from which the book corollary applies."""
    _check_positive_ints(k=k, l=l)
    for name, v in (("x", x), ("mu", mu), ("y", y)):
        if not 0 < to_mpf(v, 256) < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {v}")

    def log_value(bits):
        xv, mv, yv = (to_mpf(v, bits) for v in (x, mu, y))
        return -mpf(k) / 2 * mpmath.log(xv) - mpf(l) / 2 * mpmath.log(mv * yv)

    return certified(log_value, prec, log_space=True)


# ---------------------------------------------------------------------------
# exponent stages
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Alpha:
    """Nonnegative constant alpha, stored as ``coeff`` or ``coeff / e``.

    All alphas produced by the linear-domination rule have the second form,
    which keeps the stage linkage alpha_i = (0.17 - beta_{i-1})/e exact.
    """

    coeff: Fraction
    per_e: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeff", to_fraction(self.coeff))
        if self.coeff < 0:
            raise DomainError(f"alpha must be nonnegative, got {self.coeff}")
        if self.coeff == 0:
            object.__setattr__(self, "per_e", True)

    @classmethod
    def parse(cls, text: str | int | Fraction) -> Alpha:
        if not isinstance(text, str):
            return cls(to_fraction(text), per_e=False) if text else cls(0)
        s = text.strip().replace(" ", "")
        for suffix in ("/e", "*exp(-1)", "*e^-1", "e^-1"):
            if s.endswith(suffix):
                return cls(Fraction(s[: -len(suffix)]), per_e=True)
        value = Fraction(s)
        return cls(value, per_e=False) if value else cls(0)

    def value(self, prec: int = DEFAULT_PREC) -> mpf:
        with mpmath.workprec(prec):
            v = mpf(self.coeff.numerator) / self.coeff.denominator
            return v / mpmath.e if self.per_e else v

    def interval(self, prec: int = DEFAULT_PREC) -> IntervalValue:
        c = IntervalValue(self.coeff, prec=prec)
        if self.per_e:
            return c * IntervalValue(-1, prec=prec).exp()
        return c

    def is_zero(self) -> bool:
        return self.coeff == 0

    def compare(self, other: Alpha, prec: int = DEFAULT_PREC) -> int:
        """-1, 0 or 1; exact when both share a form, interval-certified otherwise."""
        if self.per_e == other.per_e:
            return (self.coeff > other.coeff) - (self.coeff < other.coeff)
        if self.is_zero() or other.is_zero():
            return (self.coeff > 0) - (other.coeff > 0)
        a, b = self.interval(prec), other.interval(prec)
        if a.hi < b.lo:
            return -1
        if b.hi < a.lo:
            return 1
        raise ArithmeticError(f"cannot order alphas {self} and {other} at {prec} bits")

    def __str__(self):
        if self.coeff == 0:
            return "0"
        c = _fraction_text(self.coeff)
        return f"{c}/e" if self.per_e else c


def _fraction_text(q: Fraction) -> str:
    # decimal when the denominator is 2^a 5^b, else p/q
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        text = f"{float(q)!r}" if abs(q) < 10**15 else str(q)
        if Fraction(text) == q:
            return text
    return str(q)


ALPHA_ZERO = Alpha(0)


@dataclass(frozen=True)
class ExponentStage:
    """Parameters (alpha, beta) of one stage of the exponent iteration."""

    alpha: Alpha
    beta: Fraction
    index: int = 0

    def __post_init__(self):
        if not isinstance(self.alpha, Alpha):
            object.__setattr__(self, "alpha", Alpha.parse(self.alpha))
        object.__setattr__(self, "beta", to_fraction(self.beta))
        if not 0 <= self.beta <= BETA_MAX:
            raise DomainError(f"beta must lie in [0, 0.1], got {self.beta}")

    @classmethod
    def make(cls, alpha, beta, index: int = 0) -> ExponentStage:
        a = alpha if isinstance(alpha, Alpha) else Alpha.parse(alpha)
        b = Fraction(beta) if isinstance(beta, str) else to_fraction(beta)
        return cls(a, b, index)

    def label(self) -> str:
        return f"(alpha={self.alpha}, beta={_fraction_text(self.beta)})"


def _frac_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def correction(lam, beta, prec: int = DEFAULT_PREC) -> mpf:
    """G(lam) = (-0.25 lam + beta lam^2 + 0.08 lam^3) e^(-lam)."""
    with mpmath.workprec(prec):
        lam = to_mpf(lam, prec)
        b = _frac_mpf(to_fraction(beta))
        return (_frac_mpf(LINEAR_COEFF) * lam + b * lam**2 + _frac_mpf(CUBIC_COEFF) * lam**3) * mpmath.exp(-lam)


@dataclass(frozen=True)
class StageProfile:
    F: mpf
    Fprime: mpf
    M: mpf
    X: mpf
    Y: mpf
    psi: mpf
    G: mpf
    branch: int


def _profile_at(stage: ExponentStage, lam: mpf, bits: int) -> StageProfile:
    with mpmath.workprec(bits):
        b = _frac_mpf(stage.beta)
        c1, c3 = _frac_mpf(LINEAR_COEFF), _frac_mpf(CUBIC_COEFF)
        enl = mpmath.exp(-lam)
        poly = c1 * lam + b * lam**2 + c3 * lam**3
        dpoly = c1 + 2 * b * lam + 3 * c3 * lam**2
        G = poly * enl
        Gp = (dpoly - poly) * enl
        F = (lam + 1) * mpmath.log(lam + 1) - lam * mpmath.log(lam) + G
        Fp = mpmath.log(lam + 1) - mpmath.log(lam) + Gp
        if Fp <= 0:
            raise DomainError(f"F'({lam}) = {Fp} <= 0 leaves X undefined")
        M = lam * enl
        X = (1 - mpmath.exp(-Fp)) ** (1 / (1 - M)) * (1 - M)
        alpha = stage.alpha.value(bits)
        if X <= mpf(1) / 2:
            Y, branch = mpmath.exp(alpha) * (1 - X), 1
        else:
            Y, branch = 1 - X * mpmath.exp(-alpha), 2
        Y = min(Y, mpf(1))
        psi = F + (mpmath.log(X) + lam * mpmath.log(M) + lam * mpmath.log(Y)) / 2
        return StageProfile(F, Fp, M, X, Y, psi, G, branch)


def stage_profile(stage: ExponentStage, lam, prec: int = DEFAULT_PREC) -> StageProfile:
    """Point values of F, F', M, X, Y and the slack psi at ``lam`` in (0, 1]."""
    lam_hi = to_mpf(lam, 2 * prec)
    if not 0 < lam_hi <= 1:
        raise DomainError(f"lambda must lie in (0, 1], got {lam}")
    hi = _profile_at(stage, lam_hi, 2 * prec)
    lo = _profile_at(stage, to_mpf(lam, prec), prec)
    with mpmath.workprec(2 * prec):
        if abs(lo.psi - hi.psi) > max(mpf(1), abs(hi.psi)) * mpf(2) ** (-(prec // 2)):
            raise ArithmeticError(f"psi unstable at lambda={lam}")
    return lo


def diagonal_base(stage: ExponentStage, prec: int = DEFAULT_PREC) -> ExactReal:
    """e^F(1) = 4 exp((beta - 0.17)/e): growth rate of the diagonal bound."""

    def log_value(bits):
        return 2 * mpmath.log(2) + _frac_mpf(stage.beta - NEUTRAL_BETA) / mpmath.e

    return certified(log_value, prec, log_space=True)


def main_theorem_bound(k: int, l: int, beta=Fraction(3, 100), prec: int = DEFAULT_PREC) -> ExactReal:
    """e^(G(l/k) k) * C(k+l, l) for l <= k, without the o(k) term."""
    _check_positive_ints(k=k, l=l)
    if l > k:
        raise DomainError(f"requires l <= k, got k={k}, l={l}")

    def log_value(bits):
        lam = mpf(l) / k
        return correction(lam, beta, bits) * k + mpmath.log(math.comb(k + l, l))

    return certified(log_value, prec, log_space=True)


def entropy_exponent(lam, prec: int = DEFAULT_PREC) -> mpf:
    """(lam+1) log(lam+1) - lam log lam: the Erdős–Szekeres exponent per k."""
    with mpmath.workprec(prec):
        lam = to_mpf(lam, prec)
        return (lam + 1) * mpmath.log(lam + 1) - lam * mpmath.log(lam)
