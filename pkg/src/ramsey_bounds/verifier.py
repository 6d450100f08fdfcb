"""Interval-certified feasibility checks for exponent stages.

For a stage (alpha, beta) the slack function is

    psi(lam) = F(lam) + (log X + lam log M + lam log Y) / 2

with F the entropy exponent plus the correction G, M = lam e^-lam,
X = (1 - e^-F')^(1/(1-M)) (1 - M) and Y the lemma frontier at X for alpha.
A stage passes when F' > 0 on [lam_min, 1], psi clears a floor on
[split, 1], and psi' clears a floor on [lam_min, split] with psi(lam_min)
not too negative.  Everything is decided by outward-rounded enclosures and
deterministic bisection; point samples are reported but never trusted.
"""

from __future__ import annotations

import functools
import hashlib
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mpf

from .bounds import (
    CUBIC_COEFF,
    LINEAR_COEFF,
    NEUTRAL_BETA,
    Alpha,
    ExponentStage,
    _fraction_text,
    diagonal_base,
)
from .exact import DEFAULT_PREC, DomainError, ExactReal, format_decimal, to_fraction
from .interval import IntervalValue, Jet
from .region import ES_ALPHA, MembershipCertificate, ProvenAlpha, rule_certificate, strongest

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
CONDITIONS = ("fprime_positive", "condition1_membership", "condition2_psi", "near_zero_derivative")

NEAR_ZERO_ASSUMPTION = (
    "psi is certified on [lambda_min, 1] only; on (0, lambda_min) positivity rests on "
    "psi(0+) = 0 and psi' staying above its floor there, an asymptotic fact that is "
    "not interval-certified"
)


class XUndefinedError(ArithmeticError):
    """F' is not certifiably positive on the interval, so X is undefined."""

    def __init__(self, lam: IntervalValue):
        super().__init__(f"F' enclosure not positive on {lam!r}")
        self.lam = lam


class BranchBoundaryError(ArithmeticError):
    """The Y branch (X <= 1/2 or the clamp at 1) changes inside the interval."""

    def __init__(self, lam: IntervalValue):
        super().__init__(f"Y branch changes inside {lam!r}; split the interval")
        self.lam = lam


class ChainOrderError(ValueError):
    """Stages do not follow alpha_0 = 0, alpha_i = (0.17 - beta_{i-1})/e."""


# ---------------------------------------------------------------------------
# policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationPolicy:
    psi_floor_main: Fraction = Fraction(1, 10_000)
    psi_prime_floor: Fraction = Fraction(1, 100)
    lambda_min: Fraction = Fraction(1, 10**6)
    split_point: Fraction = Fraction(1, 20)
    max_depth: int = 60
    precision: int = DEFAULT_PREC
    samples: int = 200

    def __post_init__(self):
        for name in ("psi_floor_main", "psi_prime_floor", "lambda_min", "split_point"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.psi_floor_main <= 0 or self.psi_prime_floor <= 0:
            raise DomainError("floors must be positive")
        if not 0 < self.lambda_min < self.split_point < 1:
            raise DomainError("need 0 < lambda_min < split_point < 1")
        if self.max_depth < 1 or self.precision < 53 or self.samples < 2:
            raise DomainError("max_depth >= 1, precision >= 53 and samples >= 2 required")

    def to_json(self) -> dict:
        return {
            "psi_floor_main": _fraction_text(self.psi_floor_main),
            "psi_prime_floor": _fraction_text(self.psi_prime_floor),
            "lambda_min": _fraction_text(self.lambda_min),
            "split_point": _fraction_text(self.split_point),
            "max_depth": self.max_depth,
            "precision": self.precision,
            "samples": self.samples,
        }


# ---------------------------------------------------------------------------
# psi as a jet
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Consts:
    beta: IntervalValue
    c1: IntervalValue
    c3: IntervalValue
    beta2: IntervalValue
    c3_3: IntervalValue
    alpha: IntervalValue
    e_alpha: IntervalValue
    e_neg_alpha: IntervalValue
    half: IntervalValue


@functools.lru_cache(maxsize=256)
def _consts(alpha: Alpha, beta: Fraction, prec: int) -> _Consts:
    iv = lambda q: IntervalValue(q, prec=prec)  # noqa: E731
    a = alpha.interval(prec)
    return _Consts(
        beta=iv(beta),
        c1=iv(LINEAR_COEFF),
        c3=iv(CUBIC_COEFF),
        beta2=iv(2 * beta),
        c3_3=iv(3 * CUBIC_COEFF),
        alpha=a,
        e_alpha=a.exp(),
        e_neg_alpha=(-a).exp(),
        half=iv(Fraction(1, 2)),
    )


@dataclass
class _Eval:
    branch: int
    psi: Jet
    X: IntervalValue
    Fprime: IntervalValue


def _evaluate(stage: ExponentStage, lam: IntervalValue, order: int, prec: int, branches=None) -> list[_Eval]:
    """Jets of psi over ``lam`` for each Y branch that may be active there."""
    c = _consts(stage.alpha, stage.beta, prec)
    x = Jet.variable(lam, order)
    enl = (-x).exp()
    poly = x * (c.c1 + x * (c.beta + x * c.c3))
    dpoly = c.c1 + x * (c.beta2 + x * c.c3_3)
    log_lam = x.log()
    log_1p = (x + 1).log()
    Fp = log_1p - log_lam + (dpoly - poly) * enl
    if not Fp.value.positive():
        raise XUndefinedError(lam)
    F = (x + 1) * log_1p - x * log_lam + poly * enl
    one_m = 1 - x * enl
    log_m = log_lam - x
    log_x = (1 - (-Fp).exp()).log() / one_m + one_m.log()
    X = log_x.exp()
    if branches is None:
        if X.value.hi <= c.half.lo:
            branches = (1,)
        elif X.value.lo > c.half.hi:
            branches = (2,)
        else:
            branches = (1, 2)
    out = []
    for b in branches:
        if b == 1:
            log_y = _clamped_log(c.alpha + (1 - X).log(), order, lam)
        else:
            log_y = (1 - X * c.e_neg_alpha).log()
        psi = F + (log_x + x * log_m + x * log_y) * c.half
        out.append(_Eval(b, psi, X.value, Fp.value))
    return out


def _clamped_log(log_y: Jet, order: int, lam) -> Jet:
    # log min(Y, 1) = min(log Y, 0)
    v = log_y.value
    if v.hi <= 0:
        return log_y
    zero = IntervalValue(0, prec=v.prec)
    if v.lo >= 0:
        return Jet((zero,) * (order + 1))
    if order > 0:
        raise BranchBoundaryError(lam)
    return Jet((IntervalValue(v.lo, 0, prec=v.prec),))


def _as_interval(lam, prec) -> IntervalValue:
    if isinstance(lam, IntervalValue):
        return lam
    if isinstance(lam, tuple):
        return IntervalValue(lam[0], lam[1], prec=prec)
    return IntervalValue(lam, prec=prec)


def _check_lambda(lam: IntervalValue):
    if not (lam.lo > 0 and lam.hi <= 1):
        raise DomainError(f"lambda interval must lie in (0, 1], got {lam!r}")


def _intersect(a: IntervalValue, b: IntervalValue) -> IntervalValue:
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        raise ArithmeticError(f"disjoint enclosures {a!r} and {b!r}")
    return IntervalValue(lo, hi, prec=max(a.prec, b.prec))


def _mean_value(stage, lam, k, prec, branches=None) -> list[tuple[int, IntervalValue, IntervalValue]]:
    """Enclosures of the k-th derivative of psi (k = 0, 1), tightened by the
    mean value form around the midpoint. Returns (branch, enclosure, X)."""
    wide = _evaluate(stage, lam, k + 1, prec, branches)
    m = lam.midpoint_interval()
    out = []
    for w in wide:
        at_m = _evaluate(stage, m, k, prec, (w.branch,))[0]
        mvf = at_m.psi.d[k] + w.psi.d[k + 1] * (lam - m)
        out.append((w.branch, _intersect(w.psi.d[k], mvf), w.X))
    return out


def _refined(stage, lam, k, prec, tol, depth) -> IntervalValue:
    # bisect until each piece's enclosure is tight; hull the pieces
    try:
        parts = _mean_value(stage, lam, k, prec)
    except (XUndefinedError, BranchBoundaryError):
        if depth == 0:
            raise
        parts = None
    if parts is not None and k == 1 and len(parts) > 1:
        if depth == 0:
            raise BranchBoundaryError(lam)
        parts = None
    if parts is not None:
        out = parts[0][1]
        for _, e, _ in parts[1:]:
            out = out.hull(e)
        if depth == 0 or out.width <= tol:
            return out
        # stop once the overestimate is small next to the true variation
        ends = [_point_value(stage, e, k, prec) for e in (lam.lo, lam.hi)]
        if None not in ends and out.width <= 2 * abs(ends[0].mid - ends[1].mid) + tol:
            return out
    a, b = lam.split()
    return _refined(stage, a, k, prec, tol, depth - 1).hull(_refined(stage, b, k, prec, tol, depth - 1))


def enclose_psi(stage: ExponentStage, lam, prec: int = DEFAULT_PREC, tol="1e-3", depth: int = 12) -> IntervalValue:
    """Sound enclosure of psi over ``lam``; across a Y branch switch it covers
    both branches."""
    lam = _as_interval(lam, prec)
    _check_lambda(lam)
    return _refined(stage, lam, 0, prec, mpf(tol), depth)


def enclose_psi_prime(stage: ExponentStage, lam, prec: int = DEFAULT_PREC, tol="1e-3", depth: int = 12) -> IntervalValue:
    """Sound enclosure of psi' over ``lam``; raises BranchBoundaryError when
    the Y branch switches inside."""
    lam = _as_interval(lam, prec)
    _check_lambda(lam)
    return _refined(stage, lam, 1, prec, mpf(tol), depth)


def _point_value(stage, lam_mpf, k, prec) -> IntervalValue | None:
    """Enclosure of the k-th derivative of psi at a point, or None if undefined."""
    p = IntervalValue(lam_mpf, prec=prec)
    try:
        evs = _evaluate(stage, p, k, prec)
    except (XUndefinedError, BranchBoundaryError, ValueError, ZeroDivisionError):
        return None
    out = evs[0].psi.d[k]
    for e in evs[1:]:
        out = out.hull(e.psi.d[k])
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _dec(v, prec):
    return None if v is None else format_decimal(v, prec)


@dataclass
class VerificationReport:
    stage: ExponentStage
    policy: VerificationPolicy
    status: str
    conditions: dict
    margins: dict
    sampled: dict
    subintervals: dict
    witness: dict | None = None
    narrowest_inconclusive: dict | None = None
    assumptions: list = field(default_factory=list)
    membership: MembershipCertificate | None = None
    decomposition_digest: str = ""
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self, include_time: bool = True) -> dict:
        prec = self.policy.precision
        out = {
            "stage": {"alpha": str(self.stage.alpha), "beta": _fraction_text(self.stage.beta)},
            "policy": self.policy.to_json(),
            "status": self.status,
            "conditions": dict(self.conditions),
            "certified_margins": {k: _dec(v, prec) for k, v in self.margins.items()},
            "sampled_minima": {k: _dec(v, prec) for k, v in self.sampled.items()},
            "subintervals": dict(self.subintervals),
            "witness": self.witness,
            "narrowest_inconclusive": self.narrowest_inconclusive,
            "assumptions": list(self.assumptions),
            "membership": self.membership.to_json() if self.membership else None,
            "decomposition_digest": self.decomposition_digest,
        }
        if include_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


class _Region:
    """Deepest-first bisection of one floor condition."""

    def __init__(self, stage, lo, hi, k, floor, policy, digest):
        self.stage, self.k, self.policy = stage, k, policy
        self.prec = policy.precision
        self.root = IntervalValue(lo, hi, prec=self.prec)
        self.floor = IntervalValue(floor, prec=self.prec)
        self.digest = digest
        self.accepted = 0
        self.lower = None
        self.failure = None  # (condition, witness dict)
        self.inconclusive = None
        self.x_ok = True

    def _witness(self, condition, lam, value, label):
        return {
            "condition": condition,
            "lambda": lam.to_json(),
            label: value.to_json(),
            "excess_over_floor": (value - self.floor).to_json(),
        }

    def _check(self, lam):
        """Return (accepted lower bound) or None to split; may record failure."""
        try:
            parts = _mean_value(self.stage, lam, self.k, self.prec)
        except XUndefinedError:
            fp_point = self._fprime_at(lam.midpoint_interval())
            if fp_point is not None and fp_point.hi <= 0:
                self.failure = (
                    "fprime_positive",
                    {"condition": "fprime_positive", "lambda": lam.to_json(), "Fprime": fp_point.to_json()},
                )
            return None
        except (BranchBoundaryError, ValueError, ZeroDivisionError):
            return None
        lower = min(e.lo for _, e, _ in parts)
        x_inside = all(X.lo > 0 and X.hi < 1 for _, _, X in parts)
        if lower >= self.floor.hi and x_inside:
            return lower
        point = _point_value(self.stage, lam.mid, self.k, self.prec)
        if point is not None and point.lt(self.floor):
            cond = "condition2_psi" if self.k == 0 else "near_zero_derivative"
            label = "psi" if self.k == 0 else "psi_prime"
            self.failure = (cond, self._witness(cond, lam.midpoint_interval(), point, label))
        return None

    def _fprime_at(self, p):
        c = _consts(self.stage.alpha, self.stage.beta, self.prec)
        x = p
        enl = (-x).exp()
        poly = x * (c.c1 + x * (c.beta + x * c.c3))
        dpoly = c.c1 + x * (c.beta2 + x * c.c3_3)
        return (x + 1).log() - x.log() + (dpoly - poly) * enl

    def run(self):
        stack = [(self.root, 0)]
        while stack:
            lam, depth = stack.pop()
            lower = self._check(lam)
            if self.failure is not None:
                return
            if lower is not None:
                self.accepted += 1
                self.digest.update(f"{self.k}:{lam.lo}:{lam.hi};".encode())
                self.lower = lower if self.lower is None else min(self.lower, lower)
                continue
            if depth >= self.policy.max_depth:
                if self.inconclusive is None or lam.width < mpf(self.inconclusive["width"].split("@")[0]):
                    self.inconclusive = {
                        "condition": "condition2_psi" if self.k == 0 else "near_zero_derivative",
                        "lambda": lam.to_json(),
                        "width": format_decimal(lam.width, self.prec),
                    }
                continue
            left, right = lam.split()
            stack.append((right, depth + 1))
            stack.append((left, depth + 1))


def _sample_points(policy: VerificationPolicy):
    prec = policy.precision
    with mpmath.workprec(prec):
        lo, mid = mpf(policy.lambda_min.numerator) / policy.lambda_min.denominator, mpf(
            policy.split_point.numerator
        ) / policy.split_point.denominator
        n = policy.samples
        main = [mid + (1 - mid) * i / (n - 1) for i in range(n)]
        ratio = (mid / lo) ** (mpf(1) / (n // 2 - 1))
        near = [lo * ratio**i for i in range(n // 2)]
        near[-1] = mid
    return main, near


def verify_stage(
    stage: ExponentStage,
    proven: Iterable[ProvenAlpha] = (ES_ALPHA,),
    policy: VerificationPolicy | None = None,
) -> VerificationReport:
    """Certify the feasibility conditions of ``stage`` by adaptive bisection."""
    policy = policy or VerificationPolicy()
    proven = list(proven)
    prec = policy.precision
    start = time.perf_counter()
    conditions = {c: PASS for c in CONDITIONS}
    assumptions = [NEAR_ZERO_ASSUMPTION]
    witness = None

    # condition 1: Y comes from the lemma frontier of a proven alpha
    membership = rule_certificate(stage.alpha, proven, prec)
    if membership is None:
        conditions["condition1_membership"] = FAIL
        best = strongest(proven, prec)
        witness = {
            "condition": "condition1_membership",
            "detail": f"alpha {stage.alpha} exceeds the largest proven alpha {best.alpha}",
        }

    # cheap point samples: reported as sampled minima, and a fast refutation
    main_pts, near_pts = _sample_points(policy)
    floor_a = IntervalValue(policy.psi_floor_main, prec=prec)
    floor_b = IntervalValue(policy.psi_prime_floor, prec=prec)
    sampled = {"psi_main": None, "psi_prime_near_zero": None}
    for pts, k, floor, key, cond, label in (
        (main_pts, 0, floor_a, "psi_main", "condition2_psi", "psi"),
        (near_pts, 1, floor_b, "psi_prime_near_zero", "near_zero_derivative", "psi_prime"),
    ):
        worst = None
        for p in pts:
            v = _point_value(stage, p, k, prec)
            if v is None:
                continue
            sampled[key] = v.mid if sampled[key] is None else min(sampled[key], v.mid)
            if worst is None or v.hi < worst[1].hi:
                worst = (p, v)
        # the witness is the worst sample, certified below the floor
        if witness is None and worst is not None and worst[1].lt(floor):
            conditions[cond] = FAIL
            p, v = worst
            witness = {
                "condition": cond,
                "lambda": IntervalValue(p, prec=prec).to_json(),
                label: v.to_json(),
                "excess_over_floor": (v - floor).to_json(),
            }

    digest = hashlib.sha256()
    margins = {"psi_main": None, "psi_prime_near_zero": None, "psi_at_lambda_min": None}
    subintervals = {"main": 0, "near_zero": 0}
    narrowest = None

    if witness is None:
        regions = (
            ("main", _Region(stage, policy.split_point, 1, 0, policy.psi_floor_main, policy, digest)),
            ("near_zero", _Region(stage, policy.lambda_min, policy.split_point, 1, policy.psi_prime_floor, policy, digest)),
        )
        for name, region in regions:
            region.run()
            subintervals[name] = region.accepted
            key = "psi_main" if name == "main" else "psi_prime_near_zero"
            if region.failure is not None:
                cond, witness = region.failure
                conditions[cond] = FAIL
                break
            if region.inconclusive is not None:
                cond = region.inconclusive["condition"]
                conditions[cond] = INCONCLUSIVE
                if narrowest is None:
                    narrowest = region.inconclusive
            else:
                margins[key] = region.lower

        if witness is None:
            # psi(lambda_min) > -psi_prime_floor * lambda_min
            lm = IntervalValue(policy.lambda_min, prec=prec)
            v = enclose_psi(stage, lm, prec)
            margins["psi_at_lambda_min"] = v.lo
            bound = IntervalValue(-policy.psi_prime_floor * policy.lambda_min, prec=prec)
            if not v.lo > bound.hi:
                if v.lt(bound):
                    conditions["near_zero_derivative"] = FAIL
                    witness = {"condition": "near_zero_derivative", "lambda": lm.to_json(), "psi": v.to_json()}
                else:
                    conditions["near_zero_derivative"] = INCONCLUSIVE

    # F' > 0 holds on every accepted subinterval; when the bisection did not
    # cover [lambda_min, 1] it gets a separate check
    covered = witness is None and narrowest is None
    if witness is not None and witness["condition"] == "fprime_positive":
        conditions["fprime_positive"] = FAIL
    elif not covered:
        conditions["fprime_positive"] = PASS if _fprime_certified(stage, policy) else INCONCLUSIVE

    states = set(conditions.values())
    status = FAIL if FAIL in states else INCONCLUSIVE if INCONCLUSIVE in states else PASS
    if not stage.alpha.is_zero():
        best = strongest(proven, prec)
        assumptions.append(f"alpha {best.alpha} taken as proven by stage {best.provenance}")
    return VerificationReport(
        stage=stage,
        policy=policy,
        status=status,
        conditions=conditions,
        margins=margins,
        sampled=sampled,
        subintervals=subintervals,
        witness=witness,
        narrowest_inconclusive=narrowest,
        assumptions=assumptions,
        membership=membership,
        decomposition_digest=digest.hexdigest(),
        wall_time=time.perf_counter() - start,
    )


def _fprime_certified(stage, policy) -> bool:
    """Standalone bisection for F' > 0 on [lambda_min, 1]."""
    prec = policy.precision
    c = _consts(stage.alpha, stage.beta, prec)
    stack = [(IntervalValue(policy.lambda_min, 1, prec=prec), 0)]
    while stack:
        lam, depth = stack.pop()
        x = Jet.variable(lam, 1)
        enl = (-x).exp()
        poly = x * (c.c1 + x * (c.beta + x * c.c3))
        dpoly = c.c1 + x * (c.beta2 + x * c.c3_3)
        fp = (x + 1).log() - x.log() + (dpoly - poly) * enl
        m = lam.midpoint_interval()
        fm = (m + 1).log() - m.log()
        fm = fm + (c.c1 + m * (c.beta2 + m * c.c3_3) - m * (c.c1 + m * (c.beta + m * c.c3))) * (-m).exp()
        lower = max(fp.value.lo, (fm + fp.d[1] * (lam - m)).lo)
        if lower > 0:
            continue
        if depth >= policy.max_depth:
            return False
        a, b = lam.split()
        stack += [(b, depth + 1), (a, depth + 1)]
    return True


# ---------------------------------------------------------------------------
# linear domination and the chain
# ---------------------------------------------------------------------------


@dataclass
class LinearDominationReport:
    beta: Fraction
    status: str
    alpha: Alpha | None
    subintervals: int
    identity_at_one: bool
    witness: dict | None = None
    method: str = (
        "G(lam) - (beta - 0.17) lam / e = -lam q(lam); q' < 0 certified on [0, 1] "
        "and q(1) = 0 exactly, so q >= 0"
    )

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "beta": _fraction_text(self.beta),
            "status": self.status,
            "alpha": str(self.alpha) if self.alpha is not None else None,
            "subintervals": self.subintervals,
            "identity_at_one": self.identity_at_one,
            "witness": self.witness,
            "method": self.method,
        }


def verify_linear_domination(beta, prec: int = DEFAULT_PREC, max_depth: int = 40) -> LinearDominationReport:
    """Certify G(lam) <= (beta - 0.17) lam / e on [0, 1].

    With q(lam) = (beta - 0.17)/e - (-0.25 + beta lam + 0.08 lam^2) e^-lam the
    claim reads lam q(lam) >= 0.  q(1) vanishes identically, so a certified
    q' < 0 on [0, 1] gives q >= 0 there.
    """
    b = to_fraction(beta)
    if not 0 <= b <= Fraction(1, 10):
        raise DomainError(f"beta must lie in [0, 0.1], got {beta}")
    identity = LINEAR_COEFF + b + CUBIC_COEFF == b - NEUTRAL_BETA
    iv = lambda q: IntervalValue(q, prec=prec)  # noqa: E731
    slope = iv(b - NEUTRAL_BETA) * iv(-1).exp()

    def q(lam, order):
        x = Jet.variable(lam, order)
        return slope - (iv(LINEAR_COEFF) + x * (iv(b) + x * iv(CUBIC_COEFF))) * (-x).exp()

    stack = [(iv(0).hull(iv(1)), 0)]
    accepted = 0
    witness = None
    status = PASS
    while stack:
        lam, depth = stack.pop()
        d = q(lam, 1).d[1]
        if d.negative():
            accepted += 1
            continue
        dm = q(lam.midpoint_interval(), 1).d[1]
        if dm.ge(0):
            status, witness = FAIL, {"lambda": lam.midpoint_interval().to_json(), "q_prime": dm.to_json()}
            break
        if depth >= max_depth:
            status, witness = INCONCLUSIVE, {"lambda": lam.to_json()}
            break
        a, c = lam.split()
        stack += [(c, depth + 1), (a, depth + 1)]
    if status == PASS and not identity:
        status = FAIL
    alpha = Alpha(NEUTRAL_BETA - b, per_e=True) if status == PASS else None
    return LinearDominationReport(b, status, alpha, accepted, identity, witness)


@dataclass
class ChainReport:
    stages: list
    dominations: list
    status: str
    proven: list
    final_base: ExactReal | None
    exponent: str | None
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self, include_time: bool = True) -> dict:
        out = {
            "status": self.status,
            "stages": [r.to_json(include_time) for r in self.stages],
            "linear_domination": [d.to_json() for d in self.dominations],
            "proven_alphas": [
                {"alpha": str(p.alpha), "stage": p.provenance} for p in self.proven
            ],
            "final_base": str(self.final_base) if self.final_base is not None else None,
            "final_log_base": (
                format_decimal(self.final_base.log_value, self.final_base.precision)
                if self.final_base is not None
                else None
            ),
            "exponent": self.exponent,
        }
        if include_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


PAPER_CHAIN = (("0", "0.08"), ("0.09/e", "0.045"), ("0.125/e", "0.033"), ("0.137/e", "0.03"))


def make_stages(pairs: Sequence) -> list[ExponentStage]:
    """Build stages and check alpha_0 = 0, alpha_i = (0.17 - beta_{i-1})/e."""
    stages = [
        p if isinstance(p, ExponentStage) else ExponentStage.make(p[0], p[1], i)
        for i, p in enumerate(pairs)
    ]
    if not stages:
        raise ChainOrderError("empty chain")
    if not stages[0].alpha.is_zero():
        raise ChainOrderError(f"first stage must have alpha = 0, got {stages[0].alpha}")
    for prev, cur in zip(stages, stages[1:]):
        expected = Alpha(NEUTRAL_BETA - prev.beta, per_e=True)
        if cur.alpha != expected:
            raise ChainOrderError(f"alpha {cur.alpha} does not match (0.17 - {_fraction_text(prev.beta)})/e = {expected}")
    return [ExponentStage(s.alpha, s.beta, i) for i, s in enumerate(stages)]


def exponent_text(beta: Fraction) -> str:
    return (
        "F(lam) = (lam+1) log(lam+1) - lam log(lam) + "
        f"(-0.25 lam + {_fraction_text(beta)} lam^2 + 0.08 lam^3) e^(-lam)"
    )


def verify_chain(pairs: Sequence, policy: VerificationPolicy | None = None) -> ChainReport:
    """Verify stages in order, admitting each new alpha only after its stage passes."""
    policy = policy or VerificationPolicy()
    stages = make_stages(pairs)
    start = time.perf_counter()
    proven = [ES_ALPHA]
    reports, doms = [], []
    status = PASS
    for stage in stages:
        rep = verify_stage(stage, proven, policy)
        reports.append(rep)
        if not rep.passed:
            status = rep.status
            break
        dom = verify_linear_domination(stage.beta, policy.precision)
        doms.append(dom)
        if not dom.passed:
            status = dom.status
            break
        proven.append(ProvenAlpha(dom.alpha, stage.index))
    done = status == PASS
    last = stages[-1]
    return ChainReport(
        stages=reports,
        dominations=doms,
        status=status,
        proven=proven,
        final_base=diagonal_base(last, policy.precision) if done else None,
        exponent=exponent_text(last.beta) if done else None,
        wall_time=time.perf_counter() - start,
    )
