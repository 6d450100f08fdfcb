"""Parameter search for the exponent iteration, and an exploratory
piecewise construction of feasible (F, M) profiles."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import BETA_MAX, NEUTRAL_BETA, Alpha, ExponentStage, _fraction_text, diagonal_base
from .exact import DomainError, ExactReal, format_decimal, to_fraction
from .region import ES_ALPHA, ProvenAlpha
from .verifier import (
    VerificationPolicy,
    verify_linear_domination,
    verify_stage,
)


class NoFeasibleBeta(RuntimeError):
    """Even beta = 0.1 fails verification for the given alpha."""


def alpha_from_beta(beta) -> Alpha:
    """(0.17 - beta)/e, kept in exact form."""
    b = to_fraction(beta)
    if not 0 <= b <= BETA_MAX:
        raise DomainError(f"beta must lie in [0, 0.1], got {beta}")
    return Alpha(NEUTRAL_BETA - b, per_e=True)


def _grid(resolution: Fraction) -> list[Fraction]:
    n = int(BETA_MAX / resolution)
    return [resolution * i for i in range(n + 1)]


def search_min_beta(
    alpha,
    resolution="0.001",
    policy: VerificationPolicy | None = None,
    proven=None,
    reports: dict | None = None,
) -> Fraction:
    """Smallest grid beta whose stage (alpha, beta) passes verification.

    Binary search over {0, r, 2r, ...} <= 0.1, relying on feasibility being
    monotone in beta. INCONCLUSIVE counts as not passing.
    """
    policy = policy or VerificationPolicy()
    res = to_fraction(resolution)
    if res <= 0:
        raise DomainError("resolution must be positive")
    if isinstance(alpha, ProvenAlpha):
        pa = alpha
    else:
        a = alpha if isinstance(alpha, Alpha) else Alpha.parse(alpha)
        pa = ES_ALPHA if a.is_zero() else ProvenAlpha(a, provenance=-1)
    proven = list(proven) if proven is not None else [ES_ALPHA, pa]
    reports = {} if reports is None else reports

    def passes(beta):
        if beta not in reports:
            reports[beta] = verify_stage(ExponentStage(pa.alpha, beta), proven, policy)
        return reports[beta].passed

    grid = _grid(res)
    if not passes(grid[-1]):
        raise NoFeasibleBeta(f"no beta <= {_fraction_text(grid[-1])} passes for alpha = {pa.alpha}")
    lo, hi = -1, len(grid) - 1  # grid[hi] passes; grid[lo] fails or is off-grid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(grid[mid]):
            hi = mid
        else:
            lo = mid
    return grid[hi]


@dataclass
class IterationTrace:
    stages: list = field(default_factory=list)  # ExponentStage
    reports: list = field(default_factory=list)  # VerificationReport
    dominations: list = field(default_factory=list)  # LinearDominationReport
    stop_reason: str = ""
    final_base: ExactReal | None = None
    resolution: Fraction = Fraction(1, 1000)

    @property
    def betas(self) -> list[Fraction]:
        return [s.beta for s in self.stages]

    def to_json(self, include_time: bool = True) -> dict:
        return {
            "resolution": _fraction_text(self.resolution),
            "stages": [
                {
                    "index": s.index,
                    "alpha": str(s.alpha),
                    "beta": _fraction_text(s.beta),
                    "report": r.to_json(include_time),
                }
                for s, r in zip(self.stages, self.reports)
            ],
            "linear_domination": [d.to_json() for d in self.dominations],
            "stop_reason": self.stop_reason,
            "final_base": str(self.final_base) if self.final_base is not None else None,
            "final_log_base": (
                format_decimal(self.final_base.log_value, self.final_base.precision)
                if self.final_base is not None
                else None
            ),
        }


def run_iteration(max_stages: int = 4, resolution="0.001", policy: VerificationPolicy | None = None) -> IterationTrace:
    """Alternate the beta search with the alpha update, starting from alpha = 0."""
    if max_stages < 1:
        raise DomainError("max_stages must be at least 1")
    policy = policy or VerificationPolicy()
    res = to_fraction(resolution)
    trace = IterationTrace(resolution=res)
    proven = [ES_ALPHA]
    alpha = ES_ALPHA
    for i in range(max_stages):
        reports: dict = {}
        try:
            beta = search_min_beta(alpha, res, policy, proven, reports)
        except NoFeasibleBeta:
            trace.stop_reason = "verification_failure"
            break
        stage = ExponentStage(alpha.alpha, beta, i)
        trace.stages.append(stage)
        trace.reports.append(reports[beta])
        trace.final_base = diagonal_base(stage, policy.precision)
        if i > 0 and trace.stages[-2].beta - beta < res:
            trace.stop_reason = "converged"
            break
        if i == max_stages - 1:
            trace.stop_reason = "max_stages"
            break
        dom = verify_linear_domination(beta, policy.precision)
        trace.dominations.append(dom)
        if not dom.passed:
            trace.stop_reason = "verification_failure"
            break
        alpha = ProvenAlpha(dom.alpha, i)
        proven.append(alpha)
    return trace


# ---------------------------------------------------------------------------
# piecewise exploration (floating point, uncertified)
# ---------------------------------------------------------------------------


def _entropy(lam):
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (lam + 1) * np.log1p(lam) - np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1)), 0.0)
    return out


def _slack(F, Fp, M, lam):
    """psi = F + (log X + lam log M + lam log(1 - X)) / 2 with alpha = 0.

    Arrays broadcast; infeasible X (F' <= 0) gives -inf.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        base = -np.expm1(-Fp)
        X = np.where(Fp > 0, np.power(np.clip(base, 1e-300, None), 1 / (1 - M)) * (1 - M), 0.0)
        out = F + 0.5 * (np.log(X) + lam * np.log(M) + lam * np.log1p(-X))
    return np.where(np.isfinite(out), out, -np.inf)


@dataclass
class PiecewiseProfile:
    N: int
    breakpoints: list  # i/N as Fractions
    F: list  # floats at breakpoints
    M: list  # per-interval constant; entry 0 is None (M = lam e^-lam there)
    first_offset: float  # c in F = entropy(lam) + c lam on the first interval
    margin: float
    feasible: bool = True
    failure: dict | None = None

    def F_at(self, lam):
        """Evaluate the profile at points of [0, 1]."""
        lam = np.asarray(lam, dtype=float)
        h = 1.0 / self.N
        i = np.minimum((lam / h).astype(int), self.N - 1)
        left = i * h
        Fl = np.asarray(self.F)
        slope = (Fl[np.minimum(i + 1, self.N)] - Fl[i]) / h
        lin = Fl[i] + slope * (lam - left)
        return np.where(i == 0, _entropy(lam) + self.first_offset * lam, lin)

    def slack_at(self, lam):
        """Pointwise psi of the profile (alpha = 0)."""
        lam = np.asarray(lam, dtype=float)
        h = 1.0 / self.N
        i = np.minimum((lam / h).astype(int), self.N - 1)
        Fl = np.asarray(self.F)
        slope = (Fl[np.minimum(i + 1, self.N)] - Fl[i]) / h
        Mi = np.asarray([np.nan if m is None else m for m in self.M])[i]
        with np.errstate(divide="ignore"):
            first_fp = np.log1p(1 / np.where(lam > 0, lam, np.inf)) + self.first_offset
        Fp = np.where(i == 0, first_fp, slope)
        M = np.where(i == 0, lam * np.exp(-lam), Mi)
        return _slack(self.F_at(lam), Fp, M, lam)

    @property
    def diagonal_value(self) -> float:
        return math.exp(self.F[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "F", "M"])
        for i, (b, f) in enumerate(zip(self.breakpoints, self.F)):
            if i == self.N:
                m = ""
            elif self.M[i] is None:
                m = "lam*exp(-lam)"
            else:
                m = repr(self.M[i])
            w.writerow([_fraction_text(b), repr(f), m])
        return buf.getvalue()


@dataclass
class SmoothFit:
    beta: float
    coefficients: tuple  # (linear, beta, cubic)
    max_gap: float  # max |G_profile - G_fit| at breakpoints
    diagonal_value: float  # e^F(1) of the fitted smooth F


def _sample_points(lo, hi, n, shift=0.0):
    # n points in (lo, hi]; shift in [0, 1) moves them left by a fraction of a step
    step = (hi - lo) / n
    return lo + step * (np.arange(1, n + 1) - shift)


def piecewise_explore(
    N: int = 10,
    slope_grid: float = 0.005,
    m_grid: float = 0.005,
    margin: float = 1e-6,
    points: int = 100,
    slope_max: float = 4.0,
) -> PiecewiseProfile:
    """Greedy left-to-right construction of a feasible (F, M) profile.

    The first interval uses F = entropy(lam) + c lam with M = lam e^-lam,
    since a linear F through F(0) = 0 cannot satisfy the slack condition as
    lam -> 0.  Each later interval takes a linear F (continuous with the
    previous one) and a constant M, choosing the least slope for which some M
    on the grid keeps psi >= margin at ``points`` sample points.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    h = 1.0 / N
    breakpoints = [Fraction(i, N) for i in range(N + 1)]
    Ms: list = [None]
    F = [0.0]

    # first interval: smallest offset c on the slope grid
    lam = _sample_points(0.0, h, points)
    offsets = np.arange(-2.0, 2.0 + slope_grid / 2, slope_grid)
    c_best = None
    for c in offsets:
        s = _slack(_entropy(lam) + c * lam, np.log1p(1 / lam) + c, lam * np.exp(-lam), lam)
        if s.min() >= margin:
            c_best = float(c)
            break
    if c_best is None:
        return PiecewiseProfile(N, breakpoints, F, Ms, math.nan, margin, False, {"interval": 0})
    F.append(float(_entropy(h) + c_best * h))

    m_values = np.arange(m_grid, 1.0, m_grid)
    slopes = np.arange(0.0, slope_max + slope_grid / 2, slope_grid)
    for i in range(1, N):
        left = i * h
        lam = _sample_points(left, left + h, points)
        lam = np.concatenate(([left], lam))
        chosen = None
        best_violation = -np.inf
        for s in slopes:
            Fv = F[i] + s * (lam - left)
            slack = _slack(Fv[None, :], s, m_values[:, None], lam[None, :]).min(axis=1)
            best = int(np.argmax(slack))
            best_violation = max(best_violation, float(slack[best]))
            if slack[best] >= margin:
                chosen = (float(s), float(m_values[best]))
                break
        if chosen is None:
            return PiecewiseProfile(
                N, breakpoints, F, Ms, c_best, margin, False,
                {"interval": i, "best_slack": best_violation},
            )
        Ms.append(chosen[1])
        F.append(F[i] + chosen[0] * h)
    return PiecewiseProfile(N, breakpoints, F, Ms, c_best, margin)


def fit_smooth(profile: PiecewiseProfile, free: bool = False) -> SmoothFit:
    """Least-squares fit of F - entropy at the breakpoints to the correction
    family (-0.25 lam + beta lam^2 + 0.08 lam^3) e^-lam.

    With ``free`` the linear and cubic coefficients are fitted as well.
    """
    lam = np.array([float(b) for b in profile.breakpoints[1:]])
    G = np.array(profile.F[1:]) - _entropy(lam)
    e = np.exp(-lam)
    if free:
        A = np.stack([lam * e, lam**2 * e, lam**3 * e], axis=1)
        coef, *_ = np.linalg.lstsq(A, G, rcond=None)
        c1, beta, c3 = (float(c) for c in coef)
    else:
        c1, c3 = -0.25, 0.08
        r = G - (c1 * lam + c3 * lam**3) * e
        phi = lam**2 * e
        beta = float(np.dot(r, phi) / np.dot(phi, phi))
    fit = (c1 * lam + beta * lam**2 + c3 * lam**3) * e
    g1 = (c1 + beta + c3) / math.e
    return SmoothFit(beta, (c1, beta, c3), float(np.max(np.abs(G - fit))), 4 * math.exp(g1))
