"""Executable versions of the excess-edge descent and its outer induction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..bounds import MulticolorTarget, golden_x, thm_easy2_bound
from ..exact import DomainError, to_fraction
from .coloring import RED, Candidate, Coloring, Witness, bits, witness_validate
from .search import find_clique


class HypothesisError(ValueError):
    """The excess falls short of the lemma's threshold."""

    def __init__(self, lhs, rhs):
        super().__init__(f"f_p(X, Y) = {lhs} is below the threshold {rhs}")
        self.lhs, self.rhs = lhs, rhs


class InternalContradiction(AssertionError):
    """A step the lemma guarantees did not happen; indicates a bug."""


class PartitionShortfall(RuntimeError):
    def __init__(self, best, threshold):
        super().__init__(f"best partition excess {best} is below the threshold {threshold}")
        self.best, self.threshold = best, threshold


class SizePreconditionError(DomainError):
    pass


def _fp(coloring: Coloring, X: int, Y: int, p: Fraction) -> Fraction:
    if not X or not Y:
        return Fraction(0)
    return coloring.edges_between(X, Y) - p * X.bit_count() * Y.bit_count()


def excess_fp(cand: Candidate, p) -> Fraction:
    """e_R(X, Y) - p |X| |Y|, exactly."""
    return _fp(cand.coloring, cand.X, cand.Y, to_fraction(p))


@dataclass(frozen=True)
class InequalityReport:
    avg_lhs: Fraction  # sum over v of f_p(X, N_R(v) & Y)
    avg_rhs: Fraction  # p |X| f_p(X, Y)
    convex_lhs: Fraction  # sum over v of d(X, N_R(v) & Y) |N_R(v) & Y|
    convex_rhs: Fraction  # e_R(X, Y) d(X, Y)

    @property
    def avg_ok(self) -> bool:
        return self.avg_lhs >= self.avg_rhs

    @property
    def convex_ok(self) -> bool:
        return self.convex_lhs >= self.convex_rhs

    @property
    def passed(self) -> bool:
        return self.avg_ok and self.convex_ok


def inequality_suite(cand: Candidate, p) -> InequalityReport:
    """Both averaging inequalities evaluated exactly.

    Terms with an empty red neighborhood N_R(v) & Y contribute 0.
    """
    p = to_fraction(p)
    g, X, Y = cand.coloring, cand.X, cand.Y
    sx = X.bit_count()
    avg = Fraction(0)
    convex = Fraction(0)
    for v in bits(X):
        S = g.adj[RED][v] & Y
        avg += _fp(g, X, S, p)
        if S:
            convex += Fraction(g.edges_between(X, S), sx)
    e = g.edges_between(X, Y)
    return InequalityReport(
        avg,
        p * sx * _fp(g, X, Y, p),
        convex,
        Fraction(e * e, sx * Y.bit_count()),
    )


def lemma_threshold(k: int, ell, t, p, x, theta) -> Fraction:
    """(k+t) x^(1-k) (1-x)^(c-l) (p-x)^(c-t) prod theta_i^(-l_i-t_i)."""
    c = len(ell)
    L, T = sum(ell), sum(t)
    p, x = to_fraction(p), to_fraction(x)
    theta = [to_fraction(th) for th in theta]
    val = Fraction(k + T) * x ** (1 - k) * (1 - x) ** (c - L) * (p - x) ** (c - T)
    for th, li, ti in zip(theta, ell, t):
        val *= th ** (-li - ti)
    return val


def _check_params(p, x, k, ell, t, theta):
    if not 0 < x < p < 1:
        raise DomainError(f"need 0 < x < p < 1, got x={x}, p={p}")
    if k < 1 or any(v < 1 for v in ell) or any(v < 1 for v in t):
        raise DomainError("clique sizes must be positive")
    if not len(ell) == len(t) == len(theta):
        raise DomainError("targets, t-targets and theta need one entry per color")
    if any(th <= 0 for th in theta) or sum(theta) != 1:
        raise DomainError("theta must be positive and sum to 1")


def recurse_good(cand: Candidate, p, x, k: int, targets, t_targets, theta=None, trace: list | None = None) -> Witness:
    """Run the excess-edge induction on ``cand`` and return what it finds:
    a red K_k in X u Y, a K_{t_i} in color i inside X, or a K_{l_i} in
    color i inside Y.

    ``trace`` (if given) receives one (k, t, pivot, branch) tuple per step.
    """
    p, x = to_fraction(p), to_fraction(x)
    ell = tuple(MulticolorTarget.of(targets))
    t = tuple(MulticolorTarget.of(t_targets))
    theta = tuple(to_fraction(th) for th in (theta if theta is not None else (1,) * len(ell)))
    _check_params(p, x, k, ell, t, theta)
    g = cand.coloring
    if len(ell) != g.c:
        raise DomainError(f"coloring has {g.c} non-red colors, targets have {len(ell)}")
    f = _fp(g, cand.X, cand.Y, p)
    need = lemma_threshold(k, ell, t, p, x, theta)
    if f < need:
        raise HypothesisError(f, need)
    trace = trace if trace is not None else []
    return _good(g, cand.X, cand.Y, k, ell, t, p, x, theta, trace)


def _good(g, X, Y, k, ell, t, p, x, theta, trace) -> Witness:
    if k == 1:
        trace.append((k, t, None, "base"))
        return Witness.red_clique([bits(X)[0]])
    for i, ti in enumerate(t):
        if ti == 1:
            trace.append((k, t, None, "base"))
            return Witness.mono_clique(i + 1, [bits(X)[0]], side="X")
    f = _fp(g, X, Y, p)
    red = g.adj[RED]
    pivot, best = None, None
    for v in bits(X):
        val = _fp(g, X, red[v] & Y, p)
        if best is None or val > best:
            pivot, best = v, val
    if best < p * f:
        raise InternalContradiction("no vertex keeps a p-fraction of the excess")
    v = pivot
    Y1 = red[v] & Y
    shrink = Fraction(k + sum(t) - 1, k + sum(t)) * f
    XR = red[v] & X
    if _fp(g, XR, Y1, p) >= shrink * x:
        trace.append((k, t, v, "R"))
        w = _good(g, XR, Y1, k - 1, ell, t, p, x, theta, trace)
        return w.with_vertex(v) if w.kind == "RedClique" else w
    for i in range(len(t)):
        XB = g.adj[i + 1][v] & X
        if _fp(g, XB, Y1, p) >= theta[i] * shrink * (p - x):
            trace.append((k, t, v, ("B", i + 1)))
            t2 = t[:i] + (t[i] - 1,) + t[i + 1 :]
            w = _good(g, XB, Y1, k, ell, t2, p, x, theta, trace)
            if w.kind == "MonoClique" and w.color == i + 1 and w.side == "X":
                return w.with_vertex(v)
            return w
    # no branch: Y is at least R(k, l), so search it directly
    trace.append((k, t, v, "Y"))
    found = find_clique(g, RED, k, Y)
    if found is not None:
        return Witness.red_clique(found)
    for i, li in enumerate(ell):
        found = find_clique(g, i + 1, li, Y)
        if found is not None:
            return Witness.mono_clique(i + 1, found, side="Y")
    raise InternalContradiction("Y is large enough to hold a target clique, yet none was found")


# ---------------------------------------------------------------------------
# outer induction
# ---------------------------------------------------------------------------


def rational_x(p) -> Fraction:
    """A rational stand-in for the golden-ratio x(p), strictly inside (0, p)."""
    p = to_fraction(p)
    v = golden_x(p).to_mpf(96)
    xq = Fraction(mpmath.nstr(v, 28)).limit_denominator(10**6)
    if not 0 < xq < p:
        raise DomainError(f"no rational x in (0, {p}) near {v}")
    return xq


def _partition(g: Coloring, mask: int, p: Fraction, threshold: Fraction, seed: int, tries: int, strategy: str):
    vs = bits(mask)
    m = len(vs)
    if m < 2:
        raise PartitionShortfall(Fraction(0), threshold)
    A = np.zeros((m, m), dtype=np.int64)
    pos = {v: i for i, v in enumerate(vs)}
    for i, v in enumerate(vs):
        for u in bits(g.adj[RED][v] & mask):
            A[i, pos[u]] = 1
    a, b = p.numerator, p.denominator

    def scaled(S):  # b * f_p for rows of 0/1 indicator matrix S (1 = X)
        e = ((S @ A) * (1 - S)).sum(axis=1)
        sx = S.sum(axis=1)
        return b * e - a * sx * (m - sx)

    if strategy == "exhaustive" or (strategy == "auto" and m <= 16):
        codes = np.arange(1, (1 << m) - 1, dtype=np.int64)
        S = (codes[:, None] >> np.arange(m)) & 1
        vals = scaled(S)
        best = S[int(np.argmax(vals))]
    else:
        rng = np.random.default_rng(seed)
        S = np.zeros((tries, m), dtype=np.int64)
        for r in range(tries):
            S[r, rng.permutation(m)[: m // 2]] = 1
        best = S[int(np.argmax(scaled(S)))].copy()
        # greedy single-vertex moves while they improve the excess
        while True:
            sx = int(best.sum())
            to_x = A @ best
            to_y = A.sum(axis=1) - to_x
            gain_x_to_y = b * (to_x - to_y) - a * ((sx - 1) * (m - sx + 1) - sx * (m - sx))
            gain_y_to_x = b * (to_y - to_x) - a * ((sx + 1) * (m - sx - 1) - sx * (m - sx))
            gain = np.where(best == 1, gain_x_to_y, gain_y_to_x)
            if sx == 1:
                gain[best == 1] = -1
            if sx == m - 1:
                gain[best == 0] = -1
            j = int(np.argmax(gain))
            if gain[j] <= 0:
                break
            best[j] ^= 1
    X = sum(1 << vs[i] for i in range(m) if best[i])
    Y = mask & ~X
    f = _fp(g, X, Y, p)
    if f < threshold:
        raise PartitionShortfall(f, threshold)
    return Candidate(g, X, Y)


def descend(
    coloring: Coloring,
    k: int,
    targets,
    p,
    partition_strategy: str = "auto",
    seed: int = 0,
    tries: int = 512,
    enforce_size: bool = True,
    trace: list | None = None,
) -> Witness:
    """Find a red K_k or a K_{l_i} in color i by the outer induction on l.

    A vertex with a large color-i neighborhood sends the search there with
    l_i reduced by one; otherwise a partition with large excess is handed to
    :func:`recurse_good`.
    """
    ell = tuple(MulticolorTarget.of(targets))
    p = to_fraction(p)
    if len(ell) != coloring.c:
        raise DomainError(f"coloring has {coloring.c} non-red colors, targets have {len(ell)}")
    if enforce_size:
        bound = thm_easy2_bound(k, ell, p)
        need = math.ceil(bound.value)
        if coloring.n < need:
            raise SizePreconditionError(f"n = {coloring.n} is below the required {need}")
    x = rational_x(p)
    trace = trace if trace is not None else []
    w = _descend(coloring, coloring.all_vertices, k, ell, p, x, partition_strategy, seed, tries, trace)
    if not witness_validate(coloring, w):
        raise InternalContradiction("descent produced an invalid witness")
    return w


def _descend(g, mask, k, ell, p, x, strategy, seed, tries, trace) -> Witness:
    if k == 1:
        return Witness.red_clique([bits(mask)[0]])
    for i, li in enumerate(ell):
        if li == 1:
            return Witness.mono_clique(i + 1, [bits(mask)[0]])
    n = mask.bit_count()
    L = sum(ell)
    scale = Fraction(k + L - 1, k + L) * (1 - p) * n
    for i, li in enumerate(ell):
        need = Fraction(li, L) * scale
        for v in bits(mask):
            nb = g.adj[i + 1][v] & mask
            if nb.bit_count() >= need:
                trace.append(("blue", i + 1, v, nb.bit_count()))
                ell2 = ell[:i] + (li - 1,) + ell[i + 1 :]
                w = _descend(g, nb, k, ell2, p, x, strategy, seed, tries, trace)
                if w.kind == "MonoClique" and w.color == i + 1:
                    return Witness.mono_clique(i + 1, w.vertices + (v,))
                return w
    theta = tuple(Fraction(li, L) for li in ell)
    threshold = lemma_threshold(k, ell, ell, p, x, theta)
    cand = _partition(g, mask, p, threshold, seed, tries, strategy)
    trace.append(("partition", cand.size_x, cand.size_y, _fp(g, cand.X, cand.Y, p)))
    w = _good(g, cand.X, cand.Y, k, ell, ell, p, x, theta, [])
    return Witness(w.kind, w.vertices, w.color, None, w.book)
