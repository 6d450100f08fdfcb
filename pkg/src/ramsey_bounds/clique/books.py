"""Extraction of a large blue book from a set with many high blue degrees."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np

from ..exact import DomainError, to_fraction
from .coloring import RED, Coloring, Witness, bits, to_mask
from .search import SearchBudgetExceeded, find_clique


class BookPreconditionError(DomainError):
    def __init__(self, failed: list[str]):
        super().__init__("unmet hypotheses: " + "; ".join(failed))
        self.failed = failed


class BookShortfall(RuntimeError):
    pass


def _search(g, color, size, within, budget):
    try:
        return find_clique(g, color, size, within, budget)
    except SearchBudgetExceeded:
        return None


def blue_book_extract(
    coloring: Coloring,
    Xset,
    mu,
    b: int,
    k: int,
    color: int = 1,
    seed: int = 0,
    budget: int = 200_000,
) -> Witness:
    """A red K_k inside X, or a book (S, T) in ``color`` with |S| = b and
    |T| >= mu^b |X| / 2.

    The hypothesis "at least R(k, m) high-degree vertices" is replaced by a
    direct search of the high-degree set W for a red K_k or a K_m in
    ``color``; if neither turns up the unmet hypotheses are reported.
    """
    mu = to_fraction(mu)
    if not 0 < mu < 1 or b < 1 or k < 1:
        raise DomainError("need 0 < mu < 1 and positive b, k")
    X = Xset if isinstance(Xset, int) else to_mask(Xset)
    size = X.bit_count()
    m = math.ceil(5 * b * b / mu)
    failed = []
    if size < 5 * m * m:
        failed.append(f"|X| = {size} < 5 m^2 = {5 * m * m}")
        red = _search(coloring, RED, k, X, budget)
        if red is not None:
            return Witness.red_clique(red)
        raise BookPreconditionError(failed)
    row = coloring.adj[color]
    W = 0
    for v in bits(X):
        if (row[v] & X).bit_count() >= mu * size:
            W |= 1 << v
    U = _search(coloring, color, m, W, budget)
    if U is None:
        red = _search(coloring, RED, k, W, budget) or _search(coloring, RED, k, X, budget)
        if red is not None:
            return Witness.red_clique(red)
        failed.append(
            f"W ({W.bit_count()} vertices of blue degree >= mu|X|) holds neither a red K_{k} "
            f"nor a K_{m} in color {color}"
        )
        raise BookPreconditionError(failed)

    floor = mu**b * size / 2
    subsets = _subsets(U, b, seed)
    best_S, best_T = None, -1
    for S in subsets:
        common = X & ~to_mask(S)
        for s in S:
            common &= row[s]
        c = common.bit_count()
        if c > best_T:
            best_S, best_T, best_mask = S, c, common
    if best_T < floor:
        raise BookShortfall(f"best book has |T| = {best_T} < {float(floor)}")
    return Witness.blue_book(best_S, bits(best_mask), color, m=m, floor=floor)


def _subsets(U: list[int], b: int, seed: int):
    if math.comb(len(U), b) <= 100_000:
        return list(combinations(U, b))
    rng = np.random.default_rng(seed)
    return [tuple(sorted(rng.choice(U, size=b, replace=False).tolist())) for _ in range(10_000)]


def book_floor(mu, b: int, size: int) -> Fraction:
    return to_fraction(mu) ** b * size / 2
