"""Exact small Ramsey numbers by vertex-by-vertex extension up to isomorphism."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

from ..bounds import MulticolorTarget
from .coloring import Coloring, bits
from .search import find_clique


class RamseyBudgetError(RuntimeError):
    pass


@dataclass
class RamseyResult:
    k: int
    targets: tuple
    value: int | None  # exact R when found within n_max
    lower_bound: int  # R >= lower_bound
    survivors: list = field(default_factory=list)  # iso classes of good colorings per n

    def __str__(self):
        return str(self.value) if self.value is not None else f">= {self.lower_bound}"

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "targets": list(self.targets),
            "value": self.value,
            "lower_bound": self.lower_bound,
            "survivors": self.survivors,
        }


def _refine(n: int, adj) -> list:
    """Isomorphism-invariant vertex labels by iterated neighborhood refinement."""
    labels = [tuple(adj[col][v].bit_count() for col in range(len(adj))) for v in range(n)]
    while True:
        rank = {lab: i for i, lab in enumerate(sorted(set(labels)))}
        cur = [rank[lab] for lab in labels]
        new = [
            (cur[v],) + tuple(tuple(sorted(cur[u] for u in bits(adj[col][v]))) for col in range(len(adj)))
            for v in range(n)
        ]
        rank2 = {lab: i for i, lab in enumerate(sorted(set(new)))}
        nxt = [rank2[lab] for lab in new]
        if len(set(nxt)) == len(set(cur)):
            return cur
        labels = nxt


def canonical_key(n: int, adj) -> tuple:
    """Smallest edge-color string over relabelings that respect the refined
    vertex classes; equal keys iff isomorphic colorings."""
    labels = _refine(n, adj)
    classes = [[v for v in range(n) if labels[v] == lab] for lab in sorted(set(labels))]
    ncol = len(adj)

    def color(u, v):
        for col in range(ncol):
            if adj[col][u] >> v & 1:
                return col
        return -1

    table = [[color(u, v) if u != v else -1 for v in range(n)] for u in range(n)]
    best = None
    for parts in product(*(permutations(c) for c in classes)):
        order = [v for part in parts for v in part]
        key = tuple(table[order[i]][order[j]] for i in range(n) for j in range(i + 1, n))
        if best is None or key < best:
            best = key
    return (tuple(len(c) for c in classes),) + best


def ramsey_exact(k: int, targets, n_max: int = 8, budget: int = 2_000_000) -> RamseyResult:
    """Least N <= n_max such that every coloring of K_N holds a red K_k or a
    K_{l_i} in color i; otherwise report R >= n_max + 1."""
    ell = tuple(MulticolorTarget.of(targets))
    c = len(ell)
    sizes = (k,) + ell
    if min(sizes) == 1:
        return RamseyResult(k, ell, 1, 1, [])
    # good colorings of K_1
    level = {(): (1, tuple((0,) for _ in range(c + 1)))}
    survivors = [1]
    work = 0
    for n in range(2, n_max + 1):
        nxt = {}
        for _, (m, adj) in level.items():
            for colors in product(range(c + 1), repeat=m):
                work += 1
                if work > budget:
                    raise RamseyBudgetError(f"more than {budget} extensions at n = {n}")
                new_adj = [list(row) + [0] for row in adj]
                for u, col in enumerate(colors):
                    new_adj[col][u] |= 1 << m
                    new_adj[col][m] |= 1 << u
                g = Coloring(n, c, new_adj)
                if any(
                    find_clique(g, col, sizes[col] - 1, g.adj[col][m]) is not None for col in range(c + 1)
                ):
                    continue
                key = canonical_key(n, g.adj)
                if key not in nxt:
                    nxt[key] = (n, g.adj)
        survivors.append(len(nxt))
        if not nxt:
            return RamseyResult(k, ell, n, n, survivors)
        level = nxt
    return RamseyResult(k, ell, None, n_max + 1, survivors)
