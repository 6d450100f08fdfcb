"""Monochromatic clique search on bitset adjacency."""

from __future__ import annotations

from .coloring import Coloring, bits


class SearchBudgetExceeded(RuntimeError):
    pass


def greedy_clique(g: Coloring, color: int, within: int, limit: int | None = None) -> list[int]:
    """Repeatedly add the candidate with most ``color`` neighbors among the rest,
    stopping at ``limit`` vertices if given."""
    row = g.adj[color]
    chosen: list[int] = []
    cand = within
    while cand and (limit is None or len(chosen) < limit):
        best, best_deg = -1, -1
        for v in bits(cand):
            d = (row[v] & cand).bit_count()
            if d > best_deg:
                best, best_deg = v, d
        chosen.append(best)
        cand &= row[best]
    return chosen


def find_clique(g: Coloring, color: int, size: int, within: int, budget: int | None = None) -> list[int] | None:
    """A ``color`` clique of exactly ``size`` vertices inside ``within``, or None.

    Depth-first with a cardinality bound; exhaustive unless ``budget`` caps
    the number of search nodes.
    """
    if size <= 0:
        return []
    if within.bit_count() < size:
        return None
    greedy = greedy_clique(g, color, within, size) if budget is not None else []
    if len(greedy) >= size:
        return sorted(greedy[:size])
    row = g.adj[color]
    nodes = 0

    def rec(chosen, cand):
        nonlocal nodes
        if len(chosen) == size:
            return chosen
        while cand:
            if len(chosen) + cand.bit_count() < size:
                return None
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"clique search exceeded {budget} nodes")
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            found = rec(chosen + [v], cand & row[v])
            if found:
                return found
        return None

    found = rec([], within)
    return sorted(found) if found else None
