"""Edge colorings of complete graphs as per-color bitset adjacency."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

RED = 0


def bits(mask: int) -> list[int]:
    """Indices of set bits, ascending."""
    if mask < 1 << 64:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out
    s = bin(mask)[:1:-1]
    return [i for i, ch in enumerate(s) if ch == "1"]


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Coloring:
    """Complete graph on ``n`` vertices, each edge colored 0 (red) or 1..c.

    ``adj[color][v]`` is the bitset of vertices joined to ``v`` in ``color``.
    """

    __slots__ = ("n", "c", "adj")

    def __init__(self, n: int, c: int, adj):
        self.n, self.c = n, c
        self.adj = tuple(tuple(row) for row in adj)

    # construction ------------------------------------------------------------

    @classmethod
    def from_matrix(cls, matrix, c: int = 1) -> Coloring:
        """Build from a symmetric n x n array of colors (diagonal ignored)."""
        m = np.asarray(matrix)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("color matrix must be square")
        off = ~np.eye(n, dtype=bool)
        if not np.array_equal(m[off], m.T[off]):
            raise ValueError("color matrix must be symmetric")
        if n > 1 and (m[off].min() < 0 or m[off].max() > c):
            raise ValueError(f"colors must lie in 0..{c}")
        adj = []
        for color in range(c + 1):
            hit = (m == color) & off
            packed = np.packbits(hit, axis=1, bitorder="little")
            adj.append([int.from_bytes(row.tobytes(), "little") for row in packed])
        return cls(n, c, adj)

    @classmethod
    def from_edges(cls, n: int, c: int, edges: Iterable[tuple[int, int, int]]) -> Coloring:
        m = np.full((n, n), -1, dtype=np.int16)
        for u, v, col in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge ({u}, {v})")
            if m[u, v] != -1:
                raise ValueError(f"edge ({u}, {v}) listed twice")
            m[u, v] = m[v, u] = col
        iu = np.triu_indices(n, 1)
        if (m[iu] == -1).any():
            raise ValueError("every pair must receive a color")
        return cls.from_matrix(m, c)

    @classmethod
    def monochromatic(cls, n: int, color: int = RED, c: int = 1) -> Coloring:
        m = np.full((n, n), color, dtype=np.int16)
        return cls.from_matrix(m, c)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, weights=None, c: int = 1) -> Coloring:
        """Independent edge colors with probabilities ``weights`` (red first)."""
        weights = np.full(c + 1, 1 / (c + 1)) if weights is None else np.asarray(weights, dtype=float)
        upper = rng.choice(c + 1, size=(n, n), p=weights / weights.sum())
        m = np.triu(upper, 1)
        return cls.from_matrix(m + m.T, c)

    # queries -------------------------------------------------------------------

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    def color(self, u: int, v: int) -> int:
        if u == v:
            raise ValueError("no self-loops")
        for col in range(self.c + 1):
            if self.adj[col][u] >> v & 1:
                return col
        raise AssertionError("pair without a color")

    def neighbors(self, v: int, color: int = RED) -> int:
        return self.adj[color][v]

    def edges_between(self, X: int, Y: int, color: int = RED) -> int:
        """Number of ``color`` edges with one end in X and the other in Y."""
        row = self.adj[color]
        if X.bit_count() > Y.bit_count():
            X, Y = Y, X
        return sum((row[v] & Y).bit_count() for v in bits(X))

    def matrix(self) -> np.ndarray:
        m = np.full((self.n, self.n), -1, dtype=np.int16)
        for col in range(self.c + 1):
            for v in range(self.n):
                for u in bits(self.adj[col][v]):
                    m[v, u] = col
        return m

    # text format -----------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {self.c}"]
        for u in range(self.n):
            for v in range(u + 1, self.n):
                lines.append(f"{u} {v} {self.color(u, v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Coloring:
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or len(rows[0]) != 2:
            raise ValueError("first line must be 'n c'")
        n, c = int(rows[0][0]), int(rows[0][1])
        edges = []
        for r in rows[1:]:
            if len(r) != 3:
                raise ValueError(f"edge line must be 'u v color', got {' '.join(r)!r}")
            edges.append(tuple(int(t) for t in r))
        return cls.from_edges(n, c, edges)

    def __eq__(self, other):
        return isinstance(other, Coloring) and (self.n, self.c, self.adj) == (other.n, other.c, other.adj)

    def __hash__(self):
        return hash((self.n, self.c, self.adj))


@dataclass(frozen=True)
class Candidate:
    """Disjoint nonempty vertex sets X, Y of a coloring, stored as bitsets."""

    coloring: Coloring
    X: int
    Y: int

    def __post_init__(self):
        if not self.X or not self.Y:
            raise ValueError("candidate sets must be nonempty")
        if self.X & self.Y:
            raise ValueError("candidate sets must be disjoint")
        if (self.X | self.Y) >> self.coloring.n:
            raise ValueError("candidate vertex out of range")

    @classmethod
    def of(cls, coloring: Coloring, xs: Iterable[int], ys: Iterable[int]) -> Candidate:
        return cls(coloring, to_mask(xs), to_mask(ys))

    @property
    def size_x(self) -> int:
        return self.X.bit_count()

    @property
    def size_y(self) -> int:
        return self.Y.bit_count()

    def red_edges(self) -> int:
        return self.coloring.edges_between(self.X, self.Y)

    def density(self) -> Fraction:
        return Fraction(self.red_edges(), self.size_x * self.size_y)


KINDS = ("RedClique", "MonoClique", "BlueBook")


@dataclass(frozen=True)
class Witness:
    """A red clique, a clique in color ``color`` (on ``side`` X or Y), or a
    book (S, T) in ``color``."""

    kind: str
    vertices: tuple = ()
    color: int = RED
    side: str | None = None
    book: tuple | None = None  # (S, T) as sorted tuples
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")

    @classmethod
    def red_clique(cls, vertices, **meta) -> Witness:
        return cls("RedClique", tuple(sorted(vertices)), RED, meta=meta)

    @classmethod
    def mono_clique(cls, color: int, vertices, side=None, **meta) -> Witness:
        return cls("MonoClique", tuple(sorted(vertices)), color, side, meta=meta)

    @classmethod
    def blue_book(cls, S, T, color: int = 1, **meta) -> Witness:
        return cls("BlueBook", (), color, None, (tuple(sorted(S)), tuple(sorted(T))), meta=meta)

    @property
    def size(self) -> int:
        return len(self.vertices) if self.kind != "BlueBook" else len(self.book[0])

    def with_vertex(self, v: int) -> Witness:
        return Witness(self.kind, tuple(sorted(self.vertices + (v,))), self.color, self.side, self.book, self.meta)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "color": self.color}
        if self.kind == "BlueBook":
            out["book"] = {"S": list(self.book[0]), "T": list(self.book[1])}
        else:
            out["vertices"] = list(self.vertices)
        if self.side is not None:
            out["side"] = self.side
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> Witness:
        if data["kind"] == "BlueBook":
            return cls.blue_book(data["book"]["S"], data["book"]["T"], data.get("color", 1))
        return cls(data["kind"], tuple(data["vertices"]), data.get("color", RED), data.get("side"))


def witness_validate(coloring: Coloring, w: Witness, cand: Candidate | None = None) -> bool:
    """True iff every edge the witness asserts has the asserted color.

    With a candidate, a clique tagged with a side must also lie in that side
    (and a red clique in X union Y).
    """
    n = coloring.n
    if w.kind == "BlueBook":
        S, T = w.book
        if not S or set(S) & set(T) or len(set(S)) != len(S) or len(set(T)) != len(T):
            return False
        if any(not 0 <= v < n for v in S + T) or not 1 <= w.color <= coloring.c:
            return False
        row = coloring.adj[w.color]
        t_mask = to_mask(T)
        s_mask = to_mask(S)
        return all((row[s] | (1 << s)) & (s_mask | t_mask) == (s_mask | t_mask) for s in S)
    vs = w.vertices
    if not vs or len(set(vs)) != len(vs) or any(not 0 <= v < n for v in vs):
        return False
    if w.kind == "RedClique" and w.color != RED:
        return False
    if w.kind == "MonoClique" and not 0 <= w.color <= coloring.c:
        return False
    row = coloring.adj[w.color]
    mask = to_mask(vs)
    if any((row[v] | (1 << v)) & mask != mask for v in vs):
        return False
    if cand is not None:
        allowed = {"X": cand.X, "Y": cand.Y, None: cand.X | cand.Y}[w.side]
        if mask & ~allowed:
            return False
    return True
