"""Colorings and candidates shared by the clique and acceptance suites."""

import itertools
from fractions import Fraction

import numpy as np

from ramsey_bounds.clique import Candidate, Coloring, excess_fp, lemma_threshold


def matrix_from_red(n, red_pairs):
    m = np.ones((n, n), dtype=np.int16)
    for u, v in red_pairs:
        m[u, v] = m[v, u] = 0
    return m


def all_two_colorings(n):
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Coloring.from_matrix(matrix_from_red(n, [e for i, e in enumerate(pairs) if code >> i & 1]))


def all_candidates(n):
    # each vertex goes to X, Y or neither
    for labels in itertools.product((0, 1, 2), repeat=n):
        X = sum(1 << v for v in range(n) if labels[v] == 1)
        Y = sum(1 << v for v in range(n) if labels[v] == 2)
        if X and Y:
            yield X, Y


def red_count(m, X, Y):
    return sum(1 for u in X for v in Y if m[u, v] == 0)


def inequality_oracle(m, X, Y, p):
    # direct set evaluation from the color matrix
    X, Y = sorted(X), sorted(Y)
    f = red_count(m, X, Y) - p * len(X) * len(Y)
    avg_lhs, convex_lhs = Fraction(0), Fraction(0)
    for v in X:
        S = [u for u in Y if m[v, u] == 0]
        if S:
            e = red_count(m, X, S)
            avg_lhs += e - p * len(X) * len(S)
            convex_lhs += Fraction(e, len(X))
    e = red_count(m, X, Y)
    return avg_lhs, p * len(X) * f, convex_lhs, Fraction(e * e, len(X) * len(Y))


def block_instance(rng, n, nx_, c, rxx, rxy, ryy):
    lab = np.arange(n) < nx_
    dens = np.where(lab[:, None] & lab[None, :], rxx, np.where(~lab[:, None] & ~lab[None, :], ryy, rxy))
    u = rng.random((n, n))
    other = rng.integers(1, c + 1, size=(n, n))
    m = np.triu(np.where(u < dens, 0, other), 1)
    m = m + m.T
    perm = rng.permutation(n)
    m = m[perm][:, perm]
    inv = np.argsort(perm)
    g = Coloring.from_matrix(m, c)
    X = sum(1 << int(inv[i]) for i in range(nx_))
    return g, X, g.all_vertices & ~X



def fuzz_instances(count, seed=2):
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        c = int(rng.choice([1, 1, 2]))
        n = int(rng.integers(24, 90))
        nx_ = int(rng.integers(4, n - 4))
        g, X, Y = block_instance(rng, n, nx_, c, rng.uniform(0, 1), rng.uniform(0.75, 1), rng.uniform(0, 1))
        k = int(rng.integers(2, 4))
        ell = tuple(int(v) for v in rng.integers(2, 4, size=c))
        t = tuple(int(v) for v in rng.integers(2, 4, size=c))
        p = Fraction(1, 2)
        x = Fraction(int(rng.choice([1, 1, 2])), int(rng.choice([5, 8, 10])))
        if not x < p:
            continue
        theta = (Fraction(1),) if c == 1 else (Fraction(1, 2), Fraction(1, 2))
        cand = Candidate(g, X, Y)
        if excess_fp(cand, p) < lemma_threshold(k, ell, t, p, x, theta):
            continue
        made += 1
        yield cand, p, x, k, ell, t, theta
