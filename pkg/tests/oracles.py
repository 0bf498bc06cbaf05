"""Independent reference computations used to freeze expected values.

Nothing here imports the package under test. Polytope and cone questions are
answered with floating-point LPs (HiGHS) over formulations that differ from
the package's (local-code convex combinations instead of odd-subset
inequalities), then snapped to small-denominator rationals.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.optimize import linprog


def supports(H):
    H = np.asarray(H)
    return [list(np.flatnonzero(row)) for row in H]


def codewords(H):
    H = np.asarray(H)
    n = H.shape[1]
    return sorted(x for x in itertools.product((0, 1), repeat=n) if not (H @ np.array(x) % 2).any())


def even_words(k):
    return [w for w in itertools.product((0, 1), repeat=k) if sum(w) % 2 == 0]


def tanner(H):
    H = np.asarray(H)
    G = nx.Graph()
    G.add_nodes_from(("x", i) for i in range(H.shape[1]))
    G.add_nodes_from(("c", j) for j in range(H.shape[0]))
    G.add_edges_from((("c", j), ("x", i)) for j, i in zip(*np.nonzero(H)))
    return G


def girth(H):
    g = nx.girth(tanner(H))
    return g


def diameter(H):
    G = tanner(H)
    return nx.diameter(G) if nx.is_connected(G) else float("inf")


def row_span_sums(H, r):
    H = np.asarray(H)
    rows = set()
    for k in range(1, r + 1):
        for combo in itertools.combinations(range(H.shape[0]), k):
            s = tuple(int(v) for v in H[list(combo)].sum(axis=0) % 2)
            if any(s):
                rows.add(s)
    return rows


def _snap(x, den=60):
    return tuple(Fraction(float(v)).limit_denominator(den) for v in x)


def _lifted(H):
    """Equality system for w = sum_j-local convex combinations (one block per check)."""
    H = np.asarray(H)
    n = H.shape[1]
    blocks = []
    for I in supports(H):
        blocks.append((I, even_words(len(I))))
    nvar = n + sum(len(W) for _, W in blocks)
    A, b = [], []
    off = n
    for I, W in blocks:
        row = np.zeros(nvar)
        row[off:off + len(W)] = 1
        A.append(row)
        b.append(1.0)
        for t, i in enumerate(I):
            row = np.zeros(nvar)
            row[i] = -1
            for k, w in enumerate(W):
                row[off + k] = w[t]
            A.append(row)
            b.append(0.0)
        off += len(W)
    return np.array(A), np.array(b), nvar


def lp_value(H, c):
    """min <c, w> over the intersection of the local-code hulls (float)."""
    A, b, nvar = _lifted(H)
    n = np.asarray(H).shape[1]
    cost = np.zeros(nvar)
    cost[:n] = c
    res = linprog(cost, A_eq=A, b_eq=b, bounds=[(0, 1)] * n + [(0, None)] * (nvar - n), method="highs")
    assert res.status == 0, res.message
    return res.fun, res.x[:n]


def polytope_vertices(H, trials=3000, seed=1):
    """Vertices found as LP optimizers over random directions, snapped to rationals."""
    n = np.asarray(H).shape[1]
    rng = np.random.default_rng(seed)
    found = set()
    for _ in range(trials):
        _, x = lp_value(H, rng.normal(size=n))
        found.add(_snap(x))
    return sorted(found)


def cone_rays(H, trials=3000, seed=2):
    """Extreme rays as vertices of the slice {w in cone, sum w = 1}, scaled to coprime integers."""
    H = np.asarray(H)
    n = H.shape[1]
    A = []
    for I in supports(H):
        for i in I:
            row = np.zeros(n)
            row[i] = 1
            for k in I:
                if k != i:
                    row[k] = -1
            A.append(row)
    A = np.array(A) if A else np.zeros((0, n))
    rng = np.random.default_rng(seed)
    found = set()
    for _ in range(trials):
        res = linprog(rng.normal(size=n), A_ub=A, b_ub=np.zeros(len(A)), A_eq=np.ones((1, n)), b_eq=[1.0],
                      bounds=[(0, None)] * n, method="highs")
        assert res.status == 0
        v = _snap(res.x, 200)
        den = np.lcm.reduce([f.denominator for f in v])
        ints = [int(f * den) for f in v]
        g = np.gcd.reduce(ints)
        found.add(tuple(k // g for k in ints))
    return sorted(found)


def in_cone_sum_of_others(H, w):
    w = [Fraction(v) for v in w]
    return all(v >= 0 for v in w) and all(
        w[i] <= sum(w[k] for k in I if k != i) for I in supports(H) for i in I)


def is_stopping_set(H, S):
    H = np.asarray(H)
    S = set(S)
    for row in H:
        hit = sum(1 for i in np.flatnonzero(row) if i in S)
        if hit == 1:
            return False
    return True


def stopping_sets(H):
    n = np.asarray(H).shape[1]
    return [set(S) for k in range(n + 1) for S in itertools.combinations(range(n), k) if is_stopping_set(H, S)]


def bsc_weight(w):
    """Twice the median crossing, by bisection on the piecewise-linear cumulative profile."""
    w = sorted((float(v) for v in w), reverse=True)
    total = sum(w)
    if total == 0:
        return 0.0

    def F(x):
        k = int(np.floor(x))
        return sum(w[:k]) + (x - k) * (w[k] if k < len(w) else 0.0)

    lo, hi = 0.0, float(len(w))
    for _ in range(200):
        mid = (lo + hi) / 2
        if F(mid) < total / 2:
            lo = mid
        else:
            hi = mid
    return 2 * hi


def map_bitwise_tree(H, llr):
    """Bitwise MAP by summing over codewords (exact for any graph; SPA matches it on trees)."""
    words = np.array(codewords(H))
    lam = np.asarray(llr, dtype=float)
    logp = -(words * lam).sum(axis=1)
    p = np.exp(logp - logp.max())
    p1 = (p[:, None] * words).sum(axis=0)
    p0 = p.sum() - p1
    return np.log(p0) - np.log(p1)


def in_local_hulls(H, w, tol=1e-9):
    """Feasibility of w as a convex combination of local words at every check (float)."""
    A, b, nvar = _lifted(H)
    n = np.asarray(H).shape[1]
    w = np.array([float(v) for v in w])
    bounds = [(v, v) for v in w] + [(0, None)] * (nvar - n)
    res = linprog(np.zeros(nvar), A_eq=A, b_eq=b, bounds=bounds, method="highs")
    return res.status == 0
