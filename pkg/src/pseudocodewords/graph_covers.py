"""Finite graph covers of Tanner graphs and their codewords.

An M-cover is stored as one permutation of ``range(M)`` per Tanner edge
(j, i): copy ``m`` of check j is joined to copy ``perm[(j, i)][m]`` of bit i.
Cover words are ``n x M`` bit arrays; flattened they follow (i, m) row-major
order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np

from .code_model import (
    LimitExceeded,
    ParityCheckMatrix,
    as_matrix,
    even_weight_words,
    gf2_nullspace,
    spanning_tree_edges,
)
from .fundamental_polytope import build_polytope
from .limits import DEFAULT_LIMITS, Limits
from .rational_geometry import HPolyhedron, RatVec, contains, lp_minimize, to_ratvec


class DecompositionError(RuntimeError):
    """Raised when a local convex decomposition fails; indicates a bug."""


@dataclass(frozen=True)
class MCover:
    H: ParityCheckMatrix
    M: int
    perms: dict

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("cover degree must be >= 1")
        edges = set(self.H.edges)
        if set(self.perms) != edges:
            raise ValueError("permutations must be given for exactly the Tanner edges")
        ident = tuple(range(self.M))
        for e, p in self.perms.items():
            if tuple(sorted(p)) != ident:
                raise ValueError(f"edge {e}: not a permutation of range({self.M})")
        object.__setattr__(self, "perms", {e: tuple(int(v) for v in p) for e, p in self.perms.items()})

    @classmethod
    def identity(cls, H, M: int) -> "MCover":
        H = as_matrix(H)
        return cls(H, M, {e: tuple(range(M)) for e in H.edges})

    def to_json(self) -> dict:
        return {"M": self.M,
                "perms": {f"{j + 1},{i + 1}": [v + 1 for v in p] for (j, i), p in sorted(self.perms.items())}}

    @classmethod
    def from_json(cls, H, data: dict) -> "MCover":
        H = as_matrix(H)
        perms = {}
        for key, p in data["perms"].items():
            j, i = (int(t) - 1 for t in key.split(","))
            perms[(j, i)] = tuple(v - 1 for v in p)
        return cls(H, int(data["M"]), perms)


@dataclass(frozen=True)
class CoverCodeword:
    cover: MCover
    bits: np.ndarray  # shape (n, M)

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8).reshape(self.cover.H.n, self.cover.M)
        object.__setattr__(self, "bits", b)

    def flat(self) -> np.ndarray:
        return self.bits.reshape(-1)

    def is_valid(self) -> bool:
        return is_cover_codeword(self.cover, self.bits)

    def counts(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.bits.sum(axis=1))


def lift_parity_check(cover: MCover) -> ParityCheckMatrix:
    """Row (j, m) has a one in column (i, perm[(j, i)][m]) for every i in I_j."""
    H, M = cover.H, cover.M
    out = np.zeros((H.m * M, H.n * M), dtype=np.uint8)
    for (j, i), p in cover.perms.items():
        for m in range(M):
            out[j * M + m, i * M + p[m]] = 1
    return ParityCheckMatrix(out)


def is_cover_codeword(cover: MCover, bits) -> bool:
    H, M = cover.H, cover.M
    bits = np.asarray(bits, dtype=np.uint8).reshape(H.n, M)
    for j, row in enumerate(H.checks):
        for m in range(M):
            if sum(int(bits[i, cover.perms[(j, i)][m]]) for i in row) % 2:
                return False
    return True


def scaled_pseudocodeword(x: CoverCodeword) -> RatVec:
    if not x.is_valid():
        raise ValueError("not a codeword of its cover")
    return tuple(Fraction(c, x.cover.M) for c in x.counts())


def lift_vector(v: Sequence[int], M: int) -> np.ndarray:
    """Repeat every entry ``M`` times, (i, m) row-major."""
    return np.repeat(np.asarray(v, dtype=np.uint8), M)


# ---------------------------------------------------------------- realization

def _local_polytope(k: int) -> tuple[list[tuple[int, ...]], list[int]]:
    A, b = [], []
    for i in range(k):
        A.append(tuple(-int(t == i) for t in range(k)))
        b.append(0)
        A.append(tuple(int(t == i) for t in range(k)))
        b.append(1)
    for size in range(1, k + 1, 2):
        for S in itertools.combinations(range(k), size):
            A.append(tuple(1 if t in S else -1 for t in range(k)))
            b.append(size - 1)
    return A, b


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def _decompose_by_lp(p: RatVec, words: list[tuple[int, ...]]) -> dict[tuple[int, ...], Fraction]:
    # a vertex of {alpha >= 0, sum alpha = 1, sum alpha_w w = p} has <= k+1 nonzeros
    L, k = len(words), len(p)
    den = math.lcm(*(x.denominator for x in p))
    A = [tuple(-int(t == s) for t in range(L)) for s in range(L)]
    E = [tuple(den for _ in range(L))] + [tuple(den * w[i] for w in words) for i in range(k)]
    f = [den] + [int(p[i] * den) for i in range(k)]
    _, alpha, _ = lp_minimize(HPolyhedron(L, A, [0] * L, E, f), [0] * L)
    return {w: a for w, a in zip(words, alpha) if a}


def decompose_local(p: Sequence) -> dict[tuple[int, ...], Fraction]:
    """Write ``p`` as a convex combination of even-weight words.

    Greedy vertex stripping: within the smallest face containing the current
    point, pick the word allowing the longest step away from it, record the
    corresponding weight and continue from the exit point on a lower face.
    """
    p = to_ratvec(p)
    k = len(p)
    words = even_weight_words(k)
    A, b = _local_polytope(k)
    if not all(_dot(a, p) <= bb for a, bb in zip(A, b)):
        raise ValueError("point outside the local parity polytope")
    out: dict[tuple[int, ...], Fraction] = {}
    q, rest = p, Fraction(1)
    for _ in range(k + 2):
        if rest == 0:
            break
        if all(v.denominator == 1 for v in q) and tuple(int(v) for v in q) in set(words):
            w = tuple(int(v) for v in q)
            out[w] = out.get(w, 0) + rest
            rest = Fraction(0)
            break
        tight = [r for r in range(len(A)) if _dot(A[r], q) == b[r]]
        best = None
        for w in words:
            if any(_dot(A[r], w) != b[r] for r in tight):
                continue
            d = [qi - wi for qi, wi in zip(q, w)]
            steps = [(b[r] - _dot(A[r], q)) / _dot(A[r], d) for r in range(len(A)) if _dot(A[r], d) > 0]
            s = min(steps)
            theta = s / (1 + s)
            if best is None or theta > best[0]:
                best = (theta, w, s, d)
        if best is None or best[0] == 0:
            return _decompose_by_lp(p, words)
        theta, w, s, d = best
        out[w] = out.get(w, 0) + rest * theta
        rest *= 1 - theta
        q = tuple(qi + s * di for qi, di in zip(q, d))
    if rest != 0:
        return _decompose_by_lp(p, words)
    return out


def realize_cover(H, nu: Sequence, limits: Limits = DEFAULT_LIMITS) -> tuple[int, MCover, CoverCodeword]:
    """Construct an M-cover and a cover codeword whose scaled counts equal ``nu``."""
    H = as_matrix(H)
    nu = to_ratvec(nu)
    if len(nu) != H.n:
        raise ValueError("length mismatch")
    if not contains(build_polytope(H, limits).poly, nu):
        raise ValueError("point is not in the fundamental polytope")
    alphas = [decompose_local([nu[i] for i in row]) for row in H.checks]
    dens = [x.denominator for x in nu] + [a.denominator for al in alphas for a in al.values()]
    M = math.lcm(*dens)
    bits = np.zeros((H.n, M), dtype=np.uint8)
    for i in range(H.n):
        bits[i, : int(M * nu[i])] = 1
    perms: dict[tuple[int, int], list[int]] = {}
    for j, row in enumerate(H.checks):
        for i in row:
            perms[(j, i)] = [-1] * M
        mj = 0
        ones = {i: 0 for i in row}
        zeros = {i: int(M * nu[i]) for i in row}
        for word in sorted(alphas[j]):
            for _ in range(int(M * alphas[j][word])):
                for pos, i in enumerate(row):
                    if word[pos]:
                        perms[(j, i)][mj] = ones[i]
                        ones[i] += 1
                    else:
                        perms[(j, i)][mj] = zeros[i]
                        zeros[i] += 1
                mj += 1
        if mj != M:
            raise DecompositionError(f"check {j}: decomposition weights do not sum to one")
    cover = MCover(H, M, {e: tuple(p) for e, p in perms.items()})
    x = CoverCodeword(cover, bits)
    if not x.is_valid() or scaled_pseudocodeword(x) != nu:
        raise DecompositionError("round-trip failed")
    return M, cover, x


# ---------------------------------------------------------------- graph-cover decoding oracle

def _cover_pseudocodewords(H: ParityCheckMatrix, M: int, limits: Limits) -> set[RatVec]:
    tree = spanning_tree_edges(H)
    free = [e for e in H.edges if e not in tree]
    perms = list(itertools.permutations(range(M)))
    n_covers = len(perms) ** len(free)
    if n_covers > limits.gcd_budget:
        raise LimitExceeded(f"{n_covers} covers of degree {M} exceed budget {limits.gcd_budget}")
    ident = tuple(range(M))
    found: set[RatVec] = set()
    for choice in itertools.product(perms, repeat=len(free)):
        assign = {e: ident for e in tree}
        assign.update(zip(free, choice))
        Ht = lift_parity_check(MCover(H, M, assign))
        basis = gf2_nullspace(Ht.entries)
        k = basis.shape[0]
        if 2 ** k * n_covers > limits.gcd_budget * 64:
            raise LimitExceeded("cover code too large for exhaustive enumeration")
        coeffs = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int64).reshape(2 ** k, k)
        words = (coeffs @ basis.astype(np.int64)) % 2
        counts = words.reshape(len(words), H.n, M).sum(axis=2)
        for c in {tuple(r) for r in counts.tolist()}:
            found.add(tuple(Fraction(v, M) for v in c))
    return found


@lru_cache(maxsize=32)
def _gcd_set_cached(H: ParityCheckMatrix, M_max: int, limits: Limits) -> tuple[RatVec, ...]:
    found: set[RatVec] = set()
    for M in range(1, M_max + 1):
        found |= _cover_pseudocodewords(H, M, limits)
    return tuple(sorted(found))


def gcd_pseudocodewords(H, M_max: int, limits: Limits = DEFAULT_LIMITS) -> tuple[RatVec, ...]:
    """All scaled pseudo-codewords realized by covers of degree at most ``M_max``."""
    return _gcd_set_cached(as_matrix(H), M_max, limits)


def brute_force_gcd(H, llr: Sequence, M_max: int, limits: Limits = DEFAULT_LIMITS,
                    tie_tol: float = 1e-9) -> tuple[RatVec, object]:
    """Minimize <w, llr> over every codeword of every cover of degree <= M_max.

    Ties go to the lexicographically smallest pseudo-codeword.
    """
    H = as_matrix(H)
    if len(llr) != H.n:
        raise ValueError("length mismatch")
    cands = gcd_pseudocodewords(H, M_max, limits)
    exact = all(isinstance(v, Rational) for v in llr)
    if exact:
        lam = [Fraction(v) for v in llr]
        scores = [sum(w * l for w, l in zip(om, lam)) for om in cands]
        best = min(scores)
        winners = [om for om, s in zip(cands, scores) if s == best]
        return min(winners), best
    lam = np.asarray(llr, dtype=float)
    W = np.array([[float(v) for v in om] for om in cands])
    scores = W @ lam
    best = scores.min()
    tol = tie_tol * max(1.0, float(np.abs(lam).max()))
    winners = [om for om, s in zip(cands, scores) if s <= best + tol]
    om = min(winners)
    return om, float(sum(float(w) * l for w, l in zip(om, lam)))
