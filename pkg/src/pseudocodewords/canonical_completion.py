"""Breadth-first tiers, canonical completion and the sub-linear weight bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .code_model import TannerGraph, _graph, as_matrix
from .pseudoweights import wp_awgnc


@dataclass(frozen=True)
class TierDecomposition:
    root: int
    # tier per flat node id (bits 0..n-1, checks n..); None when unreachable
    tier: tuple
    n: int

    @property
    def unreachable(self) -> list[int]:
        return [v for v, t in enumerate(self.tier) if t is None]

    @property
    def connected(self) -> bool:
        return not self.unreachable

    def counts(self) -> list[int]:
        """Number of nodes per tier, index = tier."""
        top = max(t for t in self.tier if t is not None)
        out = [0] * (top + 1)
        for t in self.tier:
            if t is not None:
                out[t] += 1
        return out

    def bits_at(self, t: int) -> list[int]:
        return [i for i in range(self.n) if self.tier[i] == t]


def bfs_tiers(T, root: int) -> TierDecomposition:
    G: TannerGraph = _graph(T)
    if not 0 <= root < G.H.n:
        raise ValueError("root must be a variable node index")
    dist = G.bfs_distances(root)
    return TierDecomposition(root, tuple(None if d == math.inf else int(d) for d in dist), G.H.n)


def _uniform_row_weight(H) -> int:
    w = set(H.row_weights())
    if len(w) != 1:
        raise ValueError(f"canonical completion needs uniform row weight, got {sorted(w)}")
    (wr,) = w
    if wr < 2:
        raise ValueError("row weight must be at least 2")
    return wr


def canonical_completion(H, root: int) -> tuple[Fraction, ...]:
    """Bit at tier 2t gets 1/(w_row - 1)^t; bits outside the root's component get 0."""
    H = as_matrix(H)
    wr = _uniform_row_weight(H)
    tiers = bfs_tiers(H, root)
    out = []
    for i in range(H.n):
        t = tiers.tier[i]
        out.append(Fraction(0) if t is None else Fraction(1, (wr - 1) ** (t // 2)))
    return tuple(out)


@dataclass(frozen=True)
class CompletionWeight:
    root: int
    weight: Fraction
    l1: Fraction
    l2sq: Fraction
    tier_l1: Fraction
    tier_l2sq: Fraction
    profile: tuple[int, ...]  # bits per even tier


def completion_weight(H, root: int) -> CompletionWeight:
    H = as_matrix(H)
    wr = _uniform_row_weight(H)
    w = canonical_completion(H, root)
    tiers = bfs_tiers(H, root)
    counts = tiers.counts()
    profile = tuple(counts[0::2])
    tier_l1 = sum(Fraction(N, (wr - 1) ** t) for t, N in enumerate(profile))
    tier_l2 = sum(Fraction(N, (wr - 1) ** (2 * t)) for t, N in enumerate(profile))
    return CompletionWeight(root, wp_awgnc(w), sum(w), sum(v * v for v in w), tier_l1, tier_l2, profile)


def all_roots(H) -> list[CompletionWeight]:
    H = as_matrix(H)
    return [completion_weight(H, r) for r in range(H.n)]


def upper_bound(w_col: int, w_row: int, n: int) -> float:
    """beta' * n^beta bound on the minimum AWGNC pseudo-weight of (w_col, w_row)-regular codes."""
    if not 3 <= w_col < w_row:
        raise ValueError("need 3 <= w_col < w_row")
    bp, beta = bound_constants(w_col, w_row)
    return bp * n ** beta


def bound_constants(w_col: int, w_row: int) -> tuple[Fraction, float]:
    if not 3 <= w_col < w_row:
        raise ValueError("need 3 <= w_col < w_row")
    bp = Fraction(w_col * (w_col - 1), w_col - 2) ** 2
    beta = math.log((w_col - 1) ** 2) / math.log((w_col - 1) * (w_row - 1))
    assert beta < 1
    return bp, beta
