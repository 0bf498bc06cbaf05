"""Fundamental polytope and fundamental cone of a parity-check matrix."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code_model import (
    LimitExceeded,
    ParityCheckMatrix,
    as_matrix,
    enumerate_codewords,
    girth,
    redundant_expansion,
)
from .limits import DEFAULT_LIMITS, Limits
from .rational_geometry import (
    HPolyhedron,
    RatVec,
    contains,
    enumerate_extreme_rays,
    enumerate_vertices,
    fmt_rat,
    to_ratvec,
)


@dataclass(frozen=True)
class FundamentalPolytope:
    H: ParityCheckMatrix
    poly: HPolyhedron

    def __contains__(self, x) -> bool:
        return contains(self.poly, x)


@dataclass(frozen=True)
class FundamentalCone:
    H: ParityCheckMatrix
    poly: HPolyhedron

    def __contains__(self, x) -> bool:
        return contains(self.poly, x)


@dataclass(frozen=True)
class PseudoCodeword:
    coords: RatVec
    kind: str  # "scaled" | "unscaled" | "ray"

    def __post_init__(self):
        if self.kind not in ("scaled", "unscaled", "ray"):
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "coords", to_ratvec(self.coords))
        if any(c < 0 for c in self.coords):
            raise ValueError("pseudo-codewords are nonnegative")


def _odd_subsets(support: Sequence[int]):
    for k in range(1, len(support) + 1, 2):
        yield from itertools.combinations(support, k)


def build_polytope(H, limits: Limits = DEFAULT_LIMITS) -> FundamentalPolytope:
    """Box constraints plus one inequality per check and odd subset of its support.

    For the subset S of check j the row reads
    sum_{S} w_i - sum_{I_j \\ S} w_i <= |S| - 1.
    """
    H = as_matrix(H)
    n = H.n
    if max(H.row_weights()) > limits.max_row_weight:
        raise LimitExceeded(f"row weight {max(H.row_weights())} exceeds {limits.max_row_weight}")
    A, b = [], []
    for i in range(n):
        lo = [0] * n
        lo[i] = -1
        hi = [0] * n
        hi[i] = 1
        A += [lo, hi]
        b += [0, 1]
    for support in H.checks:
        for S in _odd_subsets(support):
            a = [0] * n
            for i in support:
                a[i] = 1 if i in S else -1
            A.append(a)
            b.append(len(S) - 1)
    return FundamentalPolytope(H, HPolyhedron(n, A, b))


def build_cone(H) -> FundamentalCone:
    """w >= 0 and, per check j and i' in I_j, w_i' <= sum of the other w_i in I_j."""
    H = as_matrix(H)
    n = H.n
    A = []
    for i in range(n):
        row = [0] * n
        row[i] = -1
        A.append(row)
    for support in H.checks:
        for ip in support:
            a = [0] * n
            for i in support:
                a[i] = 1 if i == ip else -1
            A.append(a)
    return FundamentalCone(H, HPolyhedron(n, A, [0] * len(A)))


def polytope_vertices(H, limits: Limits = DEFAULT_LIMITS) -> list[RatVec]:
    return enumerate_vertices(build_polytope(H, limits).poly, limits)


def minimal_pseudocodewords(H, limits: Limits = DEFAULT_LIMITS) -> list[PseudoCodeword]:
    """Extreme rays of the fundamental cone as coprime integer vectors, sorted."""
    rays = enumerate_extreme_rays(build_cone(H).poly, limits)
    return [PseudoCodeword(r, "ray") for r in rays]


def is_unscaled_pseudocodeword(H, z: Sequence[int]) -> bool:
    """Integer point of the cone whose parity pattern is a codeword.

    Cone membership alone is not sufficient: (1, 1, 1) lies in the cone of
    [[1,1,0],[1,1,1],[0,1,1]] but no cover codeword has these counts since the
    middle check would see an odd total.
    """
    H = as_matrix(H)
    if any(int(v) != v for v in z):
        raise ValueError("unscaled pseudo-codewords are integer vectors")
    if any(v < 0 for v in z):
        raise ValueError("negative entries")
    z = [int(v) for v in z]
    if len(z) != H.n:
        raise ValueError("length mismatch")
    return contains(build_cone(H).poly, z) and H.is_codeword(np.array(z) % 2)


def tree_polytope_check(H, limits: Limits = DEFAULT_LIMITS) -> bool:
    """For a cycle-free Tanner graph the polytope vertices are exactly the codewords."""
    H = as_matrix(H)
    if girth(H) != float("inf"):
        raise ValueError("Tanner graph has a cycle")
    verts = set(polytope_vertices(H, limits))
    words = {tuple(Fraction(int(v)) for v in w) for w in enumerate_codewords(H, limits)}
    return verts == words


def redundancy_invariance_check(H, r: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    H = as_matrix(H)
    H2 = redundant_expansion(H, r, limits)
    return set(polytope_vertices(H, limits)) == set(polytope_vertices(H2, limits))


# ---------------------------------------------------------------- cone formulations

def cone_membership_forms(H, w: Sequence) -> dict[str, bool]:
    """Five equivalent descriptions of the fundamental cone, evaluated independently."""
    H = as_matrix(H)
    w = to_ratvec(w)
    nonneg = all(v >= 0 for v in w)
    out = {"h_representation": contains(build_cone(H).poly, w)}
    # per-check: at most one coordinate may exceed the others' sum
    out["sum_of_others"] = nonneg and all(
        sum(w[i] for i in c if i != ip) >= w[ip] for c in H.checks for ip in c)
    # sign-pattern rows: -w_i' + sum_{i != i'} w_i >= 0
    sign_rows = []
    for c in H.checks:
        for ip in c:
            sign_rows.append(sum((-w[i] if i == ip else w[i]) for i in c))
    out["sign_pattern"] = nonneg and all(v >= 0 for v in sign_rows)
    # matrix form (J - 2I) applied to the restriction, J the all-ones matrix
    mat = True
    for c in H.checks:
        k = len(c)
        M = [[1 - 2 * (r == s) for s in range(k)] for r in range(k)]
        sub = [w[i] for i in c]
        mat &= all(sum(M[r][s] * sub[s] for s in range(k)) >= 0 for r in range(k))
    out["ones_minus_twice_identity"] = nonneg and mat
    out["norm_ratio"] = nonneg and all(
        sum(w[i] for i in c) >= 2 * max(w[i] for i in c) for c in H.checks)
    return out


# ---------------------------------------------------------------- export

def polytope_json(P: FundamentalPolytope | FundamentalCone | HPolyhedron) -> dict:
    poly = P.poly if hasattr(P, "poly") else P
    return poly.to_json()


def vector_json(v: Sequence) -> list[str]:
    return [fmt_rat(Fraction(x)) for x in v]
