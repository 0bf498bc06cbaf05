"""Pseudo-weights of nonnegative vectors.

All functions are exact on ``Fraction``/``int`` input and fall back to float
arithmetic otherwise. The zero vector has weight 0 under every measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fundamental_polytope import build_polytope, minimal_pseudocodewords, polytope_vertices
from .limits import DEFAULT_LIMITS, Limits


def _check(w: Sequence) -> list:
    w = list(w)
    if any(v < 0 for v in w):
        raise ValueError("pseudo-weights need nonnegative vectors")
    return w


def _ratio(num, den):
    if isinstance(num, float) or isinstance(den, float):
        return num / den
    return Fraction(num, den) if isinstance(num, int) and isinstance(den, int) else num / den


def wp_awgnc(w: Sequence):
    w = _check(w)
    l1 = sum(w)
    l2sq = sum(v * v for v in w)
    if l2sq == 0:
        return 0
    return _ratio(l1 * l1, l2sq)


def wp_bsc(w: Sequence):
    """Twice the point where the sorted cumulative profile reaches half its total."""
    w = sorted(_check(w), reverse=True)
    total = sum(w)
    if total == 0:
        return 0
    half = _ratio(total, 2)
    acc = 0
    for k, v in enumerate(w):
        if acc + v >= half:
            # F is linear with slope v on [k, k+1]
            return 2 * (k + _ratio(half - acc, v))
        acc += v
    raise AssertionError("unreachable: half of a positive total is always crossed")


def wp_bec(w: Sequence) -> int:
    return sum(1 for v in _check(w) if v != 0)


def w_frac(w: Sequence):
    return sum(_check(w))


def w_maxfrac(w: Sequence):
    w = _check(w)
    top = max(w, default=0)
    if top == 0:
        return 0
    return _ratio(sum(w), top)


@dataclass(frozen=True)
class WeightReport:
    w: tuple
    awgnc: object
    bsc: object
    bec: int
    frac: object
    maxfrac: object

    @classmethod
    def of(cls, w: Sequence) -> "WeightReport":
        w = tuple(w)
        return cls(w, wp_awgnc(w), wp_bsc(w), wp_bec(w), w_frac(w), w_maxfrac(w))

    def as_dict(self) -> dict:
        return {"awgnc": self.awgnc, "bsc": self.bsc, "bec": self.bec,
                "frac": self.frac, "maxfrac": self.maxfrac}


SCALE_INVARIANT = ("awgnc", "bsc", "bec", "maxfrac")


@dataclass(frozen=True)
class MinimumWeights:
    awgnc: object
    bsc: object
    bec: object
    frac: object
    maxfrac: object
    argmin: dict

    def as_dict(self) -> dict:
        return {"awgnc": self.awgnc, "bsc": self.bsc, "bec": self.bec,
                "frac": self.frac, "maxfrac": self.maxfrac}


def _minima(vectors) -> tuple[dict, dict]:
    best: dict = {}
    arg: dict = {}
    for v in vectors:
        rep = WeightReport.of(v).as_dict()
        for key, val in rep.items():
            if key not in best or val < best[key]:
                best[key] = val
                arg[key] = tuple(v)
    return best, arg


def minimum_weights(H, limits: Limits = DEFAULT_LIMITS, cross_check: bool = True) -> MinimumWeights:
    """Minima over the nonzero polytope vertices.

    The scale-invariant minima are compared against those over the cone's
    extreme rays; a mismatch raises ``AssertionError``.
    """
    verts = [v for v in polytope_vertices(H, limits) if any(v)]
    if not verts:
        inf = float("inf")
        return MinimumWeights(inf, inf, inf, inf, inf, {})
    best, arg = _minima(verts)
    if cross_check:
        rays = [r.coords for r in minimal_pseudocodewords(H, limits)]
        rbest, _ = _minima(rays)
        for key in SCALE_INVARIANT:
            if rbest[key] != best[key]:
                raise AssertionError(f"{key}: vertex minimum {best[key]} != ray minimum {rbest[key]}")
    return MinimumWeights(best["awgnc"], best["bsc"], best["bec"], best["frac"], best["maxfrac"], arg)
