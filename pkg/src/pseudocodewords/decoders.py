"""ML, LP, sum-product and min-sum decoding.

Message passing runs on a batch of LLR vectors at once (shape ``(B, n)``),
which is what the decision-region sweeps use; the single-vector functions
are thin wrappers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np

from .code_model import ParityCheckMatrix, as_matrix, enumerate_codewords
from .fundamental_polytope import build_polytope
from .limits import DEFAULT_LIMITS, Limits
from .rational_geometry import (HPolyhedron, SizeLimit, contains, enumerate_vertices, lp_minimize,
                               solve_unique)

CLAMP = 30.0
WINDOW = 5


class DecodingContradiction(RuntimeError):
    """+inf and -inf met at a variable node."""


@dataclass
class DecodeResult:
    decision: tuple
    fractional: bool
    converged: bool
    iterations: int
    score: float | Fraction
    tie: bool
    contradiction: bool = False
    history: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        dec = [str(v) if isinstance(v, Fraction) else v for v in self.decision]
        score = str(self.score) if isinstance(self.score, Fraction) else float(self.score)
        return {"decision": dec, "fractional": self.fractional, "converged": self.converged,
                "iterations": self.iterations, "score": score, "tie": self.tie}


def _exact(llr: Sequence) -> bool:
    return all(isinstance(v, Rational) for v in llr)


def _score(x: Sequence, llr: Sequence):
    # positions with x_i = 0 never contribute, even when the LLR is infinite
    s = 0
    for xi, li in zip(x, llr):
        if xi:
            s = s + xi * li
    return s


def _tol(llr) -> float:
    finite = [abs(float(v)) for v in llr if math.isfinite(float(v))]
    return 1e-9 * max([1.0] + finite)


# ---------------------------------------------------------------- MLD

def _pinned(words: np.ndarray, llr: Sequence) -> np.ndarray:
    """Codewords agreeing with every infinite LLR (+inf forces 0, -inf forces 1)."""
    keep = np.ones(len(words), dtype=bool)
    for i, v in enumerate(llr):
        if isinstance(v, float) and math.isinf(v):
            keep &= words[:, i] == (1 if v < 0 else 0)
    if not keep.any():
        raise DecodingContradiction("no codeword agrees with the infinite LLRs")
    return words[keep]


def mld(H, llr: Sequence, limits: Limits = DEFAULT_LIMITS) -> DecodeResult:
    """Minimize <x, llr> over all codewords; ties go to the lexicographically smallest.

    Infinite LLRs restrict the search to codewords that agree with them.
    """
    H = as_matrix(H)
    llr = [float(v) if isinstance(v, np.floating) else v for v in llr]
    words = _pinned(enumerate_codewords(H, limits), llr)
    if _exact(llr):
        lam = [Fraction(v) for v in llr]
        scores = [_score(w, lam) for w in words.tolist()]
        best = min(scores)
        hits = [k for k, s in enumerate(scores) if s == best]
    else:
        # pinned coordinates are equal across the remaining words, rank on the finite ones
        lam = np.asarray(llr, dtype=float)
        fin = np.where(np.isinf(lam), 0.0, lam)
        scores = words @ fin
        best = scores.min()
        hits = np.flatnonzero(scores <= best + _tol(lam)).tolist()
    k = hits[0]
    x = tuple(int(v) for v in words[k])
    return DecodeResult(x, False, True, 0, _score(x, llr), len(hits) > 1)


def correlation_decode(H, llr: Sequence, limits: Limits = DEFAULT_LIMITS, ec: float = 1.0) -> DecodeResult:
    """Maximize <sqrt(Ec)(1 - 2x), llr> over all codewords."""
    H = as_matrix(H)
    llr = [float(v) if isinstance(v, np.floating) else v for v in llr]
    words = _pinned(enumerate_codewords(H, limits), llr)
    root = math.sqrt(ec)
    if _exact(llr):
        lam = [Fraction(v) for v in llr]
        corr = [sum((1 - 2 * b) * l for b, l in zip(w, lam)) for w in words.tolist()]
        best = max(corr)
        hits = [k for k, c in enumerate(corr) if c == best]
    else:
        lam = np.asarray(llr, dtype=float)
        fin = np.where(np.isinf(lam), 0.0, lam)
        corr = root * ((1.0 - 2.0 * words) @ fin)
        best = corr.max()
        hits = np.flatnonzero(corr >= best - root * 2 * _tol(lam)).tolist()
    k = hits[0]
    x = tuple(int(v) for v in words[k])
    return DecodeResult(x, False, True, 0, _score(x, llr), len(hits) > 1)


# ---------------------------------------------------------------- LPD

@lru_cache(maxsize=64)
def _vertex_table(H: ParityCheckMatrix, limits: Limits):
    P = build_polytope(H, limits).poly
    verts = enumerate_vertices(P, limits)
    if len(verts) > limits.lpd_vertex_cache:
        raise SizeLimit("too many vertices to cache")
    return tuple(verts), np.array([[float(v) for v in row] for row in verts])


def polytope_vertex_table(H, limits: Limits = DEFAULT_LIMITS):
    """(exact vertices sorted lexicographically, float matrix) of the fundamental polytope."""
    return _vertex_table(as_matrix(H), limits)


def _vertex_method_feasible(H: ParityCheckMatrix, limits: Limits) -> bool:
    if H.n > limits.vertex_n:
        return False
    try:
        _vertex_table(H, limits)
    except SizeLimit:
        return False
    return True


def _lpd_from_vertices(verts, V, llr) -> tuple[int, list[int]]:
    lam = list(llr)
    plus = [i for i, v in enumerate(lam) if v == math.inf]
    minus = [i for i, v in enumerate(lam) if v == -math.inf]
    keep = [k for k, v in enumerate(verts) if all(v[i] == 0 for i in plus) and all(v[i] == 1 for i in minus)]
    if not keep:
        raise DecodingContradiction("no polytope point agrees with the infinite LLRs")
    fin = [i for i in range(len(lam)) if math.isfinite(float(lam[i]))]
    if _exact([lam[i] for i in fin]):
        scores = [sum(verts[k][i] * Fraction(lam[i]) for i in fin) for k in keep]
        best = min(scores)
        hits = [k for k, s in zip(keep, scores) if s == best]
    else:
        lf = np.array([float(lam[i]) for i in fin])
        scores = V[np.ix_(keep, fin)] @ lf
        best = scores.min()
        tol = _tol(lf)
        hits = [k for k, s in zip(keep, scores) if s <= best + tol]
    return hits[0], hits


def lpd(H, llr: Sequence, limits: Limits = DEFAULT_LIMITS, method: str = "auto") -> DecodeResult:
    """Minimize <w, llr> over the fundamental polytope.

    ``method`` is "vertices" (argmin over the cached vertex list), "simplex"
    (exact Bland simplex), "highs" (floating-point LP, then the tight rows are
    solved exactly to recover the vertex) or "auto". The first two return the
    lexicographically smallest optimal vertex and flag ties; "highs" reports
    no ties. Infinite LLRs pin the coordinate to 0 (+inf) or 1 (-inf).
    """
    H = as_matrix(H)
    llr = list(llr)
    if len(llr) != H.n:
        raise ValueError("length mismatch")
    if method == "auto":
        if _vertex_method_feasible(H, limits):
            method = "vertices"
        else:
            method = "simplex" if H.n <= SIMPLEX_MAX_N else "highs"
    if method == "vertices":
        verts, V = _vertex_table(H, limits)
        k, hits = _lpd_from_vertices(verts, V, llr)
        w = verts[k]
        tie = len(hits) > 1
    elif method == "simplex":
        P = build_polytope(H, limits).poly
        E, f = list(P.E), list(P.f)
        c = []
        for i, v in enumerate(llr):
            if isinstance(v, float) and math.isinf(v):
                e = [0] * H.n
                e[i] = 1
                E.append(e)
                f.append(0 if v > 0 else 1)
                c.append(0)
            else:
                c.append(v)
        Q = HPolyhedron(H.n, P.A, P.b, E, f)
        try:
            _, w, tie = lp_minimize(Q, c)
        except ValueError as exc:  # empty restriction
            raise DecodingContradiction(str(exc)) from None
    elif method == "highs":
        if any(math.isinf(float(v)) for v in llr):
            raise ValueError("the floating-point path needs finite LLRs")
        P = build_polytope(H, limits).poly
        x = lpd_float(H, [llr], limits)[0]
        w = _refine(P, x)
        if w is None:
            _, w, _ = lp_minimize(P, llr)
        tie = False
    else:
        raise ValueError(f"unknown method {method!r}")
    fractional = any(v.denominator != 1 for v in w)
    return DecodeResult(tuple(w), fractional, True, 0, _score(w, llr), tie)


SIMPLEX_MAX_N = 40


@lru_cache(maxsize=16)
def _float_constraints(H: ParityCheckMatrix, limits: Limits):
    P = build_polytope(H, limits).poly
    return np.array(P.A, dtype=float), np.array(P.b, dtype=float)


def lpd_float(H, L, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Floating-point LP optimizers (HiGHS dual simplex), one row per LLR vector."""
    from scipy.optimize import linprog

    H = as_matrix(H)
    A, b = _float_constraints(H, limits)
    out = []
    for lam in np.atleast_2d(np.asarray(L, dtype=float)):
        res = linprog(lam, A_ub=A, b_ub=b, bounds=(0, 1), method="highs-ds")
        if res.status != 0:
            raise RuntimeError(f"LP solver failed: {res.message}")
        out.append(res.x)
    return np.array(out)


def _refine(P: HPolyhedron, x: np.ndarray, tol: float = 1e-7):
    """Exact vertex on the rows that are tight at ``x``, or None."""
    rows = [(a, bb) for a, bb in zip(P.A, P.b) if abs(np.dot(a, x) - bb) <= tol]
    rows += list(zip(P.E, P.f))
    if not rows:
        return None
    w = solve_unique([r for r, _ in rows], [v for _, v in rows])
    if w is None or not contains(P, w):
        return None
    return w


def lpd_batch(H, L: np.ndarray, limits: Limits = DEFAULT_LIMITS) -> tuple[np.ndarray, np.ndarray]:
    """Vertex index (into the sorted vertex list) and tie flag per row of finite ``L``."""
    verts, V = polytope_vertex_table(H, limits)
    L = np.asarray(L, dtype=float)
    S = L @ V.T
    best = S.min(axis=1, keepdims=True)
    tol = 1e-9 * np.maximum(1.0, np.abs(L).max(axis=1, keepdims=True))
    hit = S <= best + tol
    return hit.argmax(axis=1), hit.sum(axis=1) > 1


# ---------------------------------------------------------------- message passing

@dataclass(frozen=True)
class _Wiring:
    n: int
    m: int
    edge_bit: np.ndarray   # (E,)
    slots: np.ndarray      # (m, dmax) edge ids, -1 padded
    H: np.ndarray
    bslots: np.ndarray     # (n, cmax) edge ids per bit, -1 padded

    @classmethod
    def of(cls, H: ParityCheckMatrix) -> "_Wiring":
        edges = H.edges
        dmax = max(H.row_weights())
        slots = -np.ones((H.m, dmax), dtype=np.int64)
        bslots = -np.ones((H.n, max(1, max(H.col_weights()))), dtype=np.int64)
        pos, bpos = [0] * H.m, [0] * H.n
        for e, (j, i) in enumerate(edges):
            slots[j, pos[j]] = e
            pos[j] += 1
            bslots[i, bpos[i]] = e
            bpos[i] += 1
        return cls(H.n, H.m, np.array([i for _, i in edges], dtype=np.int64), slots,
                   H.entries.astype(np.int64), bslots)

    def bit_sum(self, msg: np.ndarray) -> np.ndarray:
        out = np.zeros((msg.shape[0], self.n))
        np.add.at(out, (slice(None), self.edge_bit), msg)
        return out

    def bit_extrinsic(self, msg: np.ndarray) -> np.ndarray:
        """Per edge, the sum of the other incoming messages at its bit (no subtraction, so +-inf is safe)."""
        mask = self.bslots >= 0
        idx = np.where(mask, self.bslots, 0)
        vals = np.where(mask[None], msg[:, idx], 0.0)
        ext = _extrinsic(vals, np.add, 0.0)
        out = np.zeros_like(msg)
        out[:, self.bslots[mask]] = ext[:, mask]
        return out


def _extrinsic(vals: np.ndarray, op, neutral) -> np.ndarray:
    """Leave-one-out reduction along the last axis via prefix/suffix scans."""
    B, m, d = vals.shape
    pre = np.full((B, m, d), neutral, dtype=vals.dtype)
    suf = np.full((B, m, d), neutral, dtype=vals.dtype)
    for k in range(1, d):
        pre[..., k] = op(pre[..., k - 1], vals[..., k - 1])
        suf[..., d - 1 - k] = op(suf[..., d - k], vals[..., d - k])
    return op(pre, suf)


def _check_update(w: _Wiring, mu: np.ndarray, rule: str, clamp: float | None) -> np.ndarray:
    B = mu.shape[0]
    mask = w.slots >= 0
    idx = np.where(mask, w.slots, 0)
    out = np.zeros_like(mu)
    if rule == "spa":
        x = mu if clamp is None else np.clip(mu, -clamp, clamp)
        t = np.where(mask[None], np.tanh(x[:, idx] / 2), 1.0)
        prod = _extrinsic(t, np.multiply, 1.0)
        with np.errstate(divide="ignore"):  # a degree-one check pins its bit: +inf
            res = 2 * np.arctanh(prod)
    elif rule == "msa":
        a = np.where(mask[None], np.abs(mu[:, idx]), np.inf)
        s = np.where(mask[None], np.sign(mu[:, idx]), 1.0)
        res = _extrinsic(s, np.multiply, 1.0) * _extrinsic(a, np.minimum, np.inf)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    out[:, w.slots[mask]] = res[:, mask]
    return out


def _bec_step(w: _Wiring, lam_sign: np.ndarray, c2v: np.ndarray):
    """One flooding iteration on sign-coded messages in {-1, 0, +1} (meaning -inf, 0, +inf)."""
    B = lam_sign.shape[0]
    pos = (lam_sign > 0).astype(np.int64) + w.bit_sum((c2v > 0).astype(float)).astype(np.int64)
    neg = (lam_sign < 0).astype(np.int64) + w.bit_sum((c2v < 0).astype(float)).astype(np.int64)
    e_pos = pos[:, w.edge_bit] - (c2v > 0)
    e_neg = neg[:, w.edge_bit] - (c2v < 0)
    bad = (e_pos > 0) & (e_neg > 0)
    v2c = np.where(e_pos > 0, 1, np.where(e_neg > 0, -1, 0)).astype(np.int8)
    mask = w.slots >= 0
    idx = np.where(mask, w.slots, 0)
    vals = np.where(mask[None], v2c[:, idx], 1).astype(np.int64)
    nz = (vals != 0).astype(np.int64)
    sgn = np.where(vals == 0, 1, vals)
    zeros_other = _extrinsic(1 - nz, np.add, 0)
    sign_other = _extrinsic(sgn, np.multiply, 1)
    res = np.where(zeros_other > 0, 0, sign_other)
    new = np.zeros_like(c2v)
    new[:, w.slots[mask]] = res[:, mask]
    tp = (lam_sign > 0) + w.bit_sum((new > 0).astype(float)).astype(np.int64)
    tn = (lam_sign < 0) + w.bit_sum((new < 0).astype(float)).astype(np.int64)
    contradiction = bad.any(axis=1) | ((tp > 0) & (tn > 0)).any(axis=1)
    total = np.where(tp > 0, 1.0, np.where(tn > 0, -1.0, 0.0))
    return new, total, contradiction


@dataclass
class BatchResult:
    decision: np.ndarray      # (B, n) final hard decisions
    converged: np.ndarray     # (B,)
    iterations: np.ndarray    # (B,) first iteration of the final stable streak, or max_iter
    contradiction: np.ndarray  # (B,)
    history: np.ndarray | None = None  # (T, B, n) when requested
    total: np.ndarray | None = None    # (B, n) posterior LLRs after the last iteration


def message_passing(H, L, max_iter: int, alpha: float = 1.0, rule: str = "spa",
                    window: int = WINDOW, clamp: float | None = CLAMP,
                    keep_history: bool = False) -> BatchResult:
    """Flooding-schedule sum-product ("spa") or min-sum ("msa") on a batch of LLR vectors.

    Messages: v2c(t) = alpha * (llr + extrinsic c2v(t-1)) + (1 - alpha) * v2c(t-1)
    with v2c(0) = llr, so the first iteration is never damped. A vector has
    converged when its hard decision is the same codeword, with no zero total
    LLR, for the last ``window`` iterations.
    """
    H = as_matrix(H)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not 0 <= alpha <= 1:
        raise ValueError("damping factor must be in [0, 1]")
    L = np.atleast_2d(np.asarray(L, dtype=float))
    B, n = L.shape
    if n != H.n:
        raise ValueError("length mismatch")
    w = _Wiring.of(H)
    E = len(w.edge_bit)
    infinite = np.isinf(L)
    bec = infinite.any()
    if bec:
        if not np.all(infinite | (L == 0)):
            raise ValueError("infinite LLRs may only be mixed with zeros (erasure channel)")
        if alpha != 1:
            raise ValueError("damping is not defined for erasure LLRs")
        lam_sign = np.sign(L).astype(np.int64)
        c2v_s = np.zeros((B, E), dtype=np.int64)
    else:
        v2c = L[:, w.edge_bit].copy()
        c2v = np.zeros((B, E))

    window = min(window, max_iter)
    streak = np.zeros(B, dtype=np.int64)
    prev = np.full((B, n), -1, dtype=np.int8)
    contradiction = np.zeros(B, dtype=bool)
    hist = [] if keep_history else None
    dec = np.zeros((B, n), dtype=np.int8)
    for t in range(1, max_iter + 1):
        if bec:
            c2v_s, total, bad = _bec_step(w, lam_sign, c2v_s)
            contradiction |= bad
        else:
            f = L[:, w.edge_bit] + w.bit_extrinsic(c2v)
            if alpha == 1:
                v2c = f
            elif alpha > 0:
                v2c = alpha * f + (1 - alpha) * v2c
            c2v = _check_update(w, v2c, rule, clamp)
            total = L + w.bit_sum(c2v)
        dec = (total < 0).astype(np.int8)
        valid = ~np.any((dec.astype(np.int64) @ w.H.T) % 2, axis=1) & ~np.any(total == 0, axis=1) & ~contradiction
        same = np.all(dec == prev, axis=1)
        streak = np.where(valid, np.where(same, streak + 1, 1), 0)
        prev = dec
        if keep_history:
            hist.append(dec.copy())
    converged = streak >= window
    iters = np.where(converged, max_iter - streak + 1, max_iter)
    if bec:
        total = np.where(total == 0, 0.0, np.copysign(np.inf, total))
    return BatchResult(dec, converged, iters, contradiction,
                       np.array(hist) if keep_history else None, total)


def _single(H, llr, max_iter, alpha, rule, window, clamp) -> DecodeResult:
    r = message_passing(H, [llr], max_iter, alpha, rule, window, clamp, keep_history=True)
    x = tuple(int(v) for v in r.decision[0])
    hist = [tuple(int(v) for v in h[0]) for h in r.history]
    return DecodeResult(x, False, bool(r.converged[0]), int(r.iterations[0]), _score(x, [float(v) for v in llr]),
                        False, bool(r.contradiction[0]), hist)


def spa(H, llr: Sequence, max_iter: int = 60, alpha: float = 1.0, window: int = WINDOW,
        clamp: float | None = CLAMP) -> DecodeResult:
    return _single(H, llr, max_iter, alpha, "spa", window, clamp)


def msa(H, llr: Sequence, max_iter: int = 60, window: int = WINDOW) -> DecodeResult:
    return _single(H, llr, max_iter, 1.0, "msa", window, None)
