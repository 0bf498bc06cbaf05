"""Command-line front end: ``pseudocodewords {analyze,sweep,decode,cover,bounds}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import channels, decoders
from .canonical_completion import all_roots, bound_constants, upper_bound
from .code_model import (
    LimitExceeded, as_matrix, diameter, enumerate_codewords, girth, is_stopping_set, load_alist,
    minimum_hamming_weight,
)
from .fundamental_polytope import build_polytope, minimal_pseudocodewords, polytope_vertices, vector_json
from .graph_covers import realize_cover
from .limits import DEFAULT_LIMITS, Limits
from .pseudoweights import WeightReport, minimum_weights
from .rational_geometry import SizeLimit, contains

DEFAULT_SEED = 0x5EED


def _num(v):
    """JSON-friendly number: exact fractions as "p/q" strings, infinities as strings."""
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _report(w) -> dict:
    return {k: _num(v) for k, v in WeightReport.of(w).as_dict().items()}


def _write(out: Path | None, name: str, text: str | bytes) -> None:
    if out is None:
        sys.stdout.write(text if isinstance(text, str) else text.decode("latin-1"))
        return
    out.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(text, bytes) else "w"
    with open(out / name, mode) as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def parse_vector(text: str) -> list:
    """Comma-separated numbers; "p/q" entries stay exact, "inf"/"-inf" allowed."""
    out = []
    for tok in text.replace(" ", "").split(","):
        low = tok.lower()
        if low in ("inf", "+inf"):
            out.append(math.inf)
        elif low == "-inf":
            out.append(-math.inf)
        elif "/" in tok or ("." not in tok and "e" not in low):
            out.append(Fraction(tok))
        else:
            out.append(float(tok))
    return out


# ---------------------------------------------------------------- analyze

def cmd_analyze(H, limits: Limits, out: Path | None) -> dict:
    H = as_matrix(H)
    g, d = girth(H), diameter(H)
    rep: dict = {"n": H.n, "m": H.m, "girth": _num(g), "diameter": _num(d)}
    try:
        words = enumerate_codewords(H, limits)
        rep["codewords"] = ["".join(map(str, w)) for w in words.tolist()]
        rep["minimum_distance"] = _num(minimum_hamming_weight(H, limits))
    except LimitExceeded as exc:
        rep["codewords"] = None
        rep["notice"] = f"codeword enumeration skipped: {exc}"
    try:
        verts = polytope_vertices(H, limits)
        rays = minimal_pseudocodewords(H, limits)
        mins = minimum_weights(H, limits)
    except (SizeLimit, LimitExceeded) as exc:
        rep["notice"] = (f"vertex/ray enumeration skipped: {exc}. "
                         "Raise vertex_n / subset_enumeration / dd_max_rays with --limits to force it.")
        _write(out, "analysis.json", _dump(rep))
        return rep
    rep["vertices"] = [{
        "coords": vector_json(v),
        "weights": _report(v),
        "support_is_stopping_set": is_stopping_set(H, [i for i, x in enumerate(v) if x]),
        "integral": all(x.denominator == 1 for x in v),
    } for v in verts]
    rep["minimal_pseudocodewords"] = [{"coords": vector_json(r.coords), "weights": _report(r.coords)} for r in rays]
    rep["minima"] = {k: _num(v) for k, v in mins.as_dict().items()}
    _write(out, "analysis.json", _dump(rep))
    return rep


# ---------------------------------------------------------------- sweep

@dataclass(frozen=True)
class SweepSpec:
    origin: np.ndarray      # LLR vector at grid coordinates (0, 0)
    u: np.ndarray           # x-axis direction
    v: np.ndarray           # y-axis direction
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    decoder: str
    max_iter: int = 60
    alpha: float = 1.0

    def __post_init__(self):
        if len(self.xs) < 2 or len(self.ys) < 2:
            raise ValueError("grid resolution must be at least 2 per axis")
        if np.linalg.matrix_rank(np.stack([self.u, self.v])) < 2:
            raise ValueError("plane directions must be linearly independent")

    def points(self) -> np.ndarray:
        """LLR vectors in image order: rows top (largest y) to bottom, columns left to right."""
        X, Y = np.meshgrid(np.array(self.xs), np.array(self.ys[::-1]))
        return self.origin[None, :] + X.ravel()[:, None] * self.u[None, :] + Y.ravel()[:, None] * self.v[None, :]


def axis_values(lo: Fraction, hi: Fraction, res: int) -> tuple[float, ...]:
    """Evenly spaced points computed exactly, so symmetric points cancel exactly."""
    if res < 2:
        raise ValueError("grid resolution must be at least 2 per axis")
    return tuple(float(lo + (hi - lo) * k / (res - 1)) for k in range(res))


def boundary_frame(ray: Sequence, seed: int) -> np.ndarray:
    """Orthonormal (l1, l2, l3): l1 normal to the pairwise boundary <ray, llr> = 0,
    l2 completing the all-ones direction, l3 random and orthogonal to both."""
    w = np.asarray([float(x) for x in ray])
    n = len(w)
    l1 = w / np.linalg.norm(w)
    ones = np.ones(n) - np.dot(np.ones(n), l1) * l1
    if np.linalg.norm(ones) < 1e-12:
        raise ValueError("ray is parallel to the all-ones vector")
    l2 = ones / np.linalg.norm(ones)
    r = channels.make_rng(seed).normal(size=n)
    r -= np.dot(r, l1) * l1 + np.dot(r, l2) * l2
    return np.stack([l1, l2, r / np.linalg.norm(r)])


def parse_plane(spec: str, n: int, fixes: Sequence[str], seed: int):
    """Return (origin, u, v) for "coords:i,j" or "boundary:<ray-file>[:a,b]".

    ``fixes`` are "k=value" strings (optionally "lambdak=value") that set the
    k-th coordinate of the frame (1-based) for all grid points.
    """
    kind, _, rest = spec.partition(":")
    if kind == "coords":
        frame = np.eye(n)
        axes = rest or "1,2"
    elif kind == "boundary":
        path, _, axes = rest.partition(":")
        if not path:
            raise ValueError("boundary plane needs a ray file")
        data = json.loads(Path(path).read_text())
        ray = data["coords"] if isinstance(data, dict) else data
        if len(ray) != n:
            raise ValueError("ray length does not match the code")
        frame = boundary_frame([Fraction(str(x)) for x in ray], seed)
        axes = axes or "1,2"
    else:
        raise ValueError(f"invalid plane spec {spec!r}")
    try:
        a, b = (int(t) - 1 for t in axes.split(","))
    except ValueError:
        raise ValueError(f"invalid plane axes {axes!r}") from None
    if not (0 <= a < len(frame) and 0 <= b < len(frame)) or a == b:
        raise ValueError(f"invalid plane axes {axes!r}")
    origin = np.zeros(n)
    for f in fixes:
        key, _, val = f.partition("=")
        k = int(key.lower().removeprefix("lambda")) - 1
        if not 0 <= k < len(frame) or k in (a, b):
            raise ValueError(f"invalid offset {f!r}")
        origin = origin + float(Fraction(val)) * frame[k]
    return origin, frame[a], frame[b]


def _chunks(L: np.ndarray, k: int):
    return np.array_split(np.arange(len(L)), max(1, k))


def run_sweep(H, spec: SweepSpec, limits: Limits, threads: int = 1) -> dict:
    H = as_matrix(H)
    L = spec.points()
    B = len(L)
    ids = _chunks(L, threads)
    if spec.decoder in ("spa", "msa"):
        def work(idx):
            return decoders.message_passing(H, L[idx], spec.max_iter, spec.alpha, spec.decoder)
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            parts = list(pool.map(work, ids))
        dec = np.concatenate([p.decision for p in parts])
        conv = np.concatenate([p.converged for p in parts])
        iters = np.concatenate([p.iterations for p in parts])
        tie = np.zeros(B, dtype=bool)
        labels = ["".join(map(str, r)) for r in dec.tolist()]
        zero = ~dec.any(axis=1)
    elif spec.decoder == "lpd":
        try:
            verts, _ = decoders.polytope_vertex_table(H, limits)
        except (SizeLimit, LimitExceeded):
            verts = None
        if verts is not None:
            idx, tie = decoders.lpd_batch(H, L, limits)
            labels = [" ".join(vector_json(verts[k])) for k in idx]
            zero = np.array([not any(verts[k]) for k in idx], dtype=bool)
        else:
            with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
                parts = list(pool.map(lambda i: decoders.lpd_float(H, L[i], limits), ids))
            W = np.concatenate(parts)
            zero = np.abs(W).max(axis=1) < 1e-9
            labels = [" ".join(f"{x:.6g}" for x in np.where(np.abs(w) < 1e-9, 0.0, w)) for w in W]
            tie = np.zeros(B, dtype=bool)
        conv = np.ones(B, dtype=bool)
        iters = np.zeros(B, dtype=np.int64)
    elif spec.decoder == "mld":
        words = enumerate_codewords(H, limits).astype(float)
        S = L @ words.T
        best = S.min(axis=1, keepdims=True)
        hit = S <= best + 1e-9 * np.maximum(1.0, np.abs(L).max(axis=1, keepdims=True))
        idx = hit.argmax(axis=1)
        tie = hit.sum(axis=1) > 1
        labels = ["".join(str(int(b)) for b in words[k]) for k in idx]
        zero = ~words[idx].any(axis=1)
        conv = np.ones(B, dtype=bool)
        iters = np.zeros(B, dtype=np.int64)
    else:
        raise ValueError(f"unknown decoder {spec.decoder!r}")
    table: dict[str, int] = {}
    dec_id = np.array([table.setdefault(s, len(table)) for s in labels])
    return {"labels": labels, "decision_id": dec_id, "converged": conv, "iterations": iters, "tie": tie,
            "zero": zero, "decisions": list(table)}


def gray_levels(res: dict, spec: SweepSpec) -> np.ndarray:
    """Darkness 0..254 = iterations scaled by max_iter, 255 = not converged.

    For LP/ML sweeps darkness is 0 for the all-zeros word, 128 for ties and
    255 for any other decision. Stored bytes are 255 - darkness so that a
    standard viewer shows non-convergence as black.
    """
    if spec.decoder in ("spa", "msa"):
        dark = np.where(res["converged"], np.rint(254 * res["iterations"] / spec.max_iter), 255)
    else:
        dark = np.where(res["tie"], 128, np.where(res["zero"], 0, 255))
    return (255 - dark).astype(np.uint8)


def pgm_bytes(pixels: np.ndarray, width: int, height: int) -> bytes:
    return f"P5\n{width} {height}\n255\n".encode() + pixels.reshape(height, width).tobytes()


def sweep_csv(res: dict, spec: SweepSpec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "x", "y", "decision_id", "decision", "converged", "iterations", "tie"])
    W = len(spec.xs)
    ys = spec.ys[::-1]
    for k, label in enumerate(res["labels"]):
        r, c = divmod(k, W)
        w.writerow([r, c, repr(spec.xs[c]), repr(ys[r]), int(res["decision_id"][k]), label,
                    int(res["converged"][k]), int(res["iterations"][k]), int(res["tie"][k])])
    return buf.getvalue()


def cmd_sweep(H, spec: SweepSpec, limits: Limits, out: Path | None, threads: int = 1, stem: str = "sweep") -> dict:
    res = run_sweep(H, spec, limits, threads)
    pix = gray_levels(res, spec)
    _write(out, f"{stem}.pgm", pgm_bytes(pix, len(spec.xs), len(spec.ys)))
    _write(out, f"{stem}.csv", sweep_csv(res, spec))
    return res


# ---------------------------------------------------------------- decode

def _decode_one(H, llr, decoder: str, max_iter: int, alpha: float, limits: Limits) -> decoders.DecodeResult:
    if decoder == "mld":
        return decoders.mld(H, llr, limits)
    if decoder == "lpd":
        return decoders.lpd(H, llr, limits)
    if decoder == "spa":
        return decoders.spa(H, [float(v) for v in llr], max_iter, alpha)
    if decoder == "msa":
        return decoders.msa(H, [float(v) for v in llr], max_iter)
    raise ValueError(f"unknown decoder {decoder!r}")


def monte_carlo(H, ch, decoder: str, trials: int, seed: int, max_iter: int = 60, alpha: float = 1.0,
                limits: Limits = DEFAULT_LIMITS) -> dict:
    """Transmit the all-zeros codeword ``trials`` times and tally the outcomes.

    ``codeword_errors`` counts wrong integral decisions (what ML decoding can
    also get wrong); ``pseudocodeword_decisions`` counts fractional LPD
    outputs; ``not_converged`` counts message-passing failures.
    """
    H = as_matrix(H)
    rng = channels.make_rng(seed)
    x = np.zeros(H.n, dtype=np.int64)
    tally = {"trials": trials, "word_errors": 0, "codeword_errors": 0, "pseudocodeword_decisions": 0,
             "not_converged": 0, "ties": 0, "contradictions": 0}
    for _ in range(trials):
        lam = channels.llr(ch, channels._sample(ch, x, rng))
        try:
            r = _decode_one(H, lam.tolist(), decoder, max_iter, alpha, limits)
        except decoders.DecodingContradiction:
            tally["contradictions"] += 1
            tally["word_errors"] += 1
            continue
        tally["ties"] += r.tie
        if r.fractional:
            tally["pseudocodeword_decisions"] += 1
            tally["word_errors"] += 1
        elif not r.converged or r.contradiction:
            tally["not_converged"] += 1
            tally["word_errors"] += 1
        elif any(r.decision):
            tally["codeword_errors"] += 1
            tally["word_errors"] += 1
    return tally


# ---------------------------------------------------------------- cover / bounds

def cmd_cover(H, nu: Sequence, limits: Limits, out: Path | None) -> dict:
    H = as_matrix(H)
    nu = [Fraction(v) for v in nu]
    if len(nu) != H.n or not contains(build_polytope(H, limits).poly, nu):
        raise ValueError("nu is not in the fundamental polytope")
    M, cover, x = realize_cover(H, nu, limits)
    data = cover.to_json()
    data["nu"] = vector_json(nu)
    data["codeword"] = [int(b) for b in x.flat()]
    data["counts"] = list(x.counts())
    _write(out, "cover.json", _dump(data))
    return data


def cmd_bounds(H, out: Path | None) -> dict:
    H = as_matrix(H)
    rows = all_roots(H)  # rejects non-uniform row weight
    wc = set(H.col_weights())
    w_col = wc.pop() if len(wc) == 1 else None
    w_row = H.row_weights()[0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["root", "wp_awgnc", "wp_awgnc_exact", "tier_profile"])
    for r in rows:
        w.writerow([r.root + 1, f"{float(r.weight):.6f}", str(r.weight), " ".join(map(str, r.profile))])
    best = min(rows, key=lambda r: r.weight)
    data = {"n": H.n, "w_col": w_col, "w_row": w_row,
            "min_root": best.root + 1, "min_completion_weight": float(best.weight)}
    if w_col is not None and 3 <= w_col < w_row:
        bp, beta = bound_constants(w_col, w_row)
        data.update(beta_prime=_num(bp), beta=beta, upper_bound=upper_bound(w_col, w_row, H.n))
    w.writerow([])
    w.writerow(["upper_bound", data.get("upper_bound", "n/a")])
    _write(out, "bounds.csv", buf.getvalue())
    _write(out, "bounds.json", _dump(data))
    return data


# ---------------------------------------------------------------- argument parsing

def _range(text: str) -> tuple[Fraction, Fraction]:
    lo, _, hi = text.partition(":")
    return Fraction(lo), Fraction(hi)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pseudocodewords", description=__doc__)
    p.add_argument("--code", required=True, help="parity-check matrix (alist, or dense 'm n' + rows)")
    p.add_argument("--limits", help="JSON file overriding enumeration limits")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit RNG seed")
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="cmd", required=True)

    sub.add_parser("analyze", help="vertices, minimal pseudo-codewords, minimum pseudo-weights")

    s = sub.add_parser("sweep", help="decision regions on a 2-D slice of LLR space")
    s.add_argument("--decoder", choices=["mld", "lpd", "spa", "msa"], default="spa")
    s.add_argument("--plane", default="coords:1,2", help="coords:i,j or boundary:<ray.json>[:a,b]")
    s.add_argument("--fix", action="append", default=[], help="k=value offset, e.g. lambda2=10")
    s.add_argument("--range", default="-10:10", help="lo:hi for both axes")
    s.add_argument("--xrange")
    s.add_argument("--yrange")
    s.add_argument("--res", type=int, default=201)
    s.add_argument("--max-iter", type=int, default=60)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--name", default="sweep", help="output file stem")

    d = sub.add_parser("decode", help="decode one LLR vector or a Monte-Carlo batch")
    d.add_argument("--decoder", choices=["mld", "lpd", "spa", "msa"], required=True)
    d.add_argument("--max-iter", type=int, default=60)
    d.add_argument("--alpha", type=float, default=1.0)
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="llr", help="comma-separated LLRs")
    g.add_argument("--channel", help="awgnc:ebn0_db=.. | bsc:eps=.. | bec:eps=..")
    d.add_argument("--trials", type=int, default=1)

    c = sub.add_parser("cover", help="realize a polytope point in a finite graph cover")
    c.add_argument("--nu", required=True, help="comma-separated rationals, e.g. 2/3,2/3,2/3,0")

    sub.add_parser("bounds", help="canonical-completion weights per root and the upper bound")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        H = load_alist(args.code)
        limits = Limits.from_json(args.limits) if args.limits else DEFAULT_LIMITS
        out = Path(args.out) if args.out else None
        if args.cmd == "analyze":
            cmd_analyze(H, limits, out)
        elif args.cmd == "sweep":
            origin, u, v = parse_plane(args.plane, H.n, args.fix, args.seed)
            xr = _range(args.xrange or args.range)
            yr = _range(args.yrange or args.range)
            spec = SweepSpec(origin, u, v, axis_values(*xr, args.res), axis_values(*yr, args.res),
                             args.decoder, args.max_iter, args.alpha)
            res = cmd_sweep(H, spec, limits, out, args.threads, args.name)
            if out is not None:
                summary = {"seed": args.seed, "decoder": args.decoder, "plane": args.plane, "fix": args.fix,
                           "res": args.res, "max_iter": args.max_iter, "alpha": args.alpha,
                           "not_converged": int((~res["converged"]).sum()), "decisions": res["decisions"]}
                _write(out, f"{args.name}.json", _dump(summary))
        elif args.cmd == "decode":
            if args.llr is not None:
                llr = parse_vector(args.llr)
                if len(llr) != H.n:
                    raise ValueError(f"expected {H.n} LLRs, got {len(llr)}")
                r = _decode_one(H, llr, args.decoder, args.max_iter, args.alpha, limits)
                data = r.as_dict()
            else:
                ch = channels.parse_channel(args.channel, H)
                data = monte_carlo(H, ch, args.decoder, args.trials, args.seed, args.max_iter, args.alpha, limits)
                data.update(seed=args.seed, channel=args.channel, decoder=args.decoder)
            _write(out, "decode.json", _dump(data))
        elif args.cmd == "cover":
            cmd_cover(H, parse_vector(args.nu), limits, out)
        elif args.cmd == "bounds":
            cmd_bounds(H, out)
    except (ValueError, OSError, LimitExceeded, SizeLimit, decoders.DecodingContradiction) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
