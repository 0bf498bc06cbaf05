"""Binary parity-check matrices, Tanner graphs and small combinatorial diagnostics.

Indices are 0-based throughout the Python API. File formats (alist) are
1-based, as is customary.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .limits import DEFAULT_LIMITS, Limits


class AlistParseError(ValueError):
    """Malformed matrix file. ``line`` is 1-based (0 when unknown)."""

    def __init__(self, msg: str, line: int = 0):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


class LimitExceeded(RuntimeError):
    """A configured enumeration budget would be exceeded."""


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """An m x n binary matrix with cached row and column supports.

    ``checks[j]`` holds the bit positions touched by check ``j`` and
    ``bits[i]`` the checks touching bit ``i``.
    """

    entries: np.ndarray
    checks: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    bits: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.uint8, copy=True)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("parity-check matrix must be a non-empty 2-D array")
        if np.any(a > 1):
            raise ValueError("entries must be 0 or 1")
        empty = np.flatnonzero(a.sum(axis=1) == 0)
        if empty.size:
            raise ValueError(f"zero row(s) not allowed: {empty.tolist()}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "checks", tuple(tuple(np.flatnonzero(r).tolist()) for r in a))
        object.__setattr__(self, "bits", tuple(tuple(np.flatnonzero(c).tolist()) for c in a.T))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Tanner-graph edges as (check, bit) pairs, check-major order."""
        return [(j, i) for j, row in enumerate(self.checks) for i in row]

    def row_weights(self) -> list[int]:
        return [len(c) for c in self.checks]

    def col_weights(self) -> list[int]:
        return [len(b) for b in self.bits]

    def syndrome(self, x) -> np.ndarray:
        return (self.entries.astype(np.int64) @ np.asarray(x, dtype=np.int64)) % 2

    def is_codeword(self, x) -> bool:
        return not np.any(self.syndrome(x))

    def tanner_graph(self) -> "TannerGraph":
        return TannerGraph(self)

    def __eq__(self, other):
        return isinstance(other, ParityCheckMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"ParityCheckMatrix(m={self.m}, n={self.n})"


def as_matrix(H) -> ParityCheckMatrix:
    return H if isinstance(H, ParityCheckMatrix) else ParityCheckMatrix(np.asarray(H))


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite graph view of a parity-check matrix.

    Nodes carry flat ids: bit i is ``i`` and check j is ``n + j``.
    """

    H: ParityCheckMatrix

    @property
    def num_nodes(self) -> int:
        return self.H.n + self.H.m

    def neighbors(self, node: int) -> tuple[int, ...]:
        # flat ids: bits 0..n-1, checks n..n+m-1
        n = self.H.n
        if node < n:
            return tuple(n + j for j in self.H.bits[node])
        return self.H.checks[node - n]

    def bfs_distances(self, source: int) -> list[float]:
        dist = [math.inf] * self.num_nodes
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if dist[v] == math.inf:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def _graph(T) -> TannerGraph:
    if isinstance(T, TannerGraph):
        return T
    return TannerGraph(as_matrix(T))


# ---------------------------------------------------------------- file formats

def parse_alist(text: str) -> ParityCheckMatrix:
    lines = [ln for ln in text.splitlines()]
    tokens_by_line: list[tuple[int, list[int]]] = []
    for k, ln in enumerate(lines, start=1):
        if not ln.strip():
            continue
        try:
            tokens_by_line.append((k, [int(t) for t in ln.split()]))
        except ValueError as exc:
            raise AlistParseError(f"non-integer token ({exc})", k) from None
    it = iter(tokens_by_line)

    def take(what: str) -> tuple[int, list[int]]:
        try:
            return next(it)
        except StopIteration:
            last = tokens_by_line[-1][0] if tokens_by_line else 0
            raise AlistParseError(f"unexpected end of file while reading {what}", last + 1) from None

    ln, hdr = take("header")
    if len(hdr) != 2:
        raise AlistParseError("header must be 'n m'", ln)
    n, m = hdr
    if n < 1 or m < 1:
        raise AlistParseError("dimensions must be positive", ln)
    ln, _maxima = take("maximum degrees")
    ln, col_deg = take("column degrees")
    if len(col_deg) != n:
        raise AlistParseError(f"expected {n} column degrees, got {len(col_deg)}", ln)
    ln, row_deg = take("row degrees")
    if len(row_deg) != m:
        raise AlistParseError(f"expected {m} row degrees, got {len(row_deg)}", ln)

    H = np.zeros((m, n), dtype=np.uint8)
    for i in range(n):
        ln, adj = take(f"adjacency of column {i + 1}")
        adj = [a for a in adj if a != 0]  # zero padding
        if len(adj) != col_deg[i]:
            raise AlistParseError(f"column {i + 1}: degree {col_deg[i]} but {len(adj)} entries", ln)
        for a in adj:
            if not 1 <= a <= m:
                raise AlistParseError(f"row index {a} out of range", ln)
            H[a - 1, i] = 1
    for j in range(m):
        ln, adj = take(f"adjacency of row {j + 1}")
        adj = [a for a in adj if a != 0]
        if len(adj) != row_deg[j]:
            raise AlistParseError(f"row {j + 1}: degree {row_deg[j]} but {len(adj)} entries", ln)
        if sorted(a - 1 for a in adj) != np.flatnonzero(H[j]).tolist():
            raise AlistParseError(f"row {j + 1} adjacency disagrees with column lists", ln)
    try:
        return ParityCheckMatrix(H)
    except ValueError as exc:
        raise AlistParseError(str(exc)) from None


def parse_dense(text: str) -> ParityCheckMatrix:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise AlistParseError("dense format header must be 'm n'", 1)
    try:
        m, n = int(rows[0][0]), int(rows[0][1])
    except ValueError:
        raise AlistParseError("dense format header must be 'm n'", 1) from None
    body = ["".join(r) for r in rows[1:]]
    if len(body) != m:
        raise AlistParseError(f"expected {m} rows, got {len(body)}", len(rows) + 1)
    H = np.zeros((m, n), dtype=np.uint8)
    for j, r in enumerate(body):
        if len(r) != n or set(r) - {"0", "1"}:
            raise AlistParseError(f"row {j + 1} must be {n} characters of 0/1", j + 2)
        H[j] = [int(ch) for ch in r]
    try:
        return ParityCheckMatrix(H)
    except ValueError as exc:
        raise AlistParseError(str(exc)) from None


def _looks_dense(text: str) -> bool:
    # alist line 2 holds two maxima; a dense row is a single 0/1 token
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    return len(lines) > 1 and len(lines[1]) == 1


def load_alist(path) -> ParityCheckMatrix:
    """Read an alist file, falling back to the dense "m n" + 0/1 rows format."""
    text = Path(path).read_text()
    if _looks_dense(text):
        return parse_dense(text)
    return parse_alist(text)


def to_alist(H) -> str:
    H = as_matrix(H)
    out = [f"{H.n} {H.m}", f"{max(H.col_weights())} {max(H.row_weights())}",
           " ".join(map(str, H.col_weights())), " ".join(map(str, H.row_weights()))]
    # an isolated bit gets a single zero pad so its line is not empty
    out += [" ".join(str(j + 1) for j in b) or "0" for b in H.bits]
    out += [" ".join(str(i + 1) for i in c) for c in H.checks]
    return "\n".join(out) + "\n"


def save_alist(H, path) -> None:
    Path(path).write_text(to_alist(H))


# ---------------------------------------------------------------- GF(2) algebra

def gf2_row_reduce(A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    R = np.array(A, dtype=np.uint8) % 2
    pivots = []
    r = 0
    for c in range(R.shape[1]):
        if r == R.shape[0]:
            break
        hit = np.flatnonzero(R[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        R[others] ^= R[r]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def gf2_rank(A) -> int:
    return len(gf2_row_reduce(A)[1])


def gf2_nullspace(A) -> np.ndarray:
    """Basis (rows) of {x : A x = 0} over GF(2)."""
    A = np.asarray(A, dtype=np.uint8)
    n = A.shape[1]
    R, pivots = gf2_row_reduce(A)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, p in enumerate(pivots):
            basis[k, p] = R[r, f]
    return basis


def code_rate(H) -> float:
    H = as_matrix(H)
    return (H.n - gf2_rank(H.entries)) / H.n


def enumerate_codewords(H, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """All codewords as rows of a uint8 array, sorted lexicographically."""
    H = as_matrix(H)
    basis = gf2_nullspace(H.entries)
    k = basis.shape[0]
    if k <= limits.nullspace_dim:
        coeffs = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8).reshape(2 ** k, k)
        words = (coeffs.astype(np.int64) @ basis.astype(np.int64)) % 2
    elif H.n <= limits.brute_force_n:
        allx = ((np.arange(2 ** H.n)[:, None] >> np.arange(H.n - 1, -1, -1)) & 1)
        words = allx[~np.any((allx @ H.entries.T.astype(np.int64)) % 2, axis=1)]
    else:
        raise LimitExceeded(
            f"code dimension {k} exceeds nullspace limit {limits.nullspace_dim} "
            f"and n={H.n} exceeds brute-force limit {limits.brute_force_n}")
    words = np.asarray(words, dtype=np.uint8)
    order = np.lexsort(words.T[::-1])
    return words[order]


def minimum_hamming_weight(H, limits: Limits = DEFAULT_LIMITS) -> float:
    w = enumerate_codewords(H, limits).sum(axis=1)
    w = w[w > 0]
    return int(w.min()) if w.size else math.inf


@dataclass(frozen=True)
class LocalCode:
    """Single-check code: ``local`` is C'_j on the support, ``support`` the positions."""

    n: int
    support: tuple[int, ...]
    local: tuple[tuple[int, ...], ...]

    def extended(self) -> list[tuple[int, ...]]:
        """All words of the length-n code C_j (free outside the support)."""
        outside = [i for i in range(self.n) if i not in self.support]
        words = []
        for loc in self.local:
            for rest in itertools.product((0, 1), repeat=len(outside)):
                x = [0] * self.n
                for i, b in zip(self.support, loc):
                    x[i] = b
                for i, b in zip(outside, rest):
                    x[i] = b
                words.append(tuple(x))
        return sorted(words)

    def __contains__(self, x) -> bool:
        return sum(int(x[i]) for i in self.support) % 2 == 0


def even_weight_words(length: int) -> list[tuple[int, ...]]:
    return [w for w in itertools.product((0, 1), repeat=length) if sum(w) % 2 == 0]


def local_codes(H, j: int) -> LocalCode:
    H = as_matrix(H)
    if not 0 <= j < H.m:
        raise IndexError(f"check index {j} out of range")
    supp = H.checks[j]
    return LocalCode(H.n, supp, tuple(even_weight_words(len(supp))))


# ---------------------------------------------------------------- graph metrics

def girth(T) -> float:
    """Length of the shortest cycle, ``math.inf`` for a forest."""
    G = _graph(T)
    best = math.inf
    for s in range(G.num_nodes):
        dist = [-1] * G.num_nodes
        parent = [-1] * G.num_nodes
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v in G.neighbors(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def diameter(T) -> float:
    G = _graph(T)
    far = 0
    for s in range(G.num_nodes):
        d = max(G.bfs_distances(s))
        if d == math.inf:
            return math.inf
        far = max(far, d)
    return far


def is_stopping_set(T, S: Iterable[int]) -> bool:
    """Every check adjacent to ``S`` sees at least two of its bits."""
    G = _graph(T)
    S = set(S)
    for i in S:
        if not 0 <= i < G.H.n:
            raise IndexError(f"bit index {i} out of range")
    return all(sum(1 for i in row if i in S) != 1 for row in G.H.checks)


def near_codeword_params(H, x) -> tuple[int, int]:
    H = as_matrix(H)
    x = np.asarray(x, dtype=np.int64)
    return int(x.sum()), int(H.syndrome(x).sum())


def redundant_expansion(H, r: int, limits: Limits = DEFAULT_LIMITS) -> ParityCheckMatrix:
    """All distinct nonzero GF(2) sums of at most ``r`` distinct rows of ``H``."""
    H = as_matrix(H)
    if r < 1:
        raise ValueError("r must be >= 1")
    r = min(r, H.m)
    total = sum(math.comb(H.m, k) for k in range(1, r + 1))
    if total > limits.redundant_rows:
        raise LimitExceeded(f"{total} candidate rows exceed limit {limits.redundant_rows}")
    seen: dict[bytes, np.ndarray] = {}
    for k in range(1, r + 1):
        for combo in itertools.combinations(range(H.m), k):
            row = np.bitwise_xor.reduce(H.entries[list(combo)], axis=0)
            if row.any():
                seen.setdefault(row.tobytes(), row)
    return ParityCheckMatrix(np.array(list(seen.values())))


def spanning_tree_edges(H) -> set[tuple[int, int]]:
    """(check, bit) edges of a BFS spanning forest of the Tanner graph."""
    H = as_matrix(H)
    G = TannerGraph(H)
    seen = [False] * G.num_nodes
    tree = set()
    for s in range(G.num_nodes):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in G.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
                    tree.add((v - H.n, u) if u < H.n else (u - H.n, v))
    return tree


def from_rows(rows: Sequence[str | Sequence[int]]) -> ParityCheckMatrix:
    """Build a matrix from strings like "1101" or integer sequences."""
    return ParityCheckMatrix(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8))


def random_regular(n: int, w_col: int, w_row: int, seed: int, attempts: int = 200) -> ParityCheckMatrix:
    """Random (w_col, w_row)-regular matrix without 4-cycles.

    Bits are attached one at a time; each new edge goes to a random
    least-filled check that shares no bit with the checks already chosen for
    the current bit. Restarts from a fresh stream when it gets stuck.
    """
    if (n * w_col) % w_row:
        raise ValueError("n * w_col must be divisible by w_row")
    m = n * w_col // w_row
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(attempts):
        fill = np.zeros(m, dtype=np.int64)
        members: list[set[int]] = [set() for _ in range(m)]
        H = np.zeros((m, n), dtype=np.uint8)
        ok = True
        for i in rng.permutation(n):
            banned: set[int] = set()
            for _ in range(w_col):
                cand = [j for j in range(m) if fill[j] < w_row and j not in banned]
                if not cand:
                    ok = False
                    break
                low = min(fill[j] for j in cand)
                j = int(rng.choice([j for j in cand if fill[j] == low]))
                H[j, i] = 1
                fill[j] += 1
                members[j].add(int(i))
                banned.add(j)
                # any check sharing a bit with j would close a 4-cycle through i
                for b in members[j]:
                    banned.update(np.flatnonzero(H[:, b]).tolist())
            if not ok:
                break
        if ok:
            return ParityCheckMatrix(H)
    raise RuntimeError("could not build a 4-cycle-free regular matrix; try another seed")
