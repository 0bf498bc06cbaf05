"""Exact rational polyhedral computation.

Polyhedra are stored in H-representation with integer data. Every routine in
this module works over :class:`fractions.Fraction`; a floating objective is
accepted by :func:`lp_minimize` (constraint data stay exact, only reduced
costs become floats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .limits import DEFAULT_LIMITS, Limits

Rat = Fraction
RatVec = tuple[Fraction, ...]


class EmptyPolyhedron(ValueError):
    pass


class Unbounded(ValueError):
    pass


class NotPointed(ValueError):
    pass


class SizeLimit(RuntimeError):
    pass


def _int_row(a) -> tuple[int, ...]:
    out = []
    for v in a:
        if isinstance(v, bool) or int(v) != v:
            raise ValueError(f"constraint coefficients must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class HPolyhedron:
    """{x : A x <= b, E x = f} with integer coefficients."""

    n: int
    A: tuple[tuple[int, ...], ...] = ()
    b: tuple[int, ...] = ()
    E: tuple[tuple[int, ...], ...] = ()
    f: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(_int_row(r) for r in self.A))
        object.__setattr__(self, "E", tuple(_int_row(r) for r in self.E))
        object.__setattr__(self, "b", _int_row(self.b))
        object.__setattr__(self, "f", _int_row(self.f))
        if len(self.A) != len(self.b) or len(self.E) != len(self.f):
            raise ValueError("row count and right-hand-side length differ")
        for r in self.A + self.E:
            if len(r) != self.n:
                raise ValueError(f"constraint of length {len(r)} in dimension {self.n}")

    @property
    def num_constraints(self) -> int:
        return len(self.A) + len(self.E)

    def is_cone(self) -> bool:
        return not any(self.b) and not any(self.f)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ineqs": [{"a": list(a), "b": b} for a, b in zip(self.A, self.b)],
            "eqs": [{"a": list(a), "b": b} for a, b in zip(self.E, self.f)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HPolyhedron":
        return cls(
            n=data["n"],
            A=[c["a"] for c in data["ineqs"]], b=[c["b"] for c in data["ineqs"]],
            E=[c["a"] for c in data.get("eqs", [])], f=[c["b"] for c in data.get("eqs", [])],
        )


def unit_cube(n: int) -> HPolyhedron:
    A, b = [], []
    for i in range(n):
        e = [0] * n
        e[i] = -1
        A.append(e)
        b.append(0)
        e = [0] * n
        e[i] = 1
        A.append(e)
        b.append(1)
    return HPolyhedron(n, A, b)


def orthant(n: int) -> HPolyhedron:
    return HPolyhedron(n, [[-int(i == k) for i in range(n)] for k in range(n)], [0] * n)


def to_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def to_ratvec(x: Iterable) -> RatVec:
    return tuple(to_rat(v) for v in x)


def fmt_rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _dot(a: Sequence, x: Sequence):
    return sum(ai * xi for ai, xi in zip(a, x) if ai)


def contains(P: HPolyhedron, x) -> bool:
    """Exact membership test."""
    x = to_ratvec(x)
    if len(x) != P.n:
        raise ValueError(f"dimension mismatch: {len(x)} vs {P.n}")
    return all(_dot(a, x) <= b for a, b in zip(P.A, P.b)) and all(
        _dot(e, x) == f for e, f in zip(P.E, P.f))


def active_constraints(P: HPolyhedron, x) -> list[int]:
    """Indices of inequality rows tight at ``x``."""
    x = to_ratvec(x)
    return [k for k, (a, b) in enumerate(zip(P.A, P.b)) if _dot(a, x) == b]


def rank(rows: Sequence[Sequence]) -> int:
    M = [[Fraction(v) for v in r] for r in rows]
    return len(_rref(M)[1])


def _rref(M: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns the matrix and pivot columns."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((k for k in range(r, rows) if M[k][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for k in range(rows):
            if k != r and M[k][c] != 0:
                fac = M[k][c]
                M[k] = [vk - fac * vr for vk, vr in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:r], pivots


def solve_unique(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> RatVec | None:
    """Solve a square-or-tall exact system; None unless the solution is unique."""
    n = len(rows[0])
    M = [[Fraction(v) for v in r] + [Fraction(h)] for r, h in zip(rows, rhs)]
    R, piv = _rref(M)
    if n in piv:
        return None  # inconsistent
    if len(piv) != n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(R, piv):
        x[c] = row[n]
    return tuple(x)


def nullspace(rows: Sequence[Sequence]) -> list[RatVec]:
    n = len(rows[0])
    R, piv = _rref([[Fraction(v) for v in r] for r in rows])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[fcol]
        basis.append(tuple(v))
    return basis


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers (sign preserved)."""
    v = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        return tuple(ints)
    return tuple(k // g for k in ints)


# ---------------------------------------------------------------- simplex

class _Tableau:
    """Dense simplex tableau over Fractions; the last column is the rhs."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.T = rows
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        inv = 1 / T[r][c]
        T[r] = [v * inv for v in T[r]]
        pr = T[r]
        for k in range(len(T)):
            if k != r:
                fac = T[k][c]
                if fac != 0:
                    T[k] = [a - fac * b for a, b in zip(T[k], pr)]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence) -> list:
        cb = [cost[b] for b in self.basis]
        out = list(cost)
        for i, row in enumerate(self.T):
            ci = cb[i]
            if ci:
                for j in range(self.ncols):
                    if row[j]:
                        out[j] = out[j] - ci * row[j]
        return out

    def value(self, cost: Sequence):
        return sum(cost[b] * row[-1] for b, row in zip(self.basis, self.T))

    def run(self, cost: Sequence, allowed: set[int] | None = None, tol: float = 0.0) -> list:
        """Bland's rule until optimal; returns final reduced costs."""
        while True:
            rc = self.reduced_costs(cost)
            basic = set(self.basis)
            enter = next((j for j in range(self.ncols)
                          if j not in basic and (allowed is None or j in allowed) and rc[j] < -tol), None)
            if enter is None:
                return rc
            best = None
            for i, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective unbounded below")
            self.pivot(best[1], enter)

    def solution(self) -> list[Fraction]:
        x = [Fraction(0)] * self.ncols
        for b, row in zip(self.basis, self.T):
            x[b] = row[-1]
        return x


@dataclass
class _StandardForm:
    tab: _Tableau
    # original variable i  ->  list of (column, sign)
    var_cols: list[list[tuple[int, int]]]
    n_struct: int

    def x(self) -> RatVec:
        sol = self.tab.solution()
        return tuple(sum((s * sol[c] for c, s in cols), Fraction(0)) for cols in self.var_cols)

    def column_cost(self, c: Sequence) -> list:
        cost = [0] * self.tab.ncols
        for i, cols in enumerate(self.var_cols):
            for col, s in cols:
                cost[col] = s * c[i]
        return cost


def _standard_form(P: HPolyhedron) -> _StandardForm:
    n = P.n
    nonneg = set()
    for a, b in zip(P.A, P.b):
        nz = [k for k, v in enumerate(a) if v]
        if len(nz) == 1 and a[nz[0]] < 0 and b == 0:
            nonneg.add(nz[0])
    var_cols: list[list[tuple[int, int]]] = []
    ncol = 0
    for i in range(n):
        if i in nonneg:
            var_cols.append([(ncol, 1)])
            ncol += 1
        else:
            var_cols.append([(ncol, 1), (ncol + 1, -1)])
            ncol += 2
    n_struct = ncol
    rows_spec = []  # (coeffs over x, rhs, has_slack)
    for a, b in zip(P.A, P.b):
        nz = [k for k, v in enumerate(a) if v]
        if len(nz) == 1 and a[nz[0]] < 0 and b == 0:
            continue
        rows_spec.append((a, b, True))
    for e, f in zip(P.E, P.f):
        rows_spec.append((e, f, False))
    n_slack = sum(1 for r in rows_spec if r[2])
    n_art = sum(1 for a, b, s in rows_spec if not s or b < 0)
    width = n_struct + n_slack + n_art
    T, basis = [], []
    slack_col, art_col = n_struct, n_struct + n_slack
    for a, b, has_slack in rows_spec:
        row = [Fraction(0)] * (width + 1)
        for i, v in enumerate(a):
            if v:
                for col, s in var_cols[i]:
                    row[col] = Fraction(s * v)
        if has_slack:
            row[slack_col] = Fraction(1)
        row[-1] = Fraction(b)
        sign = 1
        if b < 0:
            row = [-v for v in row]
            sign = -1
        if has_slack and sign == 1:
            basis.append(slack_col)
        else:
            row[art_col] = Fraction(1)
            basis.append(art_col)
            art_col += 1
        if has_slack:
            slack_col += 1
        T.append(row)
    tab = _Tableau(T, basis, width)
    first_art = n_struct + n_slack
    if n_art:
        cost = [0] * first_art + [1] * n_art
        tab.run(cost)
        if tab.value(cost) > 0:
            raise EmptyPolyhedron("polyhedron is empty")
        # drive artificials out of the basis or drop redundant rows
        r = 0
        while r < len(tab.T):
            if tab.basis[r] >= first_art:
                c = next((j for j in range(first_art) if tab.T[r][j] != 0), None)
                if c is None:
                    del tab.T[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, c)
            r += 1
        tab.T = [row[:first_art] + [row[-1]] for row in tab.T]
        tab.ncols = first_art
    return _StandardForm(tab, var_cols, n_struct)


def _is_rational_vector(c: Sequence) -> bool:
    return all(isinstance(v, Rational) for v in c)


def _lex_extreme(sf: _StandardForm, allowed: set[int], n: int, tol: float, sign: int) -> RatVec:
    """Lexicographic min (sign=+1) or max (sign=-1) over the face spanned by ``allowed``."""
    allowed = set(allowed)
    for k in range(n):
        e = [0] * n
        e[k] = sign
        cost = sf.column_cost(e)
        rc = sf.tab.run(cost, allowed=allowed, tol=0)
        basic = set(sf.tab.basis)
        allowed -= {j for j in allowed if j not in basic and rc[j] > 0}
    return sf.x()


def lp_minimize(P: HPolyhedron, c: Sequence, tie_tol: float = 1e-9) -> tuple[object, RatVec, bool]:
    """Minimize ``c . x`` over ``P`` with Bland's rule.

    Returns ``(value, vertex, tie)``. The vertex is the lexicographically
    smallest optimal vertex; ``tie`` is set when the optimal face has
    dimension at least one. The value is exact when ``c`` is rational.
    """
    if len(c) != P.n:
        raise ValueError("objective length mismatch")
    exact = _is_rational_vector(c)
    c = [Fraction(v) for v in c] if exact else [float(v) for v in c]
    tol = 0.0 if exact else tie_tol * max(1.0, max(abs(v) for v in c))
    sf = _standard_form(P)
    cost = sf.column_cost(c)
    rc = sf.tab.run(cost, tol=tol)
    basic = set(sf.tab.basis)
    ncols = sf.tab.ncols
    face = {j for j in range(ncols) if j in basic or abs(rc[j]) <= tol}
    if all(j in basic for j in face):
        x = sf.x()
        tie = False
    else:
        saved = ([row[:] for row in sf.tab.T], sf.tab.basis[:])
        x = _lex_extreme(sf, face, P.n, tol, +1)
        sf.tab.T, sf.tab.basis = saved
        xmax = _lex_extreme(sf, face, P.n, tol, -1)
        tie = xmax != x
    value = sum(ci * xi for ci, xi in zip(c, x)) if exact else float(sum(ci * float(xi) for ci, xi in zip(c, x)))
    return value, x, tie


def feasible_point(P: HPolyhedron) -> RatVec:
    return lp_minimize(P, [0] * P.n)[1]


# ---------------------------------------------------------------- enumeration

def _reduce_int(state: list[tuple[int, list[int]]], row: list[int]) -> tuple[int, list[int]] | None:
    """Fraction-free elimination of ``row`` (coefficients + rhs) against an echelon state.

    Returns (pivot column, reduced row), or None when the coefficient part
    vanishes (the row depends on the state).
    """
    r = list(row)
    for c, p in state:
        if r[c]:
            a, b = p[c], r[c]
            r = [a * x - b * y for x, y in zip(r, p)]
            g = math.gcd(*r)
            if g > 1:
                r = [x // g for x in r]
    for c, v in enumerate(r[:-1]):
        if v:
            return c, r
    return None


def _back_substitute(state: list[tuple[int, list[int]]], n: int) -> RatVec:
    x = [Fraction(0)] * n
    for c, p in sorted(state, key=lambda t: -t[0]):
        acc = Fraction(p[-1]) - sum((p[k] * x[k] for k in range(c + 1, n) if p[k]), Fraction(0))
        x[c] = acc / p[c]
    return tuple(x)


def _feasible_int(P: HPolyhedron, x: RatVec) -> bool:
    den = 1
    for v in x:
        den = den * v.denominator // math.gcd(den, v.denominator)
    num = [int(v * den) for v in x]
    return all(sum(a * v for a, v in zip(row, num) if a) <= b * den for row, b in zip(P.A, P.b)) and all(
        sum(e * v for e, v in zip(row, num) if e) == f * den for row, f in zip(P.E, P.f))


def _independent_subsets(base: list, rows: list[list[int]], need: int):
    """Yield echelon states for every ``need``-subset of ``rows`` independent of ``base``.

    Subsets are walked depth-first with an incremental integer echelon form,
    so a dependent prefix prunes all of its extensions.
    """
    stack = [(0, base, 0)]
    while stack:
        start, state, depth = stack.pop()
        if depth == need:
            yield state
            continue
        for k in range(len(rows) - (need - depth), start - 1, -1):
            red = _reduce_int(state, rows[k])
            if red is not None:
                stack.append((k + 1, state + [red], depth + 1))


def _vertices_by_subsets(P: HPolyhedron) -> set[RatVec]:
    """Every n-subset of tight rows with a unique exact solution, checked for feasibility."""
    n = P.n
    base: list[tuple[int, list[int]]] = []
    for e, f in zip(P.E, P.f):
        red = _reduce_int(base, list(e) + [f])
        if red is not None:
            base.append(red)
    rows = [list(a) + [b] for a, b in zip(P.A, P.b)]
    out: set[RatVec] = set()
    for state in _independent_subsets(base, rows, n - len(base)):
        x = _back_substitute(state, n)
        if _feasible_int(P, x):
            out.add(x)
    return out


def _dd_rays(rows: Sequence[Sequence[int]], d: int, max_rays: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {y : R y <= 0} by double description."""
    rows = [tuple(int(v) for v in r) for r in rows]
    # initial basis: first d linearly independent rows
    chosen: list[int] = []
    M: list[list[Fraction]] = []
    for k, r in enumerate(rows):
        trial = M + [[Fraction(v) for v in r]]
        if len(_rref([row[:] for row in trial])[1]) > len(M):
            M = trial
            chosen.append(k)
            if len(chosen) == d:
                break
    if len(chosen) < d:
        raise NotPointed("cone contains a line (constraint matrix rank < dimension)")
    # columns of -A_S^{-1}: solve A_S r_k = -e_k
    rays: list[tuple[int, ...]] = []
    zero: list[int] = []
    AS = [rows[k] for k in chosen]
    for k in range(d):
        rhs = [0] * d
        rhs[k] = -1
        sol = solve_unique(AS, rhs)
        rays.append(primitive(sol))
    done = list(chosen)

    def zset(r):
        z = 0
        for idx in done:
            if _dot(rows[idx], r) == 0:
                z |= 1 << idx
        return z

    zero = [zset(r) for r in rays]
    for idx in range(len(rows)):
        if idx in chosen:
            continue
        a = rows[idx]
        s = [_dot(a, r) for r in rays]
        pos = [k for k, v in enumerate(s) if v > 0]
        neg = [k for k, v in enumerate(s) if v < 0]
        if not pos:
            done.append(idx)
            bit = 1 << idx
            zero = [z | bit if sv == 0 else z for z, sv in zip(zero, s)]
            continue
        new_rays, new_zero = [], []
        keep = [k for k in range(len(rays)) if s[k] <= 0]
        for p in pos:
            for q in neg:
                common = zero[p] & zero[q]
                if bin(common).count("1") < d - 2:
                    continue
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and (zero[k] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                v = tuple(s[p] * yq - s[q] * yp for yp, yq in zip(rays[p], rays[q]))
                v = primitive(v)
                new_rays.append(v)
                new_zero.append(common | (1 << idx))
        bit = 1 << idx
        rays = [rays[k] for k in keep] + new_rays
        zero = [zero[k] | bit if s[k] == 0 else zero[k] for k in keep] + new_zero
        done.append(idx)
        if len(rays) > max_rays:
            raise SizeLimit(f"double description exceeded {max_rays} intermediate rays")
    return sorted(set(rays))


def _homogenized(P: HPolyhedron) -> list[tuple[int, ...]]:
    rows = []
    for e, f in zip(P.E, P.f):
        rows.append(tuple(e) + (-f,))
        rows.append(tuple(-v for v in e) + (f,))
    rows.append((0,) * P.n + (-1,))
    for a, b in zip(P.A, P.b):
        rows.append(tuple(a) + (-b,))
    return rows


def _vertices_by_dd(P: HPolyhedron, limits: Limits) -> set[RatVec]:
    rays = _dd_rays(_homogenized(P), P.n + 1, limits.dd_max_rays)
    if not any(r[-1] > 0 for r in rays):
        raise EmptyPolyhedron("polyhedron is empty")
    out = set()
    for r in rays:
        t = r[-1]
        if t == 0:
            raise Unbounded("polyhedron has a recession direction")
        out.add(tuple(Fraction(v, t) for v in r[:-1]))
    return out


def subset_count(P: HPolyhedron) -> int:
    eq_rank = rank(P.E) if P.E else 0
    return math.comb(len(P.A), max(P.n - eq_rank, 0))


def enumerate_vertices(P: HPolyhedron, limits: Limits = DEFAULT_LIMITS, method: str = "auto") -> list[RatVec]:
    """All vertices of a bounded polyhedron, sorted lexicographically.

    ``method`` is "subsets", "dd" or "auto" (subsets while the number of
    candidate constraint subsets stays within ``limits.subset_enumeration``).
    """
    if P.n > limits.vertex_n:
        raise SizeLimit(f"dimension {P.n} exceeds vertex-enumeration limit {limits.vertex_n}")
    if method == "auto":
        method = "subsets" if subset_count(P) <= limits.subset_enumeration else "dd"
    if method == "subsets":
        verts = _vertices_by_subsets(P)
        if verts:
            for i in range(P.n):
                for sgn in (1, -1):
                    e = [0] * P.n
                    e[i] = sgn
                    lp_minimize(P, e)  # raises Unbounded
    elif method == "dd":
        verts = _vertices_by_dd(P, limits)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(verts)


def _cone_rows(K: HPolyhedron) -> list[tuple[int, ...]]:
    if not K.is_cone():
        raise ValueError("not a cone: right-hand sides must be zero")
    rows = []
    for e in K.E:
        rows.append(tuple(e))
        rows.append(tuple(-v for v in e))
    rows.extend(tuple(a) for a in K.A)
    return rows


def enumerate_extreme_rays(K: HPolyhedron, limits: Limits = DEFAULT_LIMITS, method: str = "dd") -> list[tuple[int, ...]]:
    """Coprime integer representatives of the extreme rays of a pointed cone."""
    if K.n > limits.vertex_n:
        raise SizeLimit(f"dimension {K.n} exceeds enumeration limit {limits.vertex_n}")
    rows = _cone_rows(K)
    if method == "dd":
        rays = _dd_rays(rows, K.n, limits.dd_max_rays)
    elif method == "subsets":
        if rank(rows) < K.n:
            raise NotPointed("cone contains a line")
        found = set()
        for state in _independent_subsets([], [list(r) + [0] for r in rows], K.n - 1):
            ns = nullspace([p[:-1] for _, p in state])
            for sgn in (1, -1):
                v = primitive([sgn * x for x in ns[0]])
                if all(_dot(r, v) <= 0 for r in rows):
                    found.add(v)
        rays = found
    else:
        raise ValueError(f"unknown method {method!r}")
    # a zero ray only arises for the trivial cone {0}
    return sorted(r for r in set(rays) if any(r))
