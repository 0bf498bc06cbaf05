from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from _codes import DUMBBELL, FOUR_TWO, PATH, SINGLE_CHECK, SMALL, THREE_BIT, TWO_RAYS, matrix
from pseudocodewords.code_model import ParityCheckMatrix, from_rows, is_stopping_set
from pseudocodewords.fundamental_polytope import (
    PseudoCodeword, build_cone, build_polytope, cone_membership_forms, is_unscaled_pseudocodeword,
    minimal_pseudocodewords, polytope_json, polytope_vertices, redundancy_invariance_check,
    tree_polytope_check, vector_json,
)
from pseudocodewords.rational_geometry import HPolyhedron, contains
from strategies import forests, parity_checks

FROZEN = json.loads(Path(__file__).with_name("frozen_oracles.json").read_text())


def support(v):
    return frozenset(i for i, x in enumerate(v) if x != 0)


class TestConstruction:
    @given(parity_checks(max_n=8, max_m=5))
    def test_constraint_counts(self, H):
        P = ParityCheckMatrix(H)
        rows = P.row_weights()
        assert len(build_polytope(P).poly.A) == 2 * P.n + sum(2 ** (w - 1) for w in rows)
        assert len(build_cone(P).poly.A) == P.n + sum(rows)

    @given(parity_checks(max_n=7, max_m=4))
    def test_cone_rows_are_homogeneous_polytope_rows(self, H):
        P = build_polytope(ParityCheckMatrix(H)).poly
        K = build_cone(ParityCheckMatrix(H)).poly
        homogeneous = {tuple(a) for a, b in zip(P.A, P.b) if b == 0}
        assert {tuple(a) for a in K.A} == homogeneous

    @given(parity_checks(max_n=8))
    def test_codewords_inside(self, H):
        P = ParityCheckMatrix(H)
        poly, cone = build_polytope(P), build_cone(P)
        for w in oracles.codewords(H):
            assert w in poly and w in cone

    def test_three_bit_segment(self):
        P = build_polytope(from_rows(THREE_BIT))
        for k in range(0, 11):
            t = F(k, 15)
            assert ((t, t, t) in P) == (t <= F(2, 3))
        assert (F(1, 3), F(1, 3), F(1, 4)) not in P

    def test_single_check_hull(self):
        assert polytope_vertices(from_rows(SINGLE_CHECK)) == [tuple(map(F, w)) for w in oracles.even_words(3)]

    def test_degenerate_checks(self):
        P = build_polytope(from_rows(["100", "011"]))
        assert (0, F(1, 3), F(1, 3)) in P
        assert (F(1, 10), 0, 0) not in P
        assert (0, F(1, 3), F(1, 2)) not in P

    def test_row_weight_limit(self):
        from pseudocodewords.code_model import LimitExceeded
        from pseudocodewords.limits import Limits

        with pytest.raises(LimitExceeded):
            build_polytope(from_rows(["1111111"]), Limits(max_row_weight=6))

    def test_json(self):
        P = build_polytope(from_rows(THREE_BIT))
        data = json.loads(json.dumps(polytope_json(P)))
        assert set(data) == {"n", "ineqs", "eqs"} and data["n"] == 3
        assert HPolyhedron.from_json(data) == P.poly
        assert vector_json([F(2, 3), 0, 1]) == ["2/3", "0", "1"]


class TestDumbbell:
    H = from_rows(DUMBBELL)

    def test_vertices(self):
        V = polytope_vertices(self.H)
        half = F(1, 2)
        assert len(V) == 5
        assert (half, half, half, 1, half, half, half) in V

    @staticmethod
    def closed_form(w):
        a, c, d = w[1], w[5], w[3]
        return (w[0] == w[1] == w[2] and w[4] == w[5] == w[6]
                and 0 <= a <= 1 and 0 <= c <= 1 and 0 <= d <= 2 * min(a, 1 - a, c, 1 - c))

    def test_convex_combinations_satisfy_closed_form(self):
        V = polytope_vertices(self.H)
        rng = random.Random(8)
        for _ in range(200):
            wts = [F(rng.randint(0, 9)) for _ in V]
            if not any(wts):
                continue
            s = sum(wts)
            w = tuple(sum(t / s * v[i] for t, v in zip(wts, V)) for i in range(7))
            assert self.closed_form(w)

    def test_closed_form_points_are_inside(self):
        P = build_polytope(self.H)
        rng = random.Random(9)
        for _ in range(200):
            a, c = F(rng.randint(0, 12), 12), F(rng.randint(0, 12), 12)
            cap = 2 * min(a, 1 - a, c, 1 - c)
            d = cap * F(rng.randint(0, 6), 6)
            assert (a, a, a, d, c, c, c) in P
            assert (a, a, a, cap + F(1, 100), c, c, c) not in P
            if a < 1:
                assert (a + F(1, 100), a, a, 0, c, c, c) not in P


class TestLocalHullAgreement:
    @pytest.mark.parametrize("name", sorted(SMALL))
    def test_vertices_match_frozen(self, name):
        V = polytope_vertices(from_rows(SMALL[name]))
        assert sorted(vector_json(v) for v in V) == sorted(FROZEN[name]["vertices"])

    @given(parity_checks(max_n=6, max_m=3))
    def test_vertices_lie_in_local_hulls(self, H):
        for v in polytope_vertices(ParityCheckMatrix(H)):
            assert oracles.in_local_hulls(H, v)

    @given(parity_checks(max_n=6, max_m=3), st.data())
    def test_points_outside_fail_local_hulls(self, H, data):
        x = data.draw(st.lists(st.integers(0, 6), min_size=H.shape[1], max_size=H.shape[1]))
        x = [F(k, 6) for k in x]
        assert contains(build_polytope(ParityCheckMatrix(H)).poly, x) == oracles.in_local_hulls(H, x)


class TestMinimalPseudocodewords:
    def test_two_rays(self):
        got = minimal_pseudocodewords(from_rows(TWO_RAYS))
        assert [p.coords for p in got] == [(1, 1, 2, 2), (2, 2, 1, 1)]
        assert all(p.kind == "ray" for p in got)

    def test_three_bit(self):
        assert [p.coords for p in minimal_pseudocodewords(from_rows(THREE_BIT))] == [(1, 1, 1)]

    def test_dumbbell(self):
        got = {p.coords for p in minimal_pseudocodewords(from_rows(DUMBBELL))}
        assert got == {(0, 0, 0, 0, 1, 1, 1), (1, 1, 1, 0, 0, 0, 0), (1, 1, 1, 2, 1, 1, 1)}

    @pytest.mark.parametrize("name", sorted(SMALL))
    def test_scaled_rays_are_unscaled_pseudocodewords(self, name):
        H = from_rows(SMALL[name])
        for p in minimal_pseudocodewords(H):
            z = [int(v) for v in p.coords]
            assert is_unscaled_pseudocodeword(H, [2 * v for v in z])

    def test_pseudocodeword_validation(self):
        with pytest.raises(ValueError):
            PseudoCodeword((1, -1), "ray")
        with pytest.raises(ValueError):
            PseudoCodeword((1, 1), "vertex")


class TestUnscaled:
    H = from_rows(FOUR_TWO)

    def test_examples(self):
        assert is_unscaled_pseudocodeword(self.H, (2, 2, 2, 0))
        assert not is_unscaled_pseudocodeword(self.H, (1, 0, 0, 0))

    def test_codewords(self):
        for name, rows in SMALL.items():
            for w in oracles.codewords(matrix(rows)):
                assert is_unscaled_pseudocodeword(from_rows(rows), w)

    def test_cone_point_with_wrong_parity(self):
        # in the cone, but the middle check would see an odd count in every cover
        H = from_rows(THREE_BIT)
        assert contains(build_cone(H).poly, (1, 1, 1))
        assert not is_unscaled_pseudocodeword(H, (1, 1, 1))
        assert is_unscaled_pseudocodeword(H, (2, 2, 2))

    def test_errors(self):
        with pytest.raises(ValueError):
            is_unscaled_pseudocodeword(self.H, (1, 1, -1, 0))
        with pytest.raises(ValueError):
            is_unscaled_pseudocodeword(self.H, (F(1, 2), 0, 0, 0))


class TestTree:
    def test_examples(self):
        assert tree_polytope_check(from_rows(SINGLE_CHECK))
        assert tree_polytope_check(from_rows(PATH))

    @given(forests(max_n=7))
    def test_forests(self, H):
        assert tree_polytope_check(ParityCheckMatrix(H))

    def test_refuses_cycles(self):
        with pytest.raises(ValueError):
            tree_polytope_check(from_rows(THREE_BIT))


class TestRedundancy:
    def test_dumbbell_r2(self):
        assert redundancy_invariance_check(from_rows(DUMBBELL), 2)

    @pytest.mark.parametrize("name", ["three_bit", "four_two", "two_rays", "path"])
    def test_r1(self, name):
        assert redundancy_invariance_check(from_rows(SMALL[name]), 1)

    def test_three_bit_r2_shrinks(self):
        # girth 4: pairwise sums add 101, which cuts off the fractional vertex
        assert not redundancy_invariance_check(from_rows(THREE_BIT), 2)


def _random_vectors(H, count, seed):
    rng = random.Random(seed)
    rays = [p.coords for p in minimal_pseudocodewords(H)]
    out = []
    for k in range(count):
        if k % 2 == 0 or not rays:
            out.append([F(rng.randint(0, 6), rng.randint(1, 4)) for _ in range(H.n)])
        else:
            # conic combinations of rays, nudged so both sides of the boundary are hit
            coef = [rng.randint(0, 3) for _ in rays]
            w = [sum(a * r[i] for a, r in zip(coef, rays)) for i in range(H.n)]
            i = rng.randrange(H.n)
            w[i] = max(F(0), w[i] + F(rng.choice([-1, 0, 1]), rng.randint(1, 3)))
            out.append(w)
    return out


@pytest.mark.parametrize("name", sorted(SMALL))
def test_five_cone_forms_agree(name):
    H = from_rows(SMALL[name])
    seen = set()
    for w in _random_vectors(H, 1000, seed=len(name)):
        forms = cone_membership_forms(H, w)
        assert len(forms) == 5
        verdict = set(forms.values())
        assert len(verdict) == 1, (w, forms)
        assert verdict == {oracles.in_cone_sum_of_others(matrix(SMALL[name]), w)}
        seen |= verdict
    assert seen == {True, False}


@pytest.mark.parametrize("name", sorted(SMALL))
def test_stopping_sets_are_polytope_supports(name):
    H = from_rows(SMALL[name])
    V = polytope_vertices(H)
    for k in range(H.n + 1):
        for S in itertools.combinations(range(H.n), k):
            S = frozenset(S)
            # the face {w_i = 0 outside S} has a point with support S iff its vertices cover S
            reach = frozenset().union(*[support(v) for v in V if support(v) <= S])
            assert (reach == S) == is_stopping_set(H, S) == oracles.is_stopping_set(matrix(SMALL[name]), S)


@given(parity_checks(max_n=6, max_m=3))
def test_vertex_supports_are_stopping_sets(H):
    P = ParityCheckMatrix(H)
    for v in polytope_vertices(P):
        assert is_stopping_set(P, support(v))
