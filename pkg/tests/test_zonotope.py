from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from hmskit.zonotope import (
    Zonotope,
    cover_inverse,
    cover_matrix,
    lift_zonotopes,
    lp_maximize,
    pairwise_lift_overlaps,
    polygon_vertices,
    root_argument,
    self_intersection_check,
    thimble_point,
    thimble_point_disjoint,
    unlifted_self_intersection,
    unlifted_zonotope,
    zonotope_contains,
)

small = st.integers(-3, 3)


@given(
    st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3),
    st.lists(st.integers(0, 5), min_size=3, max_size=3),
    st.lists(small, min_size=4, max_size=4),
)
def test_lp_matches_scipy(A, b, c):
    b = b[: len(A)]
    # bound the feasible region so the comparison is about optima, not unboundedness
    A = A + [[1, 1, 1, 1]]
    b = b + [5]
    # slack variables turn A x <= b into the equality form
    slack = [row + [int(i == j) for j in range(len(A))] for i, row in enumerate(A)]
    ours = lp_maximize(slack, b, c + [0] * len(A))
    ref = linprog(-np.array(c), A_ub=np.array(A), b_ub=np.array(b), bounds=[(0, None)] * 4, method="highs")
    if ref.status == 2:
        assert ours.status == "infeasible"
    else:
        assert ours.status == "optimal"
        assert float(ours.value) == pytest.approx(-ref.fun, abs=1e-7)


def test_lp_statuses():
    assert lp_maximize([[1, 1]], [-1], [1, 0]).status == "infeasible"
    assert lp_maximize([[1, -1]], [0], [1, 0]).status == "unbounded"
    res = lp_maximize([[1, 1]], [2], [1, 2])
    assert res.status == "optimal" and res.value == 4


def _hull_status(Z, p):
    verts = []
    for signs in itertools.product((0, 1), repeat=len(Z.generators)):
        verts.append([float(b + sum(s * g[i] for s, g in zip(signs, Z.generators))) for i, b in enumerate(Z.base)])
    hull = ConvexHull(np.array(verts))
    worst = max(float(eq[:-1] @ np.array([float(x) for x in p]) + eq[-1]) for eq in hull.equations)
    if worst < -1e-9:
        return "interior"
    if worst <= 1e-9:
        return "boundary"
    return "outside"


@given(st.integers(-12, 12), st.integers(-12, 12))
def test_membership_matches_convex_hull(a, b):
    Z = unlifted_zonotope(1)
    p = (Fraction(a, 6), Fraction(b, 6))
    assert zonotope_contains(Z, p) == _hull_status(Z, p)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
def test_membership_matches_convex_hull_3d(a, b, c):
    Z = lift_zonotopes(2)[0]
    p = tuple(Z.center[i] + Fraction(x, 6) for i, x in enumerate((a, b, c)))
    assert zonotope_contains(Z, p) == _hull_status(Z, p)


def test_base_point_of_centred_lift_is_interior():
    # the generators sum to zero, so the base point is the centre
    Z = lift_zonotopes(1)[0]
    assert Z.base == Z.center
    assert zonotope_contains(Z, Z.base) == "interior"
    square = Zonotope(((1, 0), (0, 1)), (0, 0))
    assert zonotope_contains(square, (0, 0)) == "boundary"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cover_matrices_are_inverse(n):
    M, inv = cover_matrix(n), cover_inverse(n)
    d = n + 1
    prod = [[sum(M[i][k] * inv[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    assert prod == [[int(i == j) for j in range(d)] for i in range(d)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lifts_embed(n):
    assert self_intersection_check(n).embedded


@pytest.mark.parametrize("n", [1, 2])
def test_unlifted_touches_itself_at_vertices(n):
    res = unlifted_self_intersection(n)
    assert not res.embedded
    assert not res.interior_overlap


def test_distinct_lifts_only_touch():
    assert set(pairwise_lift_overlaps(1).values()) == {"boundary"}


def test_planar_areas():
    assert [Z.area() for Z in lift_zonotopes(1)] == [1, 1, 1]
    assert unlifted_zonotope(1).area() == 3
    assert len(polygon_vertices(lift_zonotopes(1)[0])) == 6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_thimble_points_follow_angle_criterion(n):
    m = n + 2
    excluded = {Fraction(n + 1, m), -Fraction(n + 1, m)}
    for i in range(m):
        assert thimble_point_disjoint(n, i) == (root_argument(n, i) not in excluded)
        assert len(thimble_point(n, i)) == n + 1


def test_three_of_five_disjoint_at_n3():
    assert sum(thimble_point_disjoint(3, i) for i in range(5)) == 3
