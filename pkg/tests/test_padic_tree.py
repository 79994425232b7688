"""Tests for the Bruhat-Tits tree."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from omega_combing.exceptions import ParameterRangeError
from omega_combing.padic_tree import (
    HeightFn,
    TreePoint,
    TreeRoute,
    TreeVertex,
    ball,
    base_vertex,
    bfs_distance,
    busemann,
    height,
    neighbors,
    reduce_mod,
    tree_act,
    tree_distance,
    tree_geodesic,
    tree_point_distance,
    valuation,
)
from omega_combing.psl2_group import ball as group_ball, generating_set


def _walk(p: int, steps: list[int]) -> TreeVertex:
    vertex = base_vertex(p)
    for step in steps:
        options = neighbors(vertex)
        vertex = options[step % len(options)]
    return vertex


walks = st.lists(st.integers(min_value=0, max_value=10), max_size=8)


# ---------------------------------------------------------------------------
# Arithmetic helpers
# ---------------------------------------------------------------------------

class TestValuation:
    """p-adic valuations of rationals."""

    def test_integer(self):
        assert valuation(12, 2) == 2

    def test_fraction(self):
        assert valuation(Fraction(3, 8), 2) == -3

    def test_unit(self):
        assert valuation(7, 3) == 0

    def test_zero(self):
        with pytest.raises(ParameterRangeError):
            valuation(0, 2)


class TestReduceMod:
    """Residues modulo p**a Z_p."""

    def test_integer(self):
        assert reduce_mod(5, 2, 2) == 1

    def test_half(self):
        assert reduce_mod(Fraction(1, 2), 0, 2) == Fraction(1, 2)

    def test_below_precision(self):
        assert reduce_mod(Fraction(1, 2), -1, 2) == 0

    def test_negative(self):
        assert reduce_mod(-1, 3, 3) == 26


# ---------------------------------------------------------------------------
# Vertices
# ---------------------------------------------------------------------------

class TestNeighbors:
    """Local structure of the tree."""

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_degree(self, p):
        assert len(set(neighbors(base_vertex(p)))) == p + 1

    def test_heights(self):
        first, *rest = neighbors(base_vertex(2))
        assert first.height == -1
        assert all(v.height == 1 for v in rest)

    def test_outgoing_of_base(self):
        assert set(neighbors(base_vertex(2))[1:]) == {
            TreeVertex.canonical(1, 0, 2),
            TreeVertex.canonical(1, 1, 2),
        }

    def test_json(self):
        v = TreeVertex.canonical(-2, Fraction(3, 4), 2)
        assert TreeVertex.from_json(v.to_json(), 2) == v


class TestBall:
    """Balls are (p+1)-regular trees."""

    @pytest.mark.parametrize("p", [2, 3])
    def test_size(self, p):
        radius = 5
        assert len(ball(base_vertex(p), radius)) == 1 + (p + 1) * (p**radius - 1) // (p - 1)

    @pytest.mark.parametrize("p", [2, 3])
    def test_acyclic(self, p):
        vertices = ball(base_vertex(p), 5)
        edges = sum(1 for v in vertices for w in neighbors(v) if w in vertices) // 2
        assert edges == len(vertices) - 1

    def test_interior_vertices_regular(self):
        vertices = ball(base_vertex(3), 5)
        for v, depth in vertices.items():
            if depth < 5:
                assert all(w in vertices for w in neighbors(v))


class TestDistance:
    """Closed-form distances against breadth-first search."""

    @given(walks, walks)
    def test_matches_bfs(self, first, second):
        u, v = _walk(2, first), _walk(2, second)
        assert tree_distance(u, v) == bfs_distance(u, v)

    @given(walks, walks)
    def test_geodesic_is_path(self, first, second):
        u, v = _walk(3, first), _walk(3, second)
        path = tree_geodesic(u, v)
        assert path[0] == u
        assert path[-1] == v
        assert len(path) == tree_distance(u, v) + 1
        assert all(b in neighbors(a) for a, b in zip(path, path[1:]))


# ---------------------------------------------------------------------------
# Group action
# ---------------------------------------------------------------------------

class TestTreeAct:
    """Matrices act by isometries."""

    def test_dilation_raises_height_by_two(self):
        moved = tree_act(generating_set(2)["A"], base_vertex(2))
        assert moved == TreeVertex.canonical(2, 0, 2)

    def test_translation_fixes_base(self):
        assert tree_act(generating_set(2)["T"], base_vertex(2)) == base_vertex(2)

    def test_translation_moves_high_vertices(self):
        v = TreeVertex.canonical(1, 0, 2)
        assert tree_act(generating_set(2)["T"], v) == TreeVertex.canonical(1, 1, 2)

    def test_isometry(self):
        vertices = list(ball(base_vertex(2), 3))
        for g in list(group_ball(2, 2))[:40]:
            for u, v in zip(vertices, vertices[5:25]):
                assert tree_distance(tree_act(g, u), tree_act(g, v)) == tree_distance(u, v)

    def test_plain_matrix(self):
        assert tree_act([[2, 0], [0, Fraction(1, 2)]], base_vertex(2)).height == 2


class TestBusemann:
    """Busemann functions toward the ends of the boundary."""

    def test_fixed_end_is_height(self):
        v = TreeVertex.canonical(3, 5, 2)
        assert busemann(v, None) == 3

    @pytest.mark.parametrize("end", [Fraction(0), Fraction(1, 2), Fraction(3), Fraction(-5, 4)])
    def test_vanishes_at_base(self, end):
        assert busemann(base_vertex(2), end) == 0

    @pytest.mark.parametrize("end", [Fraction(0), Fraction(1, 3), Fraction(7)])
    def test_changes_by_one_per_edge(self, end):
        for v in ball(base_vertex(3), 3):
            for w in neighbors(v):
                assert abs(busemann(v, end) - busemann(w, end)) == 1


# ---------------------------------------------------------------------------
# Points on edges and routes
# ---------------------------------------------------------------------------

class TestTreePoint:
    """Normalized points of the metric tree."""

    def test_endpoint_fraction_is_vertex(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        assert TreePoint.on_edge(u, v, 0.0) == TreePoint.at_vertex(u)
        assert TreePoint.on_edge(u, v, 1.0) == TreePoint.at_vertex(v)

    def test_lower_endpoint_first(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        point = TreePoint.on_edge(v, u, 0.25)
        assert point.u == u
        assert point.lam == pytest.approx(0.75)

    def test_fraction_out_of_range(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        with pytest.raises(ParameterRangeError):
            TreePoint.on_edge(u, v, 1.5)

    def test_not_adjacent(self):
        u = base_vertex(2)
        with pytest.raises(ParameterRangeError):
            TreePoint.on_edge(u, TreeVertex.canonical(2, 0, 2), 0.5)

    def test_height(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        assert height(TreePoint.at_vertex(v)) == 1.0
        assert height(TreePoint.on_edge(u, v, 0.5)) == 0.5

    def test_height_fn_relative(self):
        hf = HeightFn(TreeVertex.canonical(1, 0, 2))
        assert hf(base_vertex(2)) == -1.0
        assert hf.busemann(base_vertex(2)) == -0.5

    def test_distance_is_metric(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        assert tree_point_distance(TreePoint.at_vertex(u), TreePoint.at_vertex(v)) == 0.5
        assert tree_point_distance(TreePoint.on_edge(u, v, 0.5), TreePoint.at_vertex(u)) == 0.25

    def test_moved(self):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        moved = TreePoint.on_edge(u, v, 0.5).moved(generating_set(2)["A"])
        assert height(moved) == 2.5


class TestTreeRoute:
    """Routes from the base vertex."""

    def test_to_vertex(self):
        target = TreeVertex.canonical(2, 3, 2)
        route = TreeRoute.to_point(base_vertex(2), TreePoint.at_vertex(target))
        assert route.length == 1.0
        assert route.end == TreePoint.at_vertex(target)

    def test_to_edge_point(self):
        u, v = TreeVertex.canonical(1, 0, 2), TreeVertex.canonical(2, 2, 2)
        route = TreeRoute.to_point(base_vertex(2), TreePoint.on_edge(u, v, 0.5))
        assert route.length == pytest.approx(0.75)
        assert height(route.end) == pytest.approx(1.5)

    def test_height_at(self):
        route = TreeRoute.to_point(base_vertex(2), TreePoint.at_vertex(TreeVertex.canonical(-2, 0, 2)))
        assert route.height_at(0.25) == pytest.approx(-0.5)
        assert route.height_at(1.0) == pytest.approx(-2.0)

    def test_common_prefix(self):
        a = TreeRoute.to_point(base_vertex(2), TreePoint.at_vertex(TreeVertex.canonical(2, 0, 2)))
        b = TreeRoute.to_point(base_vertex(2), TreePoint.at_vertex(TreeVertex.canonical(2, 2, 2)))
        assert a.common_prefix(b) == 0.5
        assert a.common_prefix(a) == a.length
