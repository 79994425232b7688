"""Tests for combing paths."""

from __future__ import annotations

import math

import numpy as np
import pytest

from omega_combing.combing import (
    KIND_HOROCYCLE,
    KIND_LIFT,
    KIND_TREE,
    LEG_PLANE,
    build_raw_path,
    combing_path,
    containment_violations,
    TruncationReport,
    convergence_check,
    deep_horoball_family,
    deep_horoball_target,
    log_changed,
    random_target,
    random_tree_walk,
    random_unit_pair,
    tree_leg_intervals,
    truncation_check,
)
from omega_combing.const import TOLERANCE
from omega_combing.exceptions import InvalidBasepointError, InvalidTargetError, ParameterRangeError
from omega_combing.omega_model import OmegaPoint, horocircle_in_plane, omega_distance
from omega_combing.padic_tree import TreePoint, TreeVertex, base_vertex, neighbors, tree_point_distance


@pytest.fixture
def descending(params2):
    """Basepoint just under sigma_inf and a target two edges down the tree."""
    start = OmegaPoint.of(0.0, 1.9, base_vertex(2))
    target = OmegaPoint.of(0.0, 0.1, TreeVertex.canonical(-2, 0, 2))
    return start, target


# ---------------------------------------------------------------------------
# Raw and adapted paths
# ---------------------------------------------------------------------------

class TestRawPath:
    """The two raw legs."""

    def test_lengths_add_to_distance(self, params2, basepoint, scene3, rng):
        for _ in range(20):
            target = random_target(rng, scene3, 4.0)
            tree_leg, plane_leg = build_raw_path(basepoint, target, params2)
            expected = omega_distance(basepoint, target, params2)
            assert tree_leg.raw_length + plane_leg.raw_length == pytest.approx(expected)

    def test_basepoint_must_be_vertex(self, params2):
        u, v = base_vertex(2), neighbors(base_vertex(2))[1]
        start = OmegaPoint.of(0.0, 1.0, TreePoint.on_edge(u, v, 0.5))
        with pytest.raises(InvalidBasepointError):
            build_raw_path(start, OmegaPoint.of(1.0, 1.0, u), params2)


class TestTreeLeg:
    """Lifts of tree stretches inside a horoball."""

    def test_descent_under_sigma_inf(self, params2, scene0, descending):
        start, target = descending
        tree_leg, _ = build_raw_path(start, target, params2)
        sigma = scene0.horospheres[0]
        intervals = tree_leg_intervals(tree_leg, sigma, params2)
        cross = -0.5 * math.log(1.9 / 2.0) / math.log(2.0)
        assert len(intervals) == 1
        assert intervals[0][0] == pytest.approx(cross)
        assert intervals[0][1] == pytest.approx(1.0)

    def test_lift_length(self, params2, scene0, descending):
        start, target = descending
        path = combing_path(target, scene0, start)
        cross = -0.5 * math.log(1.9 / 2.0) / math.log(2.0)
        kinds = [piece.kind for piece in path.tree_leg.pieces]
        assert kinds == [KIND_TREE, KIND_LIFT]
        expected_tree = cross + (1.0 - cross) * (1.0 + 2.0 * math.log(2.0))
        assert path.tree_leg.length == pytest.approx(expected_tree)
        assert path.plane_leg.length == pytest.approx(math.log(5.0))
        assert path.k_prime() == pytest.approx(expected_tree)

    def test_log_names_sigma_inf(self, scene0, descending):
        start, target = descending
        path = combing_path(target, scene0, start)
        assert path.touched == ["inf"]


class TestCombingPath:
    """Adapted paths from the basepoint."""

    def test_basepoint_to_itself(self, scene3, basepoint):
        path = combing_path(basepoint, scene3)
        assert path.length == 0.0
        assert path.interactions == ()

    def test_target_inside_horoball(self, scene3):
        with pytest.raises(InvalidTargetError):
            combing_path(OmegaPoint.of(0.0, 5.0, base_vertex(2)), scene3)

    def test_basepoint_inside_horoball(self, scene3):
        with pytest.raises(InvalidBasepointError):
            combing_path(OmegaPoint.of(1.0, 1.0, base_vertex(2)), scene3, OmegaPoint.of(0.0, 5.0, base_vertex(2)))

    def test_adapted_not_shorter(self, scene3, rng):
        for _ in range(30):
            path = combing_path(random_target(rng, scene3, 5.0), scene3)
            assert path.length >= path.raw_length - 1e-9
            assert path.k_prime() >= 1.0 - 1e-12

    def test_endpoints(self, scene3, rng, basepoint):
        for _ in range(10):
            target = random_target(rng, scene3, 5.0)
            path = combing_path(target, scene3)
            end = path.point_at(LEG_PLANE, path.plane_leg.raw_length)
            assert end.plane.x == pytest.approx(target.plane.x)
            assert end.plane.y == pytest.approx(target.plane.y)
            samples = path.sample(0.1, scene3)
            assert (samples.x[0], samples.y[0]) == pytest.approx((basepoint.plane.x, basepoint.plane.y))
            assert (samples.x[-1], samples.y[-1]) == pytest.approx((target.plane.x, target.plane.y))
            assert samples.arclength[-1] == pytest.approx(path.length)

    def test_samples_avoid_horoballs(self, scene3, rng):
        for _ in range(20):
            path = combing_path(random_target(rng, scene3, 6.0), scene3)
            samples = path.sample(0.05, scene3)
            assert containment_violations(samples, scene3) == {}
            assert not samples.flagged

    def test_unsnapped_samples_outside(self, scene3, rng):
        for _ in range(20):
            path = combing_path(random_target(rng, scene3, 6.0), scene3)
            assert containment_violations(path.sample(0.05), scene3, margin=-TOLERANCE) == {}

    def test_sample_spacing(self, scene3, rng):
        path = combing_path(random_target(rng, scene3, 6.0), scene3)
        samples = path.sample(0.05)
        assert np.all(np.diff(samples.arclength) <= 0.05 + 1e-12)
        assert np.all(np.diff(samples.raw) >= 0.0)

    def test_step_must_be_positive(self, scene3, basepoint):
        with pytest.raises(ParameterRangeError):
            combing_path(basepoint, scene3).sample(0.0)

    def test_rows_match_samples(self, scene1, rng):
        samples = combing_path(random_target(rng, scene1, 3.0), scene1).sample(0.2)
        rows = samples.rows()
        assert len(rows) == len(samples)
        assert rows[0][0] == 1
        assert rows[-1][0] == LEG_PLANE


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------

class TestRandomInputs:
    """Targets and unit pairs outside the horoballs."""

    def test_walk_length(self, rng):
        for edges in (0.0, 1.0, 3.5, 6.25):
            point = random_tree_walk(rng, base_vertex(3), edges)
            assert tree_point_distance(TreePoint.at_vertex(base_vertex(3)), point) == pytest.approx(edges / 2)

    def test_negative_walk(self, rng):
        with pytest.raises(ParameterRangeError):
            random_tree_walk(rng, base_vertex(2), -1.0)

    def test_target_within_distance(self, scene3, rng, basepoint, params2):
        for _ in range(100):
            target = random_target(rng, scene3, 4.0)
            assert scene3.containing(target) is None
            assert omega_distance(basepoint, target, params2) <= 4.0 + 1e-9

    def test_zero_distance_gives_basepoint(self, scene3, rng, basepoint):
        assert random_target(rng, scene3, 0.0) == basepoint

    def test_unit_pair(self, scene3, rng, params2):
        for _ in range(50):
            first, second = random_unit_pair(rng, scene3, 5.0)
            assert omega_distance(first, second, params2) <= 1.0
            assert scene3.containing(first) is None
            assert scene3.containing(second) is None

    def test_reproducible(self, scene3):
        a = random_target(np.random.default_rng(7), scene3, 4.0)
        b = random_target(np.random.default_rng(7), scene3, 4.0)
        assert a == b


# ---------------------------------------------------------------------------
# Deep horoball family and convergence
# ---------------------------------------------------------------------------

class TestDeepFamily:
    """Targets on sigma_inf far along the horocircle."""

    def test_target_on_sigma_inf(self, params2, basepoint, scene3):
        target = deep_horoball_target(params2, 5.0)
        assert target.plane.y == params2.calibration
        assert scene3.containing(target) is None
        assert omega_distance(basepoint, target, params2) == pytest.approx(5.0)

    def test_too_close(self, params2):
        with pytest.raises(ParameterRangeError):
            deep_horoball_target(params2, 0.1)

    def test_path_follows_horocycle(self, params2, scene3):
        path = combing_path(deep_horoball_target(params2, 6.0), scene3)
        assert "inf" in path.touched
        assert any(piece.kind == KIND_HOROCYCLE for piece in path.plane_leg.pieces)

    def test_exponential_slope(self, scene3):
        fit = deep_horoball_family(scene3, range(2, 9))
        assert 0.4 < fit.slope < 0.6
        assert np.all(np.diff(fit.lengths) > 0)


class TestConvergence:
    """Interaction logs stable under a larger word radius."""

    def test_same_scene(self, scene3, rng):
        targets = [random_target(rng, scene3, 3.0) for _ in range(10)]
        assert convergence_check(targets, scene3, scene3) == []

    def test_deep_targets_only_meet_sigma_inf(self, params2, scene1, scene3):
        targets = [deep_horoball_target(params2, n) for n in (2.0, 4.0, 6.0)]
        assert convergence_check(targets, scene1, scene3) == []

    def test_target_inside_wider_horoball(self, params2, scene3, scene4):
        new = next(sigma for sigma in scene4.horospheres if sigma.key not in scene3.bases)
        circle = horocircle_in_plane(new, base_vertex(2), params2)
        target = OmegaPoint.of(circle.base, circle.diameter / 2, base_vertex(2))
        assert scene3.containing(target) is None
        assert log_changed(target, scene3, scene4)

    def test_changes_need_new_horoballs(self, scene3, scene4, rng):
        for _ in range(20):
            target = random_target(rng, scene4, 5.0)
            touched = set(combing_path(target, scene4).touched)
            assert log_changed(target, scene3, scene4) == bool(touched - set(scene3.bases))


class TestTruncationReport:
    """Summary of a convergence check."""

    def test_passed(self):
        report = TruncationReport(3, 4, 10, ())
        assert report.passed
        assert report.to_json() == {
            "radius": 3,
            "wider_radius": 4,
            "targets": 10,
            "changed": 0,
            "changed_targets": [],
            "passed": True,
        }

    def test_failed(self):
        data = TruncationReport(3, 4, 10, (2, 7)).to_json()
        assert data["changed"] == 2
        assert data["changed_targets"] == [2, 7]
        assert data["passed"] is False

    def test_widens_by_one(self, scene1, rng):
        targets = [random_target(rng, scene1.widened(), 2.0) for _ in range(5)]
        report = truncation_check(targets, scene1)
        assert (report.radius, report.wider_radius, report.targets) == (1, 2, 5)
        assert list(report.changed) == convergence_check(targets, scene1, scene1.widened())

    def test_same_scene(self, scene3, rng):
        targets = [random_target(rng, scene3, 3.0) for _ in range(5)]
        assert truncation_check(targets, scene3, scene3).passed
