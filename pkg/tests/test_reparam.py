"""Tests for monotone reparametrizations."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omega_combing.exceptions import ParameterRangeError
from omega_combing.reparam import Reparam, retime

increments = st.lists(st.integers(min_value=0, max_value=12).map(lambda k: k / 4), min_size=1, max_size=20)


class TestReparam:
    """Piecewise-linear maps and their admissibility."""

    def test_identity(self):
        rho = Reparam.identity(2.0)
        assert rho(1.25) == pytest.approx(1.25)
        assert rho.is_admissible()

    def test_constant_is_admissible(self):
        assert Reparam.constant(3.0).is_admissible()

    def test_constant_after_last_knot(self):
        assert Reparam.identity(1.0)(5.0) == 1.0

    def test_steep_map_not_admissible(self):
        rho = Reparam(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
        assert rho.is_monotone()
        assert not rho.is_admissible()

    def test_nonzero_start_not_admissible(self):
        assert not Reparam(np.array([0.0, 1.0]), np.array([0.5, 1.0])).is_admissible()

    def test_decreasing_not_monotone(self):
        assert not Reparam(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.5])).is_monotone()

    def test_jump_not_admissible(self):
        rho = Reparam(np.array([0.0, 1.0, 1.0]), np.array([0.0, 0.5, 1.0]))
        assert not rho.is_admissible()

    def test_mismatched_knots(self):
        with pytest.raises(ParameterRangeError):
            Reparam(np.array([0.0, 1.0]), np.array([0.0]))

    def test_clock_must_not_decrease(self):
        with pytest.raises(ParameterRangeError):
            Reparam(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_inverse_of_pause(self):
        rho = Reparam(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 1.0]))
        inverse = rho.inverse()
        assert inverse(0.5) == pytest.approx(0.5)
        assert inverse.end == 1.0

    def test_compose(self):
        half = Reparam(np.array([0.0, 2.0]), np.array([0.0, 1.0]))
        double = Reparam(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
        assert double.compose(half)(1.5) == pytest.approx(1.5)

    def test_max_slope(self):
        rho = Reparam(np.array([0.0, 1.0, 3.0]), np.array([0.0, 0.5, 2.5]))
        assert rho.max_slope() == pytest.approx(1.0)


class TestRetime:
    """Common clocks for monotone couplings."""

    @given(increments, increments)
    def test_admissible_pair(self, first, second):
        size = min(len(first), len(second))
        u1 = np.concatenate(([0.0], np.cumsum(first[:size])))
        u2 = np.concatenate(([0.0], np.cumsum(second[:size])))
        a, b = retime(u1, u2)
        assert a.is_admissible()
        assert b.is_admissible()
        assert np.array_equal(a.t, b.t)
        assert a.end == pytest.approx(u1[-1])
        assert b.end == pytest.approx(u2[-1])

    def test_clock_is_larger_increment(self):
        a, b = retime(np.array([0.0, 1.0, 1.5]), np.array([0.0, 0.5, 2.5]))
        assert list(a.t) == [0.0, 1.0, 3.0]

    def test_empty(self):
        with pytest.raises(ParameterRangeError):
            retime(np.array([]), np.array([]))
