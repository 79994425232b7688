"""Monotone piecewise-linear reparametrizations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .const import TOLERANCE
from .exceptions import ParameterRangeError


@dataclass(frozen=True, eq=False)
class Reparam:
    """A nondecreasing piecewise-linear map given by its knots.

    ``t`` is the clock and ``u`` the parameter it is sent to.  Between
    knots the map is linear; beyond the last knot it stays constant.
    """

    t: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if t.ndim != 1 or t.shape != u.shape or t.size == 0:
            raise ParameterRangeError("Reparam knots must be matching 1-d arrays")
        if np.any(np.diff(t) < 0):
            raise ParameterRangeError("Reparam clock knots must be nondecreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)

    @classmethod
    def identity(cls, length: float) -> Reparam:
        return cls(np.array([0.0, length]), np.array([0.0, length]))

    @classmethod
    def constant(cls, length: float, value: float = 0.0) -> Reparam:
        return cls(np.array([0.0, length]), np.array([value, value]))

    @property
    def domain_end(self) -> float:
        return float(self.t[-1])

    @property
    def end(self) -> float:
        return float(self.u[-1])

    def __call__(self, s):
        return np.interp(s, self.t, self.u)

    def is_monotone(self, tol: float = TOLERANCE) -> bool:
        return bool(np.all(np.diff(self.u) >= -tol))

    def max_slope(self) -> float:
        dt = np.diff(self.t)
        du = np.diff(self.u)
        live = dt > 0
        if not np.any(live):
            return 0.0
        return float(np.max(du[live] / dt[live]))

    def is_admissible(self, tol: float = 1e-6) -> bool:
        """Check rho(0) = 0, monotonicity and the unit slope bound."""
        if abs(self.u[0]) > tol or self.t[0] != 0.0:
            return False
        if not self.is_monotone(tol):
            return False
        # vertical jumps (repeated clock knots) are not allowed
        dt = np.diff(self.t)
        du = np.diff(self.u)
        if np.any((dt == 0) & (np.abs(du) > tol)):
            return False
        return self.max_slope() <= 1.0 + tol

    def inverse(self) -> Reparam:
        """Generalized inverse: the first clock value reaching each parameter."""
        u, idx = np.unique(self.u, return_index=True)
        return Reparam(u, self.t[idx])

    def compose(self, inner: Reparam) -> Reparam:
        """Return ``self o inner``."""
        knots = np.union1d(inner.t, inner.inverse()(self.t))
        knots = knots[(knots >= inner.t[0]) & (knots <= inner.t[-1])]
        return Reparam(knots, self(inner(knots)))


def retime(u1: np.ndarray, u2: np.ndarray) -> tuple[Reparam, Reparam]:
    """Put a monotone coupling on a common clock with unit-slope maps.

    The coupling is the polyline through ``(u1[i], u2[i])``.  The clock
    advances by the larger of the two increments, so both maps have slope
    at most one and start at zero when the coupling does.
    """
    u1 = np.maximum.accumulate(np.asarray(u1, dtype=float))
    u2 = np.maximum.accumulate(np.asarray(u2, dtype=float))
    if u1.shape != u2.shape or u1.size == 0:
        raise ParameterRangeError("coupling knots must be matching nonempty arrays")
    step = np.maximum(np.diff(u1), np.diff(u2))
    clock = np.concatenate(([0.0], np.cumsum(step)))
    return Reparam(clock, u1), Reparam(clock, u2)
