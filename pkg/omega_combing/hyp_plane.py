"""Geometry of the upper half-plane with the metric (dx^2 + dy^2) / y^2.

Geodesics are parametrized through a single coordinate ``tau`` that moves
at unit hyperbolic speed: ``tau = log y`` on vertical lines and
``tau = log tan(theta / 2)`` on semicircles, where ``theta`` is the angle
seen from the centre.  A semicircle point is then
``(c - R tanh(tau), R / cosh(tau))``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .const import TOLERANCE
from .exceptions import (
    DegenerateInputError,
    InvalidPointError,
    ParameterRangeError,
    PreconditionError,
)
from .reparam import Reparam

_LOGGER = logging.getLogger(__name__)

# Knot spacing used when tabulating a matching reparametrization.
RHO_KNOT_SPACING = 0.01
RHO_MIN_KNOTS = 65


@dataclass(frozen=True)
class HPoint:
    """A point of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPointError(f"non-finite point ({self.x}, {self.y})")
        if self.y <= 0:
            raise InvalidPointError(f"point ({self.x}, {self.y}) is not above the axis")

    @classmethod
    def from_complex(cls, z: complex) -> HPoint:
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


def hyp_distance(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance, in the arcsinh form that stays accurate for near points."""
    chord = math.hypot(p.x - q.x, p.y - q.y)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.y * q.y)))


def hyp_distance_array(x1, y1, x2, y2) -> np.ndarray:
    """Vectorized :func:`hyp_distance` with numpy broadcasting."""
    chord = np.hypot(np.subtract(x1, x2), np.subtract(y1, y2))
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(np.multiply(y1, y2))))


def chord_length_for_horocycle(length: float) -> float:
    """Geodesic distance between the ends of a horocyclic arc of this length."""
    return 2.0 * math.asinh(length / 2.0)


def horocycle_length_for_chord(distance: float) -> float:
    """Horocyclic length between two points of a horocircle ``distance`` apart."""
    return 2.0 * math.sinh(distance / 2.0)


# ---------------------------------------------------------------------------
# Geodesics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Geodesic:
    """A geodesic segment from ``start`` to ``end`` with unit-speed parameter.

    ``radius`` is infinite for vertical geodesics, in which case ``center``
    is the abscissa of the line.
    """

    start: HPoint
    end: HPoint
    center: float
    radius: float = math.inf

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ParameterRangeError(f"arc radius must be positive, got {self.radius}")

    @property
    def is_vertical(self) -> bool:
        return math.isinf(self.radius)

    @cached_property
    def length(self) -> float:
        return hyp_distance(self.start, self.end)

    def _tau(self, x: float, y: float) -> float:
        if self.is_vertical:
            return math.log(y)
        dx = x - self.center
        if dx >= 0:
            return math.log(y / (self.radius + dx))
        return math.log((self.radius - dx) / y)

    @cached_property
    def tau0(self) -> float:
        return self._tau(self.start.x, self.start.y)

    @cached_property
    def direction(self) -> float:
        """+1 when ``tau`` increases from start to end, -1 otherwise."""
        return 1.0 if self._tau(self.end.x, self.end.y) >= self.tau0 else -1.0

    def tau_at(self, s):
        return self.tau0 + self.direction * np.asarray(s, dtype=float)

    def xy_at_tau(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.is_vertical:
            return np.full_like(tau, self.center), np.exp(tau)
        return self.center - self.radius * np.tanh(tau), self.radius / np.cosh(tau)

    def reversed(self) -> Geodesic:
        return Geodesic(self.end, self.start, self.center, self.radius)

    def transformed(self, matrix) -> Geodesic:
        """Image of the segment under a Möbius transformation."""
        return geodesic_between(mobius_apply(matrix, self.start), mobius_apply(matrix, self.end))

    @property
    def x_range(self) -> tuple[float, float]:
        return min(self.start.x, self.end.x), max(self.start.x, self.end.x)


def geodesic_between(p: HPoint, q: HPoint) -> Geodesic:
    """The unique geodesic segment from ``p`` to ``q``."""
    if p == q:
        raise DegenerateInputError(f"no geodesic between coincident points {p}")
    if abs(p.x - q.x) <= 1e-12 * (1.0 + abs(p.x)):
        return Geodesic(p, q, p.x)
    center = ((q.x**2 + q.y**2) - (p.x**2 + p.y**2)) / (2.0 * (q.x - p.x))
    return Geodesic(p, q, center, math.hypot(p.x - center, p.y))


def geodesic_point(g: Geodesic, s: float) -> HPoint:
    """Point at arclength ``s`` from the start of ``g``."""
    if s < -TOLERANCE or s > g.length + TOLERANCE:
        raise ParameterRangeError(f"arclength {s} outside [0, {g.length}]")
    s = min(max(s, 0.0), g.length)
    if s == 0.0:
        return g.start
    if s == g.length:
        return g.end
    x, y = g.xy_at_tau(g.tau_at(s))
    return HPoint(float(x), float(y))


def geodesic_points(g: Geodesic, s) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`geodesic_point`; ``s`` is clipped to the segment."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, g.length)
    return g.xy_at_tau(g.tau_at(s))


def geodesic_x_param(g: Geodesic, x):
    """Arclength parameter of the point of the full geodesic with abscissa ``x``.

    Values outside ``[0, length]`` mean the abscissa is reached beyond the
    segment; callers clamp.
    """
    if g.is_vertical:
        raise ParameterRangeError("abscissa does not parametrize a vertical geodesic")
    ratio = np.clip((g.center - np.asarray(x, dtype=float)) / g.radius, -1.0 + 1e-15, 1.0 - 1e-15)
    return g.direction * (np.arctanh(ratio) - g.tau0)


def geodesic_horoball_interval(g: Geodesic, height: float) -> tuple[float, float] | None:
    """Parameter interval on which ``g`` lies strictly above ``y = height``."""
    if g.is_vertical:
        lo, hi = math.log(height), math.inf
    else:
        if g.radius <= height:
            return None
        half = math.acosh(g.radius / height)
        lo, hi = -half, half
    # tau = tau0 + direction * s
    a = (lo - g.tau0) * g.direction
    b = (hi - g.tau0) * g.direction
    s0 = max(min(a, b), 0.0)
    s1 = min(max(a, b), g.length)
    if s1 - s0 <= 0.0:
        return None
    return s0, s1


# ---------------------------------------------------------------------------
# Horocircles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Horocircle:
    """A horocircle: ``y = size`` when ``base`` is None, else a circle of
    euclidean diameter ``size`` tangent to the axis at ``base``."""

    base: float | None
    size: float

    def __post_init__(self) -> None:
        if not self.size > 0:
            raise ParameterRangeError(f"horocircle size must be positive, got {self.size}")

    @classmethod
    def at_infinity(cls, height: float) -> Horocircle:
        return cls(None, height)

    @classmethod
    def tangent(cls, base: float, diameter: float) -> Horocircle:
        return cls(base, diameter)

    @property
    def is_at_infinity(self) -> bool:
        return self.base is None

    @property
    def height(self) -> float:
        if not self.is_at_infinity:
            raise ParameterRangeError("a tangent horocircle has no height")
        return self.size

    @property
    def diameter(self) -> float:
        if self.is_at_infinity:
            raise ParameterRangeError("a horocircle at infinity has no diameter")
        return self.size

    def contains(self, p: HPoint) -> bool:
        """Strict interior test."""
        if self.is_at_infinity:
            return p.y > self.size
        return (p.x - self.base) ** 2 + p.y**2 < self.size * p.y


def vertical_project(p: HPoint, h: Horocircle) -> HPoint:
    """Move ``p`` along its vertical geodesic onto a horocircle based at infinity."""
    return HPoint(p.x, h.height)


def horocycle_arc_length(x1: float, x2: float, height: float) -> float:
    """Length of the arc of ``y = height`` between abscissae ``x1`` and ``x2``."""
    if not height > 0:
        raise ParameterRangeError(f"height must be positive, got {height}")
    return abs(x2 - x1) / height


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------


def as_real_matrix(matrix) -> np.ndarray:
    if hasattr(matrix, "as_real_matrix"):
        return matrix.as_real_matrix()
    return np.asarray(matrix, dtype=float).reshape(2, 2)


def mobius_apply(matrix, p: HPoint) -> HPoint:
    """Image of ``p`` under z -> (az + b) / (cz + d)."""
    (a, b), (c, d) = as_real_matrix(matrix)
    z = p.as_complex()
    return HPoint.from_complex((a * z + b) / (c * z + d))


def mobius_apply_array(matrix, x, y) -> tuple[np.ndarray, np.ndarray]:
    (a, b), (c, d) = as_real_matrix(matrix)
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    w = (a * z + b) / (c * z + d)
    return w.real, w.imag


def point_at_distance(center: HPoint, distance: float, angle: float) -> HPoint:
    """The point ``distance`` away from ``center`` in the direction ``angle``.

    ``angle`` is measured from straight up, so 0 moves to ``y * e**distance``.
    """
    if distance < 0:
        raise ParameterRangeError(f"distance must be >= 0, got {distance}")
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    rotated = mobius_apply(np.array([[c, s], [-s, c]]), HPoint(0.0, math.exp(distance)))
    r = math.sqrt(center.y)
    return mobius_apply(np.array([[r, center.x / r], [0.0, 1.0 / r]]), rotated)


def normalize_pair(e1: HPoint, e2: HPoint) -> np.ndarray:
    """An isometry putting ``e1`` and ``e2`` on one vertical line.

    The geodesic through the pair is sent to the imaginary axis by mapping
    its feet ``c - R`` and ``c + R`` to 0 and infinity.
    """
    g = geodesic_between(e1, e2)
    if g.is_vertical:
        return np.eye(2)
    c, r = g.center, g.radius
    return np.array([[-1.0, c - r], [1.0, -c - r]]) / math.sqrt(2.0 * r)


# ---------------------------------------------------------------------------
# Matching two geodesics from a common point
# ---------------------------------------------------------------------------


def arc_pair_params(chi1: Geodesic, chi2: Geodesic) -> tuple[float, float, float, float]:
    """Return ``(mid, a, R1, R2)`` with the arcs centred at ``mid + a`` and ``mid - a``.

    ``R1`` belongs to the arc with the larger centre.
    """
    if chi1.is_vertical or chi2.is_vertical:
        raise ParameterRangeError("arc parameters need two semicircles")
    mid = (chi1.center + chi2.center) / 2.0
    a = abs(chi1.center - chi2.center) / 2.0
    if chi1.center >= chi2.center:
        return mid, a, chi1.radius, chi2.radius
    return mid, a, chi2.radius, chi1.radius


def vertical_width_f(a: float, r1: float, r2: float, t: float) -> float:
    """Signed vertical-fibre distance at abscissa ``t`` between the arcs
    ``(x - a)^2 + y^2 = r1^2`` and ``(x + a)^2 + y^2 = r2^2``."""
    if a < 0:
        raise ParameterRangeError(f"centre offset must be >= 0, got {a}")
    top = r1**2 - (t - a) ** 2
    bottom = r2**2 - (t + a) ** 2
    if top <= 0 or bottom <= 0:
        raise ParameterRangeError(f"abscissa {t} is outside one of the arcs")
    return 0.5 * math.log(top / bottom)


def rho_reparam(chi1: Geodesic, chi2: Geodesic) -> Reparam:
    """Match ``chi2(s)`` with the point of ``chi1`` on the same vertical line.

    Both segments start at a common point and end at most 1 apart.  They
    are first moved by :func:`normalize_pair` so that the endpoints share a
    vertical line; where ``chi2`` leaves the abscissa range of ``chi1`` the
    map is held at the end of ``chi1``.
    """
    if hyp_distance(chi1.start, chi2.start) > TOLERANCE:
        raise PreconditionError("matched geodesics must share their start point")
    gap = hyp_distance(chi1.end, chi2.end)
    if gap > 1.0 + TOLERANCE:
        raise PreconditionError(f"endpoints are {gap:.6f} apart, more than 1")
    len1, len2 = chi1.length, chi2.length
    if gap <= TOLERANCE:
        return Reparam.identity(len2)

    phi = normalize_pair(chi1.end, chi2.end)
    c1, c2 = chi1.transformed(phi), chi2.transformed(phi)
    if c1.is_vertical or c2.is_vertical:
        # z lies on the common vertical line: advance together, then wait
        if len2 <= len1:
            return Reparam.identity(len2)
        return Reparam(np.array([0.0, len1, len2]), np.array([0.0, len1, len1]))

    count = max(RHO_MIN_KNOTS, int(math.ceil(len2 / RHO_KNOT_SPACING)) + 1)
    s = np.linspace(0.0, len2, count)
    x, _ = geodesic_points(c2, s)
    u = np.clip(geodesic_x_param(c1, x), 0.0, len1)
    u[0] = 0.0
    u = np.maximum.accumulate(u)
    _LOGGER.debug("rho matching over %d knots, lengths %.4f -> %.4f", count, len2, len1)
    return Reparam(s, u)
