"""The space Omega_p: H2 x T_p with the open horoballs of one orbit removed.

sigma_inf cuts the plane over a tree point ``t`` along ``y = p**(2 r) B``
where ``r`` is the metric height of ``t``.  Every other horosphere is a
translate ``g sigma_inf`` and is recorded by ``g`` and its base ``g(inf)``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .const import (
    BOUNDARY_SNAP,
    DEFAULT_CALIBRATION,
    DEFAULT_MIN_DIAMETER,
    DEFAULT_WINDOW_TREE_RADIUS,
    DEFAULT_WINDOW_X,
    TREE_EDGE_LENGTH,
)
from .exceptions import ParameterRangeError
from .hyp_plane import HPoint, Horocircle, hyp_distance, mobius_apply
from .padic_tree import (
    TreePoint,
    TreeVertex,
    ball as tree_ball,
    base_vertex,
    busemann,
    height,
    tree_act,
    tree_point_distance,
)
from .psl2_group import GroupElement, ball as group_ball, eta_act, invert, is_prime

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    """Prime, calibration height B and metric edge length of one model."""

    p: int
    calibration: float = DEFAULT_CALIBRATION
    edge_length: float = TREE_EDGE_LENGTH

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ParameterRangeError(f"{self.p} is not prime")
        if not self.calibration > 1:
            raise ParameterRangeError(f"calibration must exceed 1, got {self.calibration}")

    @property
    def base(self) -> TreeVertex:
        return base_vertex(self.p)

    @property
    def distortion(self) -> float:
        """Stretch factor of tree directions under projection to sigma_inf."""
        return 2.0 * math.log(self.p)

    def sigma_height(self, h):
        """``p**(2 d h) B`` for heights ``h`` counted in edges; vectorized."""
        return self.calibration * np.power(float(self.p), 2.0 * self.edge_length * np.asarray(h, dtype=float))


@dataclass(frozen=True)
class OmegaPoint:
    plane: HPoint
    tree: TreePoint

    @classmethod
    def of(cls, x: float, y: float, tree: TreePoint | TreeVertex) -> OmegaPoint:
        if isinstance(tree, TreeVertex):
            tree = TreePoint.at_vertex(tree)
        return cls(HPoint(x, y), tree)


def omega_distance(q1: OmegaPoint, q2: OmegaPoint, params: ModelParams) -> float:
    """Sum of the plane distance and the tree distance."""
    return hyp_distance(q1.plane, q2.plane) + tree_point_distance(q1.tree, q2.tree, params.edge_length)


def sigma_inf_height(t: TreePoint | TreeVertex, params: ModelParams) -> float:
    return float(params.sigma_height(height(t)))


# ---------------------------------------------------------------------------
# Horospheres
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Horosphere:
    """The translate ``g sigma_inf``, based at ``g(inf)`` (None for infinity)."""

    g: GroupElement
    base: Fraction | None = field(compare=False)

    @classmethod
    def sigma_inf(cls, p: int) -> Horosphere:
        return cls(GroupElement.identity(p), None)

    @classmethod
    def translate(cls, g: GroupElement) -> Horosphere:
        return cls(g, g.boundary_image)

    @property
    def is_sigma_inf(self) -> bool:
        return self.base is None

    @cached_property
    def g_inv(self) -> GroupElement:
        return invert(self.g)

    @cached_property
    def anchor(self) -> int:
        """Height of ``g^-1 t0``."""
        return moved_height(self.g_inv, base_vertex(self.g.p))

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.g.as_real_matrix()

    @cached_property
    def inv_matrix(self) -> np.ndarray:
        return self.g_inv.as_real_matrix()

    @property
    def key(self) -> str:
        return "inf" if self.base is None else str(self.base)

    def to_json(self) -> dict:
        base = None if self.base is None else [self.base.numerator, self.base.denominator]
        return {"matrix": self.g.to_json(), "base": base}

    @classmethod
    def from_json(cls, data: dict, p: int) -> Horosphere:
        return cls.translate(GroupElement.from_json(data["matrix"], p))


@lru_cache(maxsize=None)
def moved_height(g_inv: GroupElement, vertex: TreeVertex) -> int:
    """Height of ``g_inv`` applied to a vertex."""
    return tree_act(g_inv, vertex).a


def vertex_height_under(sigma: Horosphere, vertex: TreeVertex) -> int:
    """Height of ``g^-1 v``: the Busemann function toward the base plus its value at t0."""
    return busemann(vertex, sigma.base) + sigma.anchor


def height_under(sigma: Horosphere, t: TreePoint | TreeVertex) -> float:
    """Height of ``g^-1 t``, interpolated along edges."""
    if isinstance(t, TreeVertex):
        return float(vertex_height_under(sigma, t))
    hu = vertex_height_under(sigma, t.u)
    if t.is_vertex:
        return float(hu)
    return (1.0 - t.lam) * hu + t.lam * vertex_height_under(sigma, t.v)


def frame_height(sigma: Horosphere, t: TreePoint | TreeVertex, params: ModelParams) -> float:
    """Height of the horocircle ``y = H`` that ``g^-1`` carries sigma's trace over ``t`` to."""
    return float(params.sigma_height(height_under(sigma, t)))


def in_horoball(q: OmegaPoint, sigma: Horosphere, params: ModelParams) -> bool:
    """Strict interior test."""
    if sigma.is_sigma_inf:
        return q.plane.y > sigma_inf_height(q.tree, params)
    moved = mobius_apply(sigma.inv_matrix, q.plane)
    return moved.y > frame_height(sigma, q.tree, params)


def horocircle_in_plane(sigma: Horosphere, t: TreePoint | TreeVertex, params: ModelParams) -> Horocircle:
    """Trace of ``sigma`` in the plane over ``t``."""
    if sigma.g.c == 0:
        return Horocircle.at_infinity(sigma_inf_height(t, params))
    h = frame_height(sigma, t, params)
    return Horocircle.tangent(float(sigma.base), 1.0 / (float(sigma.g.c) ** 2 * h))


def project_pi(q: OmegaPoint, params: ModelParams) -> OmegaPoint:
    """Vertical projection onto sigma_inf."""
    return OmegaPoint(HPoint(q.plane.x, sigma_inf_height(q.tree, params)), q.tree)


def project_to_horosphere(q: OmegaPoint, sigma: Horosphere, params: ModelParams) -> OmegaPoint:
    """Projection onto ``sigma`` along geodesics from its base.

    Conjugate of :func:`project_pi` by ``g``.  Off sigma_inf the image is
    placed a relative :data:`BOUNDARY_SNAP` outside the horoball.
    """
    if sigma.is_sigma_inf:
        return project_pi(q, params)
    moved = mobius_apply(sigma.inv_matrix, q.plane)
    h = frame_height(sigma, q.tree, params) * (1.0 - BOUNDARY_SNAP)
    return OmegaPoint(mobius_apply(sigma.matrix, HPoint(moved.x, h)), q.tree)


# ---------------------------------------------------------------------------
# Scenes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Region a horosphere must reach with a large enough trace to be kept."""

    x_min: float = -DEFAULT_WINDOW_X
    x_max: float = DEFAULT_WINDOW_X
    tree_radius: int = DEFAULT_WINDOW_TREE_RADIUS

    def to_json(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "tree_radius": self.tree_radius}


@dataclass(frozen=True)
class Scene:
    """A finite family of horospheres standing in for the whole orbit."""

    params: ModelParams
    horospheres: tuple[Horosphere, ...]
    radius: int
    window: Window = Window()
    min_diameter: float = DEFAULT_MIN_DIAMETER

    def __len__(self) -> int:
        return len(self.horospheres)

    @property
    def bases(self) -> list[str]:
        return [h.key for h in self.horospheres]

    def widened(self) -> Scene:
        """The scene one word further out, with the same window."""
        return scene_enumerate(self.params, self.radius + 1, self.window, self.min_diameter)

    def containing(self, q: OmegaPoint) -> Horosphere | None:
        """The horosphere whose open horoball contains ``q``, if any."""
        for sigma in self.horospheres:
            if in_horoball(q, sigma, self.params):
                return sigma
        return None

    def to_json(self) -> str:
        data = {
            "p": self.params.p,
            "calibration": self.params.calibration,
            "edge_length": self.params.edge_length,
            "radius": self.radius,
            "window": self.window.to_json(),
            "min_diameter": self.min_diameter,
            "horospheres": [h.to_json() for h in self.horospheres],
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Scene:
        data = json.loads(text)
        params = ModelParams(int(data["p"]), float(data["calibration"]), float(data["edge_length"]))
        horospheres = tuple(Horosphere.from_json(h, params.p) for h in data["horospheres"])
        return cls(
            params,
            horospheres,
            int(data["radius"]),
            Window(**data["window"]),
            float(data["min_diameter"]),
        )


def _max_trace_diameter(sigma: Horosphere, vertices, params: ModelParams) -> float:
    lowest = min(vertex_height_under(sigma, v) for v in vertices)
    return 1.0 / (float(sigma.g.c) ** 2 * float(params.sigma_height(lowest)))


def scene_enumerate(
    params: ModelParams,
    word_radius: int,
    window: Window | None = None,
    min_diameter: float = DEFAULT_MIN_DIAMETER,
) -> Scene:
    """Distinct horospheres ``g sigma_inf`` for ``g`` in the word ball.

    Each base keeps the first group element met in breadth-first order.
    A horosphere other than sigma_inf is kept when, over some vertex of the
    window's tree ball, its trace has diameter at least ``min_diameter``
    and reaches the window's x-range.
    """
    if word_radius < 0:
        raise ParameterRangeError(f"radius must be >= 0, got {word_radius}")
    window = window or Window()
    vertices = list(tree_ball(params.base, window.tree_radius))
    found: dict[Fraction | None, Horosphere] = {None: Horosphere.sigma_inf(params.p)}
    for g in group_ball(params.p, word_radius):
        base = g.boundary_image
        if base in found:
            continue
        sigma = Horosphere.translate(g)
        diameter = _max_trace_diameter(sigma, vertices, params)
        if diameter < min_diameter:
            continue
        if not window.x_min - diameter <= float(base) <= window.x_max + diameter:
            continue
        found[base] = sigma
    scene = Scene(params, tuple(found.values()), word_radius, window, min_diameter)
    _LOGGER.info("Scene for p=%d radius %d has %d horospheres", params.p, word_radius, len(scene))
    return scene


def horoball_containing(q: OmegaPoint, scene: Scene) -> Horosphere | None:
    return scene.containing(q)


def scene_to_json(scene: Scene) -> str:
    return scene.to_json()


def scene_from_json(text: str) -> Scene:
    return Scene.from_json(text)


def eta_translate(g: GroupElement, sigma: Horosphere) -> Horosphere:
    """The horosphere ``g sigma``."""
    return Horosphere.translate(g * sigma.g)


__all__ = [
    "Horosphere",
    "ModelParams",
    "OmegaPoint",
    "Scene",
    "Window",
    "eta_act",
    "eta_translate",
    "frame_height",
    "height_under",
    "horoball_containing",
    "horocircle_in_plane",
    "in_horoball",
    "omega_distance",
    "project_pi",
    "project_to_horosphere",
    "scene_enumerate",
    "scene_from_json",
    "scene_to_json",
    "sigma_inf_height",
    "vertex_height_under",
]
