"""Combing paths of Omega_p from a fixed basepoint.

A raw path first moves in the tree with the plane point frozen and then
follows the plane geodesic with the tree point frozen.  Adaptation replaces
every stretch inside a removed horoball by its projection onto the bounding
horosphere: tree stretches are lifted along the horosphere and plane
stretches become horocyclic arcs.  Points are addressed by their raw
parameter, so the adapted path is the raw path followed by that projection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .const import (
    BASEPOINT_X,
    BASEPOINT_Y,
    BOUNDARY_SNAP,
    DEFAULT_PAIR_ATTEMPTS,
    DEFAULT_STEP,
    MAX_ADAPT_ITERATIONS,
    TOLERANCE,
)
from .exceptions import (
    InvalidBasepointError,
    InvalidTargetError,
    PairGenerationError,
    ParameterRangeError,
)
from .hyp_plane import (
    Geodesic,
    HPoint,
    geodesic_between,
    geodesic_horoball_interval,
    geodesic_point,
    geodesic_points,
    geodesic_x_param,
    hyp_distance,
    mobius_apply,
    mobius_apply_array,
    point_at_distance,
)
from .omega_model import (
    Horosphere,
    ModelParams,
    OmegaPoint,
    Scene,
    frame_height,
    in_horoball,
    omega_distance,
    project_to_horosphere,
    vertex_height_under,
)
from .padic_tree import TreePoint, TreeRoute, TreeVertex, neighbors

_LOGGER = logging.getLogger(__name__)

LEG_TREE = 1
LEG_PLANE = 2

KIND_TREE = "tree"
KIND_LIFT = "lift"
KIND_GEODESIC = "geodesic"
KIND_HOROCYCLE = "horocycle"


def default_basepoint(params: ModelParams) -> OmegaPoint:
    return OmegaPoint.of(BASEPOINT_X, BASEPOINT_Y, params.base)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathPiece:
    """A stretch of one leg over the raw parameter interval ``[start, end]``.

    ``frame`` and ``height`` describe horocyclic pieces in the frame where
    the horosphere is the line ``y = height``.
    """

    kind: str
    leg: int
    start: float
    end: float
    length: float
    sigma: Horosphere | None = None
    frame: Geodesic | None = None
    height: float = math.nan


@dataclass(frozen=True)
class Interaction:
    """A horosphere met by a raw leg over ``[start, end]``."""

    leg: int
    base: str
    start: float
    end: float

    def key(self) -> tuple:
        return (self.leg, self.base, round(self.start, 9), round(self.end, 9))


@dataclass(frozen=True)
class TreeLeg:
    plane: HPoint
    route: TreeRoute
    pieces: tuple[PathPiece, ...]

    @property
    def raw_length(self) -> float:
        return self.route.length

    @property
    def length(self) -> float:
        return float(sum(piece.length for piece in self.pieces))


@dataclass(frozen=True)
class PlaneLeg:
    start: HPoint
    end: HPoint
    tree: TreePoint
    geodesic: Geodesic | None
    pieces: tuple[PathPiece, ...]

    @property
    def raw_length(self) -> float:
        return 0.0 if self.geodesic is None else self.geodesic.length

    @property
    def length(self) -> float:
        return float(sum(piece.length for piece in self.pieces))


def _piece_at(pieces: tuple[PathPiece, ...], u: float) -> PathPiece:
    for piece in pieces:
        if u <= piece.end + TOLERANCE:
            return piece
    return pieces[-1]


# ---------------------------------------------------------------------------
# Raw paths
# ---------------------------------------------------------------------------


def build_raw_path(basepoint: OmegaPoint, target: OmegaPoint, params: ModelParams) -> tuple[TreeLeg, PlaneLeg]:
    """The tree leg and the plane leg from ``basepoint`` to ``target``.

    Their lengths add up to the model distance between the two points.
    """
    if not basepoint.tree.is_vertex:
        raise InvalidBasepointError(f"basepoint tree coordinate {basepoint.tree} is not a vertex")
    route = TreeRoute.to_point(basepoint.tree.u, target.tree, params.edge_length)
    tree_leg = TreeLeg(
        basepoint.plane,
        route,
        (PathPiece(KIND_TREE, LEG_TREE, 0.0, route.length, route.length),),
    )
    geodesic = None if basepoint.plane == target.plane else geodesic_between(basepoint.plane, target.plane)
    length = 0.0 if geodesic is None else geodesic.length
    plane_leg = PlaneLeg(
        basepoint.plane,
        target.plane,
        target.tree,
        geodesic,
        (PathPiece(KIND_GEODESIC, LEG_PLANE, 0.0, length, length),),
    )
    return tree_leg, plane_leg


def _fill_pieces(intervals, total: float, leg: int, outside_kind: str, inside) -> tuple[PathPiece, ...]:
    pieces: list[PathPiece] = []
    cursor = 0.0
    for start, end, sigma in sorted(intervals, key=lambda item: item[0]):
        if start > cursor:
            pieces.append(PathPiece(outside_kind, leg, cursor, start, start - cursor))
        pieces.append(inside(start, end, sigma))
        cursor = end
    if cursor < total or not pieces:
        pieces.append(PathPiece(outside_kind, leg, cursor, total, total - cursor))
    return tuple(pieces)


# ---------------------------------------------------------------------------
# Tree leg
# ---------------------------------------------------------------------------


def _frame_y(sigma: Horosphere, z: HPoint) -> float:
    return mobius_apply(sigma.inv_matrix, z).y


def _below(s0: float, s1: float, h0: float, h1: float, level: float) -> tuple[float, float] | None:
    """Part of ``[s0, s1]`` where the linear height from ``h0`` to ``h1`` is under ``level``."""
    if h0 < level and h1 < level:
        return s0, s1
    if h0 >= level and h1 >= level:
        return None
    cross = s0 + (level - h0) / (h1 - h0) * (s1 - s0)
    return (s0, cross) if h0 < level else (cross, s1)


def tree_leg_intervals(leg: TreeLeg, sigma: Horosphere, params: ModelParams) -> list[tuple[float, float]]:
    """Maximal raw intervals on which the tree leg is inside ``sigma``.

    With the plane point frozen the leg is inside exactly where the height
    under ``g^-1`` drops below a level fixed by the frame ordinate of the
    plane point.
    """
    route = leg.route
    if route.length <= 0.0:
        return []
    level = math.log(_frame_y(sigma, leg.plane) / params.calibration) / (
        2.0 * params.edge_length * math.log(params.p)
    )
    heights = [vertex_height_under(sigma, v) for v in route.vertices]
    if min(heights) >= level:
        return []
    out: list[tuple[float, float]] = []
    d = params.edge_length
    for k in range(len(route.vertices) - 1):
        s0 = k * d
        s1 = min((k + 1) * d, route.length)
        if s1 <= s0:
            break
        h0 = heights[k]
        h1 = h0 + (heights[k + 1] - h0) * (s1 - s0) / d
        part = _below(s0, s1, h0, h1, level)
        if part is None or part[1] - part[0] <= 0.0:
            continue
        if out and part[0] - out[-1][1] <= 1e-15:
            out[-1] = (out[-1][0], part[1])
        else:
            out.append(part)
    return out


def adapt_tree_leg(leg: TreeLeg, scene: Scene) -> tuple[TreeLeg, list[Interaction]]:
    """Lift every stretch of the tree leg inside a horoball onto its horosphere.

    On a lift the plane point slides along the geodesic from the base so the
    ordinate in the horosphere's frame follows ``p**(2 d h) B``; its length
    density is ``1 + 2 log p`` per unit of tree length.
    """
    params = scene.params
    start = OmegaPoint(leg.plane, leg.route.point_at(0.0))
    sigma = scene.containing(start)
    if sigma is not None:
        raise InvalidBasepointError(f"basepoint lies inside the horoball based at {sigma.key}")
    density = 1.0 + params.distortion
    intervals = []
    for sigma in scene.horospheres:
        intervals.extend((s0, s1, sigma) for s0, s1 in tree_leg_intervals(leg, sigma, params))

    def lift(s0: float, s1: float, sigma: Horosphere) -> PathPiece:
        return PathPiece(KIND_LIFT, LEG_TREE, s0, s1, (s1 - s0) * density, sigma)

    pieces = _fill_pieces(intervals, leg.raw_length, LEG_TREE, KIND_TREE, lift)
    log = [Interaction(LEG_TREE, sigma.key, s0, s1) for s0, s1, sigma in sorted(intervals, key=lambda i: i[0])]
    return TreeLeg(leg.plane, leg.route, pieces), log


# ---------------------------------------------------------------------------
# Plane leg
# ---------------------------------------------------------------------------


def framed_geodesic(geodesic: Geodesic, sigma: Horosphere) -> Geodesic:
    """The geodesic seen from the frame in which ``sigma`` is horizontal."""
    if sigma.g == sigma.g.identity(sigma.g.p):
        return geodesic
    return geodesic.transformed(sigma.inv_matrix)


def adapt_plane_leg(
    leg: PlaneLeg, scene: Scene, moved_endpoint: OmegaPoint | None = None
) -> tuple[PlaneLeg, list[Interaction]]:
    """Replace every stretch of the plane geodesic inside a horoball by a horocyclic arc.

    ``moved_endpoint`` is where the adapted tree leg ended; the adapted plane
    leg starts there.
    """
    params = scene.params
    target = OmegaPoint(leg.end, leg.tree)
    for sigma in scene.horospheres:
        if in_horoball(target, sigma, params):
            raise InvalidTargetError(f"target lies inside the horoball based at {sigma.key}")
    intervals = []
    if leg.geodesic is not None:
        for sigma in scene.horospheres:
            frame = framed_geodesic(leg.geodesic, sigma)
            hit = geodesic_horoball_interval(frame, frame_height(sigma, leg.tree, params))
            if hit is not None:
                intervals.append((hit[0], hit[1], sigma))

    def horocycle(u0: float, u1: float, sigma: Horosphere) -> PathPiece:
        frame = framed_geodesic(leg.geodesic, sigma)
        h = frame_height(sigma, leg.tree, params)
        x0, x1 = geodesic_points(frame, [u0, u1])[0]
        return PathPiece(KIND_HOROCYCLE, LEG_PLANE, u0, u1, abs(float(x1 - x0)) / h, sigma, frame, h)

    pieces = _fill_pieces(intervals, leg.raw_length, LEG_PLANE, KIND_GEODESIC, horocycle)
    adapted = PlaneLeg(leg.start, leg.end, leg.tree, leg.geodesic, pieces)
    if moved_endpoint is not None:
        start = _plane_leg_point(adapted, 0.0, params)
        gap = hyp_distance(start.plane, moved_endpoint.plane)
        if gap > 1e-6:
            _LOGGER.warning("Plane leg starts %.3g away from the end of the tree leg", gap)
    log = [Interaction(LEG_PLANE, sigma.key, u0, u1) for u0, u1, sigma in sorted(intervals, key=lambda i: i[0])]
    return adapted, log


def _plane_leg_point(leg: PlaneLeg, u: float, params: ModelParams) -> OmegaPoint:
    plane = leg.start if leg.geodesic is None else geodesic_point(leg.geodesic, u)
    point = OmegaPoint(plane, leg.tree)
    piece = _piece_at(leg.pieces, u)
    if piece.kind == KIND_HOROCYCLE:
        return project_to_horosphere(point, piece.sigma, params)
    return point


# ---------------------------------------------------------------------------
# Sampled paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Samples of an adapted path.

    ``raw`` is the raw clock (tree arclength on the first leg, the tree
    length plus the geodesic arclength on the second), ``s_tree`` the
    position along the tree route and ``arclength`` the adapted length.
    """

    params: ModelParams
    route: TreeRoute
    leg: np.ndarray
    raw: np.ndarray
    x: np.ndarray
    y: np.ndarray
    s_tree: np.ndarray
    arclength: np.ndarray
    flagged: bool = False

    def __len__(self) -> int:
        return int(self.x.size)

    def tree_point(self, i: int) -> TreePoint:
        return self.route.point_at(float(self.s_tree[i]))

    def omega_point(self, i: int) -> OmegaPoint:
        return OmegaPoint(HPoint(float(self.x[i]), float(self.y[i])), self.tree_point(i))

    def heights_under(self, sigma: Horosphere) -> np.ndarray:
        heights = np.array([vertex_height_under(sigma, v) for v in self.route.vertices], dtype=float)
        if heights.size == 1:
            return np.full_like(self.s_tree, heights[0])
        return np.interp(self.s_tree, self.route.knots, heights)

    def rows(self) -> list[tuple]:
        out = []
        for i in range(len(self)):
            t = self.tree_point(i)
            edge = str(t.u) if t.is_vertex else f"{t.u}-{t.v}"
            out.append((int(self.leg[i]), float(self.arclength[i]), float(self.x[i]), float(self.y[i]), edge, t.lam))
        return out


def containment_violations(samples: SampledPath, scene: Scene, margin: float = 0.0) -> dict[int, Horosphere]:
    """Sample indices strictly inside a scene horoball, with the horoball.

    A positive ``margin`` also reports samples within that relative
    distance of a horosphere; a negative one lets samples that far inside
    pass.
    """
    params = scene.params
    found: dict[int, Horosphere] = {}
    for sigma in scene.horospheres:
        _, fy = mobius_apply_array(sigma.inv_matrix, samples.x, samples.y)
        level = params.sigma_height(samples.heights_under(sigma)) * (1.0 - margin)
        for i in np.flatnonzero(fy > level):
            found.setdefault(int(i), sigma)
    return found


def _snap_onto(samples: SampledPath, index: np.ndarray, sigma: Horosphere, params: ModelParams) -> None:
    fx, _ = mobius_apply_array(sigma.inv_matrix, samples.x[index], samples.y[index])
    h = params.sigma_height(samples.heights_under(sigma)[index]) * (1.0 - BOUNDARY_SNAP)
    samples.x[index], samples.y[index] = mobius_apply_array(sigma.matrix, fx, h)


def _enforce_containment(samples: SampledPath, scene: Scene) -> SampledPath:
    for iteration in range(MAX_ADAPT_ITERATIONS):
        bad = containment_violations(samples, scene, margin=BOUNDARY_SNAP / 2.0)
        if not bad:
            return samples
        _LOGGER.debug("Containment pass %d projects %d samples", iteration + 1, len(bad))
        by_sigma: dict[Horosphere, list[int]] = {}
        for i, sigma in bad.items():
            by_sigma.setdefault(sigma, []).append(i)
        for sigma, index in by_sigma.items():
            _snap_onto(samples, np.array(index), sigma, scene.params)
    _LOGGER.warning("Path still meets a horoball after %d containment passes", MAX_ADAPT_ITERATIONS)
    return SampledPath(
        samples.params,
        samples.route,
        samples.leg,
        samples.raw,
        samples.x,
        samples.y,
        samples.s_tree,
        samples.arclength,
        flagged=True,
    )


# ---------------------------------------------------------------------------
# Combing paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CombingPath:
    params: ModelParams
    basepoint: OmegaPoint
    target: OmegaPoint
    tree_leg: TreeLeg
    plane_leg: PlaneLeg
    interactions: tuple[Interaction, ...] = field(default=())

    @property
    def pieces(self) -> tuple[PathPiece, ...]:
        return self.tree_leg.pieces + self.plane_leg.pieces

    @property
    def length(self) -> float:
        return self.tree_leg.length + self.plane_leg.length

    @property
    def raw_length(self) -> float:
        return self.tree_leg.raw_length + self.plane_leg.raw_length

    @property
    def touched(self) -> list[str]:
        return sorted({item.base for item in self.interactions})

    def log_key(self) -> tuple:
        return tuple(item.key() for item in self.interactions)

    def sigmas(self, leg: int) -> list[Horosphere]:
        """Distinct horospheres met by one raw leg, in order of meeting."""
        seen: list[Horosphere] = []
        source = self.tree_leg.pieces if leg == LEG_TREE else self.plane_leg.pieces
        for piece in source:
            if piece.sigma is not None and piece.sigma not in seen:
                seen.append(piece.sigma)
        return seen

    def point_at(self, leg: int, u: float) -> OmegaPoint:
        """The adapted point at raw parameter ``u`` of one leg."""
        if leg == LEG_PLANE:
            return _plane_leg_point(self.plane_leg, u, self.params)
        tree_leg = self.tree_leg
        point = OmegaPoint(tree_leg.plane, tree_leg.route.point_at(u))
        piece = _piece_at(tree_leg.pieces, u)
        if piece.kind == KIND_LIFT:
            return project_to_horosphere(point, piece.sigma, self.params)
        return point

    def sample(self, step: float = DEFAULT_STEP, scene: Scene | None = None) -> SampledPath:
        """Samples spaced at most ``step`` apart in adapted arclength.

        With a scene the samples get a final containment pass.
        """
        if not step > 0:
            raise ParameterRangeError(f"step must be positive, got {step}")
        chunks = []
        offset = 0.0
        for piece in self.pieces:
            n = max(1, int(math.ceil(piece.length / step)))
            frac = np.arange(n, dtype=float) / n
            chunks.append(self._sample_piece(piece, frac, offset))
            offset += piece.length
        tree_end = self.tree_leg.raw_length
        last = self.target
        chunks.append(
            (
                np.array([LEG_PLANE]),
                np.array([tree_end + self.plane_leg.raw_length]),
                np.array([last.plane.x]),
                np.array([last.plane.y]),
                np.array([tree_end]),
                np.array([offset]),
            )
        )
        leg, raw, x, y, s_tree, arc = (np.concatenate(parts) for parts in zip(*chunks))
        samples = SampledPath(
            self.params,
            self.tree_leg.route,
            leg.astype(int),
            np.maximum.accumulate(raw),
            x,
            y,
            s_tree,
            arc,
        )
        if scene is not None:
            samples = _enforce_containment(samples, scene)
        return samples

    def _sample_piece(self, piece: PathPiece, frac: np.ndarray, offset: float):
        params = self.params
        route = self.tree_leg.route
        tree_end = self.tree_leg.raw_length
        u = piece.start + frac * (piece.end - piece.start)
        arc = offset + frac * piece.length
        leg = np.full(frac.shape, piece.leg)
        if piece.kind == KIND_TREE:
            z = self.tree_leg.plane
            return leg, u, np.full(frac.shape, z.x), np.full(frac.shape, z.y), u, arc
        if piece.kind == KIND_LIFT:
            sigma = piece.sigma
            heights = np.array([vertex_height_under(sigma, v) for v in route.vertices], dtype=float)
            h = np.interp(u, route.knots, heights) if heights.size > 1 else np.full(frac.shape, heights[0])
            fx = mobius_apply(sigma.inv_matrix, self.tree_leg.plane).x
            fy = params.sigma_height(h) * (1.0 - BOUNDARY_SNAP)
            x, y = mobius_apply_array(sigma.matrix, np.full(frac.shape, fx), fy)
            return leg, u, x, y, u, arc
        s_tree = np.full(frac.shape, tree_end)
        geodesic = self.plane_leg.geodesic
        if piece.kind == KIND_GEODESIC:
            if geodesic is None:
                z = self.plane_leg.start
                return leg, tree_end + u, np.full(frac.shape, z.x), np.full(frac.shape, z.y), s_tree, arc
            x, y = geodesic_points(geodesic, u)
            return leg, tree_end + u, x, y, s_tree, arc
        frame = piece.frame
        x0, x1 = geodesic_points(frame, [piece.start, piece.end])[0]
        fx = x0 + frac * (x1 - x0)
        if not frame.is_vertical:
            u = np.clip(geodesic_x_param(frame, fx), piece.start, piece.end)
        fy = np.full(frac.shape, piece.height * (1.0 - BOUNDARY_SNAP))
        x, y = mobius_apply_array(piece.sigma.matrix, fx, fy)
        return leg, tree_end + u, x, y, s_tree, arc

    def k_prime(self) -> float:
        """Adapted over raw length of the tree leg."""
        raw = self.tree_leg.raw_length
        return 1.0 if raw <= 0.0 else self.tree_leg.length / raw


def combing_path(target: OmegaPoint, scene: Scene, basepoint: OmegaPoint | None = None) -> CombingPath:
    """The adapted two-leg path from the basepoint to ``target``."""
    params = scene.params
    basepoint = basepoint or default_basepoint(params)
    raw_tree, raw_plane = build_raw_path(basepoint, target, params)
    tree_leg, tree_log = adapt_tree_leg(raw_tree, scene)
    moved = None
    if tree_leg.pieces[-1].kind == KIND_LIFT:
        moved = project_to_horosphere(
            OmegaPoint(tree_leg.plane, tree_leg.route.end), tree_leg.pieces[-1].sigma, params
        )
    plane_leg, plane_log = adapt_plane_leg(raw_plane, scene, moved)
    path = CombingPath(params, basepoint, target, tree_leg, plane_leg, tuple(tree_log + plane_log))
    _LOGGER.debug(
        "Combing path to %s: raw %.4f adapted %.4f touching %s",
        target.plane,
        path.raw_length,
        path.length,
        path.touched,
    )
    return path


def log_changed(target: OmegaPoint, scene: Scene, wider: Scene) -> bool:
    """Whether the interaction log of the path to ``target`` differs in ``wider``.

    A target inside a horoball of ``wider`` counts as changed.
    """
    if wider.containing(target) is not None:
        _LOGGER.debug("Target %s lies inside a horoball of radius %d", target.plane, wider.radius)
        return True
    return combing_path(target, scene).log_key() != combing_path(target, wider).log_key()


def convergence_check(targets: list[OmegaPoint], scene: Scene, wider: Scene) -> list[int]:
    """Indices of targets whose interaction logs differ between two scenes."""
    changed = [i for i, target in enumerate(targets) if log_changed(target, scene, wider)]
    if changed:
        _LOGGER.warning(
            "%d of %d interaction logs change from radius %d to %d",
            len(changed),
            len(targets),
            scene.radius,
            wider.radius,
        )
    return changed


@dataclass(frozen=True)
class TruncationReport:
    """Interaction logs of a workload compared between two scene radii."""

    radius: int
    wider_radius: int
    targets: int
    changed: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.changed

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "wider_radius": self.wider_radius,
            "targets": self.targets,
            "changed": len(self.changed),
            "changed_targets": list(self.changed),
            "passed": self.passed,
        }


def truncation_check(targets: list[OmegaPoint], scene: Scene, wider: Scene | None = None) -> TruncationReport:
    """Compare the logs of ``targets`` in ``scene`` and in the scene one word further out."""
    wider = wider or scene.widened()
    changed = convergence_check(targets, scene, wider)
    return TruncationReport(scene.radius, wider.radius, len(targets), tuple(changed))


# ---------------------------------------------------------------------------
# Random targets
# ---------------------------------------------------------------------------


def random_tree_walk(
    rng: np.random.Generator, start: TreeVertex, edges: float, previous: TreeVertex | None = None
) -> TreePoint:
    """End of a non-backtracking walk of ``edges`` edges (fractional allowed)."""
    if edges < 0:
        raise ParameterRangeError(f"walk length must be >= 0, got {edges}")
    current, prev = start, previous
    whole = int(math.floor(edges))
    frac = edges - whole
    for _ in range(whole):
        options = [v for v in neighbors(current) if v != prev]
        prev, current = current, options[int(rng.integers(len(options)))]
    if frac <= 0.0:
        return TreePoint.at_vertex(current)
    options = [v for v in neighbors(current) if v != prev]
    return TreePoint.on_edge(current, options[int(rng.integers(len(options)))], frac)


def _walk_from(rng: np.random.Generator, t: TreePoint, edges: float) -> TreePoint:
    if t.is_vertex:
        return random_tree_walk(rng, t.u, edges)
    if rng.random() < 0.5:
        if edges < 1.0 - t.lam:
            return TreePoint.on_edge(t.u, t.v, t.lam + edges)
        return random_tree_walk(rng, t.v, edges - (1.0 - t.lam), previous=t.u)
    if edges < t.lam:
        return TreePoint.on_edge(t.u, t.v, t.lam - edges)
    return random_tree_walk(rng, t.u, edges - t.lam, previous=t.v)


def random_target(
    rng: np.random.Generator,
    scene: Scene,
    max_distance: float,
    attempts: int = DEFAULT_PAIR_ATTEMPTS,
) -> OmegaPoint:
    """A point of Omega_p within ``max_distance`` of the basepoint.

    The distance budget is drawn uniformly and split at random between a
    tree walk and a plane move in a uniform direction.
    """
    params = scene.params
    base = default_basepoint(params)
    if max_distance <= 0.0:
        return base
    for _ in range(attempts):
        budget = max_distance * rng.random()
        tree_share = budget * rng.random()
        tree = random_tree_walk(rng, params.base, tree_share / params.edge_length)
        plane = point_at_distance(base.plane, budget - tree_share, rng.uniform(0.0, 2.0 * math.pi))
        target = OmegaPoint(plane, tree)
        if scene.containing(target) is None:
            return target
        _LOGGER.debug("Rejected target %s inside a horoball", plane)
    raise PairGenerationError(f"no target outside the horoballs after {attempts} attempts")


def random_unit_pair(
    rng: np.random.Generator,
    scene: Scene,
    max_distance: float,
    attempts: int = DEFAULT_PAIR_ATTEMPTS,
) -> tuple[OmegaPoint, OmegaPoint]:
    """Two points of Omega_p at most 1 apart, the first within ``max_distance - 1``."""
    params = scene.params
    budget = 1.0 - 1e-9
    for _ in range(attempts):
        first = random_target(rng, scene, max(max_distance - 1.0, 0.0), attempts)
        tree_move = budget * rng.random()
        tree = _walk_from(rng, first.tree, tree_move / params.edge_length)
        plane = point_at_distance(first.plane, budget - tree_move, rng.uniform(0.0, 2.0 * math.pi))
        second = OmegaPoint(plane, tree)
        if omega_distance(first, second, params) <= 1.0 and scene.containing(second) is None:
            return first, second
        _LOGGER.debug("Rejected pair partner %s", plane)
    raise PairGenerationError(f"no unit pair outside the horoballs after {attempts} attempts")


# ---------------------------------------------------------------------------
# Deep horoball family
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeepFamilyFit:
    """Lengths of paths to the deep family with ``log L ~ slope n + intercept``.

    ``c`` is the least constant with ``L(n) >= exp(slope n - c)`` on the data.
    """

    n: np.ndarray
    lengths: np.ndarray
    slope: float
    intercept: float
    c: float


def deep_horoball_target(params: ModelParams, n: float) -> OmegaPoint:
    """The point of sigma_inf over t0 at plane distance ``n`` from the basepoint, with x > 0."""
    y0, b = BASEPOINT_Y, params.calibration
    square = 2.0 * y0 * b * (math.cosh(n) - 1.0) - (b - y0) ** 2
    if square <= 0.0:
        raise ParameterRangeError(f"no point of sigma_inf at distance {n} from the basepoint")
    return OmegaPoint.of(BASEPOINT_X + math.sqrt(square), b, params.base)


def deep_horoball_family(scene: Scene, n_values) -> DeepFamilyFit:
    n = np.asarray(n_values, dtype=float)
    lengths = np.array([combing_path(deep_horoball_target(scene.params, k), scene).length for k in n])
    slope, intercept = np.polyfit(n, np.log(lengths), 1)
    c = float(np.max(slope * n - np.log(lengths)))
    _LOGGER.info("Deep horoball family: slope %.4f, c %.4f", slope, c)
    return DeepFamilyFit(n, lengths, float(slope), float(intercept), c)


def k_prime(path: CombingPath) -> float:
    return path.k_prime()
