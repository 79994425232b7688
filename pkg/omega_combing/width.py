"""Asynchronous width of the combing and its length function.

Two combing paths to points at most 1 apart are walked on a common clock.
The tree legs run synchronously, the shorter one pausing at its end.  The
plane legs are coupled by matching points on a common vertical line after
normalization, refined around a horosphere both legs cross.  The measured
width is the largest model distance along that coupling; an independent
discrete Frechet value over the same samples bounds it from below.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .combing import (
    CombingPath,
    PlaneLeg,
    SampledPath,
    TreeLeg,
    combing_path,
    framed_geodesic,
    random_target,
)
from .const import (
    BOUND_ONE_SIDED,
    BOUND_TWO_SIDED,
    BOUND_ZERO_SIDED,
    DEFAULT_STEP,
    LENGTH_CONSTANT_LIMIT,
    TOLERANCE,
    overall_width_bound,
)
from .exceptions import PreconditionError
from .hyp_plane import (
    RHO_KNOT_SPACING,
    RHO_MIN_KNOTS,
    geodesic_points,
    geodesic_x_param,
    hyp_distance_array,
    rho_reparam,
)
from .omega_model import Horosphere, OmegaPoint, Scene, omega_distance
from .padic_tree import tree_point_distance
from .reparam import Reparam, retime

_LOGGER = logging.getLogger(__name__)

CASE_ZERO_SIDED = "zero-sided"
CASE_ONE_SIDED = "one-sided"
CASE_TWO_SIDED = "two-sided"
CASE_MIXED = "mixed"

# Appended to the case of a pair whose targets lie over different tree points.
CROSS_PLANE_SUFFIX = "-cross"


def cross_plane_case(case: str) -> str:
    return case + CROSS_PLANE_SUFFIX


def case_bound(case: str, p: int) -> float:
    """Width bound for a case label.

    The per-case bounds hold for pairs in one plane.  A cross-plane pair
    also pays the tree term ``2 log p``, capped by the overall bound.
    """
    overall = overall_width_bound(p)
    if case.endswith(CROSS_PLANE_SUFFIX):
        plane_case = case[: -len(CROSS_PLANE_SUFFIX)]
        return min(case_bound(plane_case, p) + 2.0 * math.log(p), overall)
    return {
        CASE_ZERO_SIDED: BOUND_ZERO_SIDED,
        CASE_ONE_SIDED: BOUND_ONE_SIDED,
        CASE_TWO_SIDED: BOUND_TWO_SIDED,
    }.get(case, overall)


# ---------------------------------------------------------------------------
# Reparametrizations
# ---------------------------------------------------------------------------


def psi_tree_reparam(leg_a: TreeLeg, leg_b: TreeLeg) -> tuple[Reparam, Reparam]:
    """Run both tree legs at unit speed; the shorter one waits at its end."""
    la, lb = leg_a.raw_length, leg_b.raw_length
    top = max(la, lb)
    count = max(2, int(math.ceil(top / RHO_KNOT_SPACING)) + 1)
    t = np.union1d(np.linspace(0.0, top, count), [min(la, lb)])
    return Reparam(t, np.minimum(t, la)), Reparam(t, np.minimum(t, lb))


@dataclass(frozen=True)
class CaseGeometry:
    """Distinguished parameters of the construction around a shared horosphere.

    ``t_*`` are parameters of the longer leg, ``u_*`` of the shorter one.
    ``first`` is 1 or 2 and ``second`` 3 or 4, naming the branch taken
    before and after the exit point.
    """

    base: str
    t_a: float
    t_b: float
    u_a_prime: float
    u_b_prime: float
    t_a_prime: float
    t_b_prime: float
    d: float
    first: int
    second: int
    coincidence_gap: float


@dataclass(frozen=True, eq=False)
class PlaneCoupling:
    """A monotone coupling of the longer plane leg (``xi``) with the shorter one."""

    xi: np.ndarray
    gamma: np.ndarray
    case: str
    geometry: CaseGeometry | None = None

    def reparams(self) -> tuple[Reparam, Reparam]:
        return retime(self.xi, self.gamma)


def _leg_sigmas(leg: PlaneLeg) -> list[Horosphere]:
    seen: list[Horosphere] = []
    for piece in leg.pieces:
        if piece.sigma is not None and piece.sigma not in seen:
            seen.append(piece.sigma)
    return seen


def _rho_coupling(xi: PlaneLeg, gamma: PlaneLeg) -> tuple[np.ndarray, np.ndarray, Reparam | None]:
    lx, lg = xi.raw_length, gamma.raw_length
    if xi.geodesic is None or gamma.geodesic is None:
        return np.array([0.0, lx]), np.array([0.0, lg]), None
    rho = rho_reparam(gamma.geodesic, xi.geodesic)
    return np.append(rho.t, lx), np.append(rho.u, lg), rho


def _span(grid: np.ndarray, a: float, b: float) -> np.ndarray:
    inner = grid[(grid > a) & (grid < b)]
    return np.concatenate(([a], inner, [b]))


def _two_sided(xi: PlaneLeg, gamma: PlaneLeg, sigma: Horosphere, rho: Reparam) -> PlaneCoupling | None:
    fx = framed_geodesic(xi.geodesic, sigma)
    fg = framed_geodesic(gamma.geodesic, sigma)
    if fx.is_vertical or fg.is_vertical:
        return None
    lx, lg = xi.raw_length, gamma.raw_length
    piece = next(piece for piece in xi.pieces if piece.sigma == sigma)
    t_a, t_b = piece.start, piece.end

    def v(t):
        x = geodesic_points(fx, t)[0]
        return np.clip(geodesic_x_param(fg, x), 0.0, lg)

    rho_inv = rho.inverse()
    u_a1 = float(v(t_a))
    u_b1 = float(v(t_b))
    count = max(RHO_MIN_KNOTS, int(math.ceil(lx / RHO_KNOT_SPACING)) + 1)
    grid = np.linspace(0.0, lx, count)
    segments: list[tuple[np.ndarray, np.ndarray]] = []

    if float(rho(t_a)) > u_a1:
        first, t_a1 = 1, t_a
        ts = _span(grid, 0.0, t_b)
        segments.append((ts, v(ts)))
    else:
        first = 2
        t_a1 = min(float(rho_inv(u_a1)), t_b)
        ts = _span(grid, 0.0, t_a)
        segments.append((ts, rho(ts)))
        ts = _span(grid, t_a, t_a1)
        segments.append((np.full_like(ts, t_a), rho(ts)))
        ts = _span(grid, t_a, t_b)
        segments.append((ts, v(ts)))

    if float(rho(t_b)) <= u_b1:
        second = 3
        t_b1 = max(float(rho_inv(u_b1)), t_b)
        ts = _span(grid, t_b, t_b1)
        segments.append((ts, np.full_like(ts, u_b1)))
        ts = _span(grid, t_b1, lx)
        segments.append((ts, rho(ts)))
    else:
        second = 4
        t_b1 = min(float(rho_inv(u_b1)), t_b)
        fs = _span(grid, t_b1, t_b)
        segments.append((np.full_like(fs, t_b), rho(fs)))
        ts = _span(grid, t_b, lx)
        segments.append((ts, rho(ts)))
    segments.append((np.array([lx]), np.array([lg])))

    ux = np.concatenate([s[0] for s in segments])
    ug = np.concatenate([s[1] for s in segments])
    ug[0] = 0.0

    window = _span(grid, max(t_a, t_a1), t_b)
    matched = v(window)
    live = (matched > 0.0) & (matched < lg)
    gap = 0.0
    if np.any(live):
        x_xi = geodesic_points(fx, window[live])[0]
        x_gamma = geodesic_points(fg, matched[live])[0]
        gap = float(np.max(np.abs(x_xi - x_gamma)))

    geometry = CaseGeometry(
        sigma.key, t_a, t_b, u_a1, u_b1, t_a1, t_b1, 0.5 * (t_b + lx), first, second, gap
    )
    _LOGGER.debug("Two-sided coupling around %s: branches %d and %d", sigma.key, first, second)
    return PlaneCoupling(ux, ug, CASE_TWO_SIDED, geometry)


def omega_reparams(xi: PlaneLeg, gamma: PlaneLeg, scene: Scene) -> PlaneCoupling:
    """Couple two adapted plane legs from a common start.

    ``xi`` is the longer leg.  When both raw legs cross the same single
    horosphere the coupling follows common verticals of that horosphere's
    frame between its entry and exit; otherwise it is the plain matching
    along verticals of the normalized pair.
    """
    ux, ug, rho = _rho_coupling(xi, gamma)
    sx, sg = _leg_sigmas(xi), _leg_sigmas(gamma)
    if not sx and not sg:
        return PlaneCoupling(ux, ug, CASE_ZERO_SIDED)
    if not sx or not sg:
        return PlaneCoupling(ux, ug, CASE_ONE_SIDED)
    if len(sx) == 1 and sx == sg and rho is not None:
        coupling = _two_sided(xi, gamma, sx[0], rho)
        if coupling is not None:
            return coupling
        return PlaneCoupling(ux, ug, CASE_TWO_SIDED)
    return PlaneCoupling(ux, ug, CASE_MIXED)


# ---------------------------------------------------------------------------
# Discrete Frechet
# ---------------------------------------------------------------------------


def omega_distance_matrix(first: SampledPath, second: SampledPath) -> np.ndarray:
    """Model distances between all samples of two paths from the same base vertex."""
    plane = hyp_distance_array(first.x[:, None], first.y[:, None], second.x[None, :], second.y[None, :])
    shared = first.route.common_prefix(second.route)
    s1 = first.s_tree[:, None]
    s2 = second.s_tree[None, :]
    tree = s1 + s2 - 2.0 * np.minimum(np.minimum(s1, s2), shared)
    return plane + tree


def frechet_from_matrix(dist: np.ndarray) -> float:
    """Discrete Frechet value of a distance matrix, filled one anti-diagonal at a time."""
    n, m = dist.shape
    if n == 0 or m == 0:
        raise PreconditionError("discrete Frechet needs two nonempty sample lists")
    ca = np.full((n, m), np.inf)
    ca[0, 0] = dist[0, 0]
    for k in range(1, n + m - 1):
        i = np.arange(max(0, k - m + 1), min(n - 1, k) + 1)
        j = k - i
        best = np.full(i.shape, np.inf)
        up = i > 0
        best[up] = ca[i[up] - 1, j[up]]
        left = j > 0
        best[left] = np.minimum(best[left], ca[i[left], j[left] - 1])
        diag = up & left
        best[diag] = np.minimum(best[diag], ca[i[diag] - 1, j[diag] - 1])
        ca[i, j] = np.maximum(best, dist[i, j])
    return float(ca[-1, -1])


def discrete_frechet(first, second, metric=omega_distance_matrix) -> float:
    """Discrete Frechet distance of two sample lists under ``metric``.

    ``metric(first, second)`` returns the full distance matrix.
    """
    if len(first) == 0 or len(second) == 0:
        raise PreconditionError("discrete Frechet needs two nonempty sample lists")
    return frechet_from_matrix(np.asarray(metric(first, second), dtype=float))


def _nearest(raw: np.ndarray, values: np.ndarray) -> np.ndarray:
    if raw.size == 1:
        return np.zeros(values.shape, dtype=int)
    idx = np.clip(np.searchsorted(raw, values), 1, raw.size - 1)
    left, right = raw[idx - 1], raw[idx]
    return np.where(values - left <= right - values, idx - 1, idx)


def staircase(first: np.ndarray, second: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """A monotone lattice path from (0, 0) to (n-1, m-1) through the given index pairs.

    Between consecutive pairs both indices advance proportionally, one step
    at a time, so the result is a valid discrete Frechet coupling.
    """
    a = np.maximum.accumulate(np.concatenate(([0], first, [n - 1])).clip(0, n - 1))
    b = np.maximum.accumulate(np.concatenate(([0], second, [m - 1])).clip(0, m - 1))
    rows, cols = [np.array([0])], [np.array([0])]
    for a0, b0, a1, b1 in zip(a[:-1], b[:-1], a[1:], b[1:]):
        steps = int(max(a1 - a0, b1 - b0))
        if steps == 0:
            continue
        k = np.arange(1, steps + 1)
        rows.append(a0 + np.rint(k * (a1 - a0) / steps).astype(int))
        cols.append(b0 + np.rint(k * (b1 - b0) / steps).astype(int))
    return np.concatenate(rows), np.concatenate(cols)


# ---------------------------------------------------------------------------
# Width
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WidthReport:
    first: OmegaPoint
    second: OmegaPoint
    case: str
    distance: float
    measured: float
    oracle: float
    case_bound: float
    bound: float
    slack: float
    lengths: tuple[float, float]
    reparams: tuple[Reparam, Reparam]
    geometry: CaseGeometry | None = None

    @property
    def passed(self) -> bool:
        return self.oracle <= self.bound + self.slack

    def row(self, pair: int) -> dict:
        return {
            "pair": pair,
            "case": self.case,
            "distance": self.distance,
            "measured": self.measured,
            "oracle": self.oracle,
            "case_bound": self.case_bound,
            "bound": self.bound,
            "slack": self.slack,
            "passed": self.passed,
        }


def _coupled_clocks(p: CombingPath, q: CombingPath, coupling: PlaneCoupling, xi_is_p: bool) -> tuple[Reparam, Reparam]:
    lp, lq = p.tree_leg.raw_length, q.tree_leg.raw_length
    psi_p, psi_q = psi_tree_reparam(p.tree_leg, q.tree_leg)
    plane_p, plane_q = (coupling.xi, coupling.gamma) if xi_is_p else (coupling.gamma, coupling.xi)
    return retime(np.concatenate((psi_p.u, lp + plane_p)), np.concatenate((psi_q.u, lq + plane_q)))


def async_width(
    first: OmegaPoint,
    second: OmegaPoint,
    scene: Scene,
    step: float = DEFAULT_STEP,
    basepoint: OmegaPoint | None = None,
) -> WidthReport:
    """Measured and oracle asynchronous width of the combing paths to two nearby points."""
    params = scene.params
    distance = omega_distance(first, second, params)
    if distance > 1.0 + TOLERANCE:
        raise PreconditionError(f"points are {distance:.6f} apart, more than 1")
    path_p = combing_path(first, scene, basepoint)
    path_q = combing_path(second, scene, basepoint)
    xi_is_p = path_p.plane_leg.raw_length >= path_q.plane_leg.raw_length
    xi, gamma = (path_p, path_q) if xi_is_p else (path_q, path_p)
    coupling = omega_reparams(xi.plane_leg, gamma.plane_leg, scene)
    rep_p, rep_q = _coupled_clocks(path_p, path_q, coupling, xi_is_p)

    samples_p = path_p.sample(step, scene)
    samples_q = path_q.sample(step, scene)
    dist = omega_distance_matrix(samples_p, samples_q)
    rows, cols = staircase(
        _nearest(samples_p.raw, rep_p.u), _nearest(samples_q.raw, rep_q.u), len(samples_p), len(samples_q)
    )
    measured = float(dist[rows, cols].max())
    oracle = frechet_from_matrix(dist)
    case = coupling.case
    if tree_point_distance(first.tree, second.tree, params.edge_length) > TOLERANCE:
        case = cross_plane_case(case)
    report = WidthReport(
        first,
        second,
        case,
        distance,
        measured,
        oracle,
        case_bound(case, params.p),
        overall_width_bound(params.p),
        2.0 * step,
        (path_p.length, path_q.length),
        (rep_p, rep_q),
        coupling.geometry,
    )
    _LOGGER.debug("Width %s: measured %.4f oracle %.4f", report.case, measured, oracle)
    return report


# ---------------------------------------------------------------------------
# Length function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LengthRow:
    n: int
    max_length: float
    samples: int
    exp_n: float

    @property
    def passed(self) -> bool:
        return self.max_length <= LENGTH_CONSTANT_LIMIT * self.exp_n

    def row(self) -> dict:
        return {
            "n": self.n,
            "max_length": self.max_length,
            "samples": self.samples,
            "exp_n": self.exp_n,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class LengthSample:
    n: int
    max_length: float
    targets: tuple[OmegaPoint, ...]


def sample_lengths(
    scene: Scene,
    n: int,
    samples: int,
    rng: np.random.Generator,
    sampling: Scene | None = None,
) -> LengthSample:
    """Longest combing path in ``scene`` over random targets within distance ``n``.

    Targets are drawn outside the horoballs of ``sampling``, which defaults
    to ``scene`` and must contain it.
    """
    count = 1 if n == 0 else samples
    targets = tuple(random_target(rng, sampling or scene, float(n)) for _ in range(count))
    return LengthSample(n, max(combing_path(target, scene).length for target in targets), targets)


def sampled_max_length(scene: Scene, n: int, samples: int, rng: np.random.Generator) -> float:
    """Longest combing path over ``samples`` random targets within distance ``n``."""
    return sample_lengths(scene, n, samples, rng).max_length


def length_rows(maxima, samples: int) -> list[LengthRow]:
    """Rows for n = 0, 1, ... from per-n maxima, keeping a running maximum."""
    rows: list[LengthRow] = []
    best = 0.0
    for n, value in enumerate(maxima):
        best = max(best, float(value))
        rows.append(LengthRow(n, best, 1 if n == 0 else samples, math.exp(n)))
        _LOGGER.debug("L(%d) >= %.4f", n, best)
    return rows


def length_function(scene: Scene, n_max: int, samples: int, rng: np.random.Generator) -> list[LengthRow]:
    """Largest combing length over sampled targets within distance ``n`` of the basepoint.

    The value is a running maximum, so it never decreases with ``n``.
    """
    return length_rows([sampled_max_length(scene, n, samples, rng) for n in range(n_max + 1)], samples)


def fit_length_constant(rows: list[LengthRow]) -> float:
    """Least C with L(n) <= C e**n over the rows with n >= 1."""
    ratios = [row.max_length / row.exp_n for row in rows if row.n >= 1]
    return max(ratios, default=0.0)


__all__ = [
    "CaseGeometry",
    "LengthRow",
    "LengthSample",
    "PlaneCoupling",
    "WidthReport",
    "async_width",
    "discrete_frechet",
    "fit_length_constant",
    "frechet_from_matrix",
    "length_function",
    "length_rows",
    "omega_distance_matrix",
    "omega_reparams",
    "psi_tree_reparam",
    "sample_lengths",
    "sampled_max_length",
    "staircase",
]
