"""The Bruhat-Tits tree of PGL2(Q_p) realized with exact rationals.

A vertex is the homothety class of the lattice spanned by the columns of
``[[p**a, b], [0, 1]]``; ``b`` lives in Z[1/p] and only matters modulo
``p**a Z_p``, so it is stored as its residue in ``[0, p**a)``.  Matrices
with entries in Z[1/p] act on the left; every p-adic computation reduces
to rational arithmetic plus valuations.

Heights count edges: the vertex above has ``h = a``, the single incoming
neighbour sits one level lower and the ``p`` outgoing ones one level
higher.  The end fixed by the upper-triangular group is at ``a -> -inf``.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .const import TREE_EDGE_LENGTH
from .exceptions import ParameterRangeError

_LOGGER = logging.getLogger(__name__)


def valuation(q, p: int) -> int:
    """Exponent of ``p`` in the rational ``q``."""
    q = Fraction(q)
    if q == 0:
        raise ParameterRangeError("the valuation of 0 is infinite")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def reduce_mod(b, a: int, p: int) -> Fraction:
    """Canonical representative of ``b`` modulo ``p**a Z_p`` in ``[0, p**a)``."""
    b = Fraction(b)
    if b == 0:
        return Fraction(0)
    den, k = b.denominator, 0
    while den % p == 0:
        den //= p
        k += 1
    e = a + k
    if e <= 0:
        return Fraction(0)
    modulus = p**e
    return Fraction((b.numerator * pow(den, -1, modulus)) % modulus, p**k)


@dataclass(frozen=True, order=True)
class TreeVertex:
    """Lattice class ``[[p**a, b], [0, 1]]`` with ``b`` already reduced."""

    a: int
    b: Fraction
    p: int

    @classmethod
    def canonical(cls, a: int, b, p: int) -> TreeVertex:
        return cls(a, reduce_mod(b, a, p), p)

    @property
    def height(self) -> int:
        return self.a

    def to_json(self) -> list[int]:
        return [self.a, self.b.numerator, self.b.denominator]

    @classmethod
    def from_json(cls, data, p: int) -> TreeVertex:
        a, num, den = data
        return cls.canonical(int(a), Fraction(int(num), int(den)), p)

    def __str__(self) -> str:
        return f"[{self.a}:{self.b}]"


def base_vertex(p: int) -> TreeVertex:
    """The standard lattice class t0, of height 0."""
    return TreeVertex(0, Fraction(0), p)


def ancestor(v: TreeVertex, level: int) -> TreeVertex:
    """The vertex at ``level <= v.a`` on the ray from ``v`` to the fixed end."""
    return TreeVertex.canonical(level, v.b, v.p)


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    """The incoming neighbour followed by the ``p`` outgoing ones."""
    p = v.p
    result = [ancestor(v, v.a - 1)]
    step = Fraction(p) ** v.a
    result.extend(TreeVertex.canonical(v.a + 1, v.b + j * step, p) for j in range(p))
    return result


def _merge_level(u: TreeVertex, v: TreeVertex) -> int:
    level = min(u.a, v.a)
    if u.b != v.b:
        level = min(level, valuation(u.b - v.b, u.p))
    return level


def tree_distance(u: TreeVertex, v: TreeVertex) -> int:
    """Number of edges between two vertices."""
    m = _merge_level(u, v)
    return (u.a - m) + (v.a - m)


def tree_geodesic(u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
    """Vertices of the unique path from ``u`` to ``v``."""
    m = _merge_level(u, v)
    down = [ancestor(u, level) for level in range(u.a, m - 1, -1)]
    up = [ancestor(v, level) for level in range(m + 1, v.a + 1)]
    return down + up


def ball(center: TreeVertex, radius: int) -> dict[TreeVertex, int]:
    """Vertices within ``radius`` edges, mapped to their distance."""
    seen = {center: 0}
    queue = deque([center])
    while queue:
        vertex = queue.popleft()
        depth = seen[vertex]
        if depth == radius:
            continue
        for nxt in neighbors(vertex):
            if nxt not in seen:
                seen[nxt] = depth + 1
                queue.append(nxt)
    return seen


def bfs_distance(u: TreeVertex, v: TreeVertex, max_radius: int = 64) -> int:
    """Distance found by breadth-first search; an oracle for :func:`tree_distance`."""
    seen = {u}
    frontier = [u]
    for depth in range(max_radius + 1):
        if v in seen:
            return depth
        nxt_frontier = []
        for vertex in frontier:
            for nxt in neighbors(vertex):
                if nxt not in seen:
                    seen.add(nxt)
                    nxt_frontier.append(nxt)
        frontier = nxt_frontier
    raise ParameterRangeError(f"{v} is farther than {max_radius} edges from {u}")


def _order(q: Fraction, p: int) -> float:
    return math.inf if q == 0 else valuation(q, p)


def busemann(v: TreeVertex, end: Fraction | None) -> int:
    """Busemann function toward an end, normalized to vanish at the base vertex.

    ``end`` is a point of Q in P1(Q_p); None is the fixed end, for which the
    function is the height itself.
    """
    if end is None:
        return v.a
    p = v.p
    return v.a - 2 * min(v.a, _order(v.b - end, p)) + 2 * min(0, _order(-end, p))


def _entries(matrix):
    if hasattr(matrix, "entries"):
        return matrix.entries
    (a, b), (c, d) = matrix
    return Fraction(a), Fraction(b), Fraction(c), Fraction(d)


def tree_act(matrix, v: TreeVertex) -> TreeVertex:
    """Image of a vertex under a matrix with entries in Z[1/p].

    The product with ``[[p**a, b], [0, 1]]`` is column-reduced over Z_p:
    the bottom entry of least valuation becomes the pivot, the other is
    cleared, and the class is rescaled so the pivot is 1.
    """
    p = v.p
    alpha, beta, gamma, delta = _entries(matrix)
    scale = Fraction(p) ** v.a
    m00, m01 = alpha * scale, alpha * v.b + beta
    m10, m11 = gamma * scale, gamma * v.b + delta
    if m10 != 0 and (m11 == 0 or valuation(m10, p) < valuation(m11, p)):
        m00, m01, m10, m11 = m01, m00, m11, m10
    m00 -= (m10 / m11) * m01
    a = valuation(m00 / m11, p)
    return TreeVertex.canonical(a, m01 / m11, p)


# ---------------------------------------------------------------------------
# Points on edges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreePoint:
    """A point at fraction ``lam`` along the edge from ``u`` to ``v``.

    Instances are normalized: at a vertex ``v == u`` and ``lam == 0``;
    on an edge ``u`` is the lower endpoint.
    """

    u: TreeVertex
    v: TreeVertex
    lam: float = 0.0

    @classmethod
    def at_vertex(cls, vertex: TreeVertex) -> TreePoint:
        return cls(vertex, vertex, 0.0)

    @classmethod
    def on_edge(cls, u: TreeVertex, v: TreeVertex, lam: float) -> TreePoint:
        if not 0.0 <= lam <= 1.0:
            raise ParameterRangeError(f"edge fraction {lam} outside [0, 1]")
        if lam == 0.0 or u == v:
            return cls.at_vertex(u)
        if lam == 1.0:
            return cls.at_vertex(v)
        if tree_distance(u, v) != 1:
            raise ParameterRangeError(f"{u} and {v} are not adjacent")
        if u.a > v.a:
            u, v, lam = v, u, 1.0 - lam
        return cls(u, v, lam)

    @property
    def is_vertex(self) -> bool:
        return self.u == self.v

    @property
    def p(self) -> int:
        return self.u.p

    def endpoints(self) -> tuple[tuple[TreeVertex, float], ...]:
        """Edge endpoints with their distance from the point, in edges."""
        if self.is_vertex:
            return ((self.u, 0.0),)
        return ((self.u, self.lam), (self.v, 1.0 - self.lam))

    def moved(self, matrix) -> TreePoint:
        return TreePoint.on_edge(tree_act(matrix, self.u), tree_act(matrix, self.v), self.lam)


@dataclass(frozen=True)
class HeightFn:
    """Height relative to ``base``, counted in edges."""

    base: TreeVertex
    edge_length: float = TREE_EDGE_LENGTH

    def __call__(self, x: TreePoint | TreeVertex) -> float:
        return height(x) - self.base.a

    def busemann(self, x: TreePoint | TreeVertex) -> float:
        """Height converted to metric length."""
        return self(x) * self.edge_length


def height(x: TreePoint | TreeVertex, hf: HeightFn | None = None) -> float:
    """Height of a vertex or of a point interpolated along its edge."""
    if hf is not None:
        return hf(x)
    if isinstance(x, TreeVertex):
        return float(x.a)
    return (1.0 - x.lam) * x.u.a + x.lam * x.v.a


def tree_point_distance(t1: TreePoint, t2: TreePoint, edge_length: float = TREE_EDGE_LENGTH) -> float:
    """Metric distance between two tree points."""
    if not t1.is_vertex and (t1.u, t1.v) == (t2.u, t2.v):
        return abs(t1.lam - t2.lam) * edge_length
    best = min(
        o1 + tree_distance(e1, e2) + o2
        for e1, o1 in t1.endpoints()
        for e2, o2 in t2.endpoints()
    )
    return best * edge_length


# ---------------------------------------------------------------------------
# Routes from the base vertex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeRoute:
    """Geodesic from ``vertices[0]`` to a point of the last edge.

    ``length`` is metric and may stop short of the last vertex.
    """

    vertices: tuple[TreeVertex, ...]
    length: float
    edge_length: float = TREE_EDGE_LENGTH

    @classmethod
    def to_point(cls, start: TreeVertex, target: TreePoint, edge_length: float = TREE_EDGE_LENGTH) -> TreeRoute:
        if target.is_vertex:
            path = tree_geodesic(start, target.u)
            return cls(tuple(path), (len(path) - 1) * edge_length, edge_length)
        du = tree_distance(start, target.u)
        dv = tree_distance(start, target.v)
        if dv == du + 1:
            path = tree_geodesic(start, target.v)
            return cls(tuple(path), (du + target.lam) * edge_length, edge_length)
        path = tree_geodesic(start, target.u)
        return cls(tuple(path), (dv + 1.0 - target.lam) * edge_length, edge_length)

    @cached_property
    def knots(self) -> np.ndarray:
        return np.arange(len(self.vertices), dtype=float) * self.edge_length

    @cached_property
    def vertex_heights(self) -> np.ndarray:
        return np.array([v.a for v in self.vertices], dtype=float)

    def point_at(self, s: float) -> TreePoint:
        s = min(max(s, 0.0), self.length)
        k = int(s // self.edge_length)
        if k >= len(self.vertices) - 1:
            return TreePoint.at_vertex(self.vertices[-1])
        lam = s / self.edge_length - k
        return TreePoint.on_edge(self.vertices[k], self.vertices[k + 1], min(lam, 1.0))

    @property
    def end(self) -> TreePoint:
        return self.point_at(self.length)

    def height_at(self, s):
        """Heights (in edges) at arclength ``s``; vectorized."""
        if len(self.vertices) == 1:
            return np.full_like(np.asarray(s, dtype=float), self.vertex_heights[0])
        return np.interp(s, self.knots, self.vertex_heights)

    def edge_index(self, s) -> np.ndarray:
        k = np.floor(np.asarray(s, dtype=float) / self.edge_length).astype(int)
        return np.clip(k, 0, max(len(self.vertices) - 2, 0))

    def common_prefix(self, other: TreeRoute) -> float:
        """Metric length over which two routes from the same start agree."""
        m = 0
        for a, b in zip(self.vertices, other.vertices):
            if a != b:
                break
            m += 1
        return min((m - 1) * self.edge_length, self.length, other.length)
