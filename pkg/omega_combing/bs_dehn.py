"""Baumslag-Solitar groups BS(1, n) and the exponential lower-bound mechanism.

Words use the letters ``a A b B`` with uppercase for inverses and the single
relator ``a b A B**n``.  With ``n = p**2`` the assignment ``a -> diag(p, 1/p)``
and ``b -> [[1, 1], [0, 1]]`` embeds the group in PSL2(Z[1/p]) as the
stabilizer of sigma_inf.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import count

import numpy as np

from .const import (
    AREA_FROM_CORRIDORS,
    AREA_FROM_SEARCH,
    BS_LETTERS,
    DEFAULT_AREA_BUDGET,
    DEFAULT_CALIBRATION,
    DEFAULT_LOOP_SAMPLES,
    DEFAULT_SEARCH_KMAX,
    TREE_EDGE_LENGTH,
)
from .exceptions import NonTrivialWordError, ParameterRangeError
from .hyp_plane import HPoint
from .omega_model import ModelParams, OmegaPoint, omega_distance, project_pi, sigma_inf_height
from .padic_tree import TreePoint, TreeRoute, tree_act
from .psl2_group import (
    GroupElement,
    eta_act,
    generating_set,
    is_identity,
    is_prime,
    letter_elements,
    word_to_matrix,
)

_LOGGER = logging.getLogger(__name__)

# BS letters as PSL2 letters (lowercase is the inverse there).
_PSL2_LETTER = {"a": "A", "A": "a", "b": "T", "B": "t"}


def _check_letters(letters: str) -> str:
    bad = set(letters) - set(BS_LETTERS)
    if bad:
        raise ParameterRangeError(f"unknown letters {sorted(bad)} in word {letters!r}")
    return letters


def _free_reduce(letters: str) -> str:
    out: list[str] = []
    for letter in letters:
        if out and out[-1] == letter.swapcase():
            out.pop()
        else:
            out.append(letter)
    return "".join(out)


def _cyclic_reduce(letters: str) -> str:
    letters = _free_reduce(letters)
    while len(letters) > 1 and letters[0] == letters[-1].swapcase():
        letters = letters[1:-1]
    return letters


@dataclass(frozen=True)
class BSWord:
    """A word over ``a A b B`` in BS(1, n)."""

    n: int
    letters: str = ""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterRangeError(f"BS(1, n) needs n >= 2, got {self.n}")
        _check_letters(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: BSWord) -> BSWord:
        if other.n != self.n:
            raise ParameterRangeError("cannot concatenate words of different groups")
        return BSWord(self.n, self.letters + other.letters)

    def inverse(self) -> BSWord:
        return BSWord(self.n, self.letters[::-1].swapcase())

    def free_reduce(self) -> BSWord:
        return BSWord(self.n, _free_reduce(self.letters))

    def __str__(self) -> str:
        return self.letters or "1"


def relator(n: int) -> BSWord:
    return BSWord(n, "abA" + "B" * n)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RewriteStats:
    """Work done by the rewriting: b-letters produced and relators applied."""

    emitted_b: int = 0
    relator_applications: int = 0


@dataclass(frozen=True)
class BSNormalForm:
    """The element ``a**-k b**m a**l`` with ``n`` not dividing ``m`` when k, l > 0."""

    k: int
    m: int
    l: int
    stats: RewriteStats = field(default=RewriteStats(), compare=False)

    @property
    def is_power_of_b(self) -> bool:
        return self.k == 0 and self.l == 0

    @property
    def is_identity(self) -> bool:
        return self.k == 0 and self.l == 0 and self.m == 0


def bs_normal_form(word: BSWord) -> BSNormalForm:
    """Rewrite a word into ``a**-k b**m a**l`` letter by letter.

    A ``b`` crossing ``a**l`` becomes ``b**(n**l)``; an ``A`` with nothing
    to cancel moves left and multiplies the b-exponent by ``n``.
    """
    n = word.n
    k = m = l = 0
    emitted = applied = 0
    for letter in word.letters:
        if letter in "bB":
            step = n**l
            m += step if letter == "b" else -step
            emitted += step
            applied += (step - 1) // (n - 1)
        elif letter == "a":
            l += 1
        elif l > 0:
            l -= 1
        else:
            k += 1
            emitted += n * abs(m)
            applied += abs(m)
            m *= n
        while k > 0 and l > 0 and m % n == 0:
            m //= n
            k -= 1
            l -= 1
    return BSNormalForm(k, m, l, RewriteStats(emitted, applied))


def _square_root_prime(n: int) -> int:
    p = math.isqrt(n)
    if p * p != n or not is_prime(p):
        raise ParameterRangeError(f"n = {n} is not the square of a prime")
    return p


def bs_matrix(word: BSWord) -> GroupElement:
    """Image of the word in PSL2(Z[1/p]) for ``n = p**2``."""
    p = _square_root_prime(word.n)
    return word_to_matrix("".join(_PSL2_LETTER[c] for c in word.letters), p)


def normal_form_matrix(form: BSNormalForm, n: int) -> GroupElement:
    """Image of ``a**-k b**m a**l``, the map ``z -> n**(l-k) z + m n**-k``."""
    p = _square_root_prime(n)
    scale = Fraction(p) ** (form.l - form.k)
    return GroupElement.of(scale, form.m * Fraction(p) ** -(form.k + form.l), 0, 1 / scale, p)


def is_trivial(word: BSWord) -> bool:
    return bs_normal_form(word).is_identity


def witness_loop(k: int, n: int) -> BSWord:
    """The commutator ``[a**k b a**-k, b]``, of length ``4k + 4``."""
    if k < 1:
        raise ParameterRangeError(f"k must be >= 1, got {k}")
    x = "a" * k + "b" + "A" * k
    y = "b"
    return BSWord(n, x + y + x[::-1].swapcase() + y.swapcase())


def conjugated_b(k: int, n: int) -> BSWord:
    """``a**k b a**-k``, equal to ``b**(n**k)``."""
    return BSWord(n, "a" * k + "b" + "A" * k)


# ---------------------------------------------------------------------------
# Areas
# ---------------------------------------------------------------------------


def corridor_area(word: BSWord) -> int:
    """Lower bound on the area of a trivial word from its a-corridors.

    Every cell of a reduced diagram lies on an a-annulus or on a corridor
    joining two boundary a-edges.  Corridors do not cross, and a corridor
    whose ends enclose the element ``b**m`` has ``|m|`` cells (``|m| / n``
    when it starts with ``A``).  The minimum over admissible pairings is
    found by interval dynamic programming.  Cells on a-annuli are not
    counted; the witness loops have diagrams without them, so their value
    is exact.
    """
    if not is_trivial(word):
        raise NonTrivialWordError(f"{word} is not trivial in BS(1, {word.n})")
    return _corridor_area(word.n, word.letters)


@lru_cache(maxsize=100_000)
def _corridor_area(n: int, letters: str) -> int:
    size = len(letters)
    inner: dict[tuple[int, int], BSNormalForm] = {}
    for i in range(size):
        for j in range(i + 1, size):
            if letters[i] in "aA" and letters[j] == letters[i].swapcase():
                inner[i, j] = bs_normal_form(BSWord(n, letters[i + 1 : j]))

    def corridor(i: int, j: int) -> float:
        form = inner.get((i, j))
        if form is None or not form.is_power_of_b:
            return math.inf
        if letters[i] == "a":
            return abs(form.m)
        if form.m % n:
            return math.inf
        return abs(form.m) // n

    best = [[0.0] * (size + 1) for _ in range(size + 1)]
    for length in range(1, size + 1):
        for i in range(size - length + 1):
            j = i + length
            if letters[i] in "bB":
                best[i][j] = best[i + 1][j]
                continue
            value = math.inf
            for r in range(i + 1, j):
                cost = corridor(i, r)
                if cost == math.inf:
                    continue
                value = min(value, cost + best[i + 1][r] + best[r + 1][j])
            best[i][j] = value
    result = best[0][size]
    if result == math.inf:
        raise NonTrivialWordError(f"no corridor pairing for {letters!r}")
    return int(result)


@dataclass(frozen=True)
class AreaResult:
    """``value`` is the area when ``exact``, else a certified lower bound."""

    value: int
    exact: bool
    states: int


def _canonical(letters: str) -> str:
    word = _cyclic_reduce(letters)
    if not word:
        return ""
    return min(word[i:] + word[:i] for i in range(len(word)))


@lru_cache(maxsize=None)
def _relator_pieces(n: int) -> tuple[tuple[str, str], ...]:
    """Pairs ``(u, v**-1)`` for every split ``uv`` of a cyclic conjugate of the relator or its inverse."""
    r = relator(n).letters
    pieces = set()
    for word in (r, r[::-1].swapcase()):
        for shift in range(len(word)):
            rotated = word[shift:] + word[:shift]
            for cut in range(1, len(rotated) + 1):
                pieces.add((rotated[:cut], rotated[cut:][::-1].swapcase()))
    return tuple(sorted(pieces))


def _moves(n: int, state: str):
    size = len(state)
    doubled = state + state
    for u, replacement in _relator_pieces(n):
        if len(u) > size:
            continue
        for i in range(size):
            if doubled.startswith(u, i):
                end = i + len(u)
                if end <= size:
                    yield _canonical(state[:i] + replacement + state[end:])
                else:
                    yield _canonical(state[end - size : i] + replacement)


def area_oracle(word: BSWord, budget: int = DEFAULT_AREA_BUDGET) -> AreaResult:
    """Minimal number of relator applications reducing a trivial word to nothing.

    Best-first search over cyclically reduced words up to rotation; one move
    replaces a subword ``u`` by ``v**-1`` where ``uv`` is a cyclic conjugate of
    the relator or its inverse.  :func:`corridor_area` never overestimates
    and guides the search.  Past ``budget`` states the best lower bound is
    returned instead.
    """
    if not is_trivial(word):
        raise NonTrivialWordError(f"{word} is not trivial in BS(1, {word.n})")
    n = word.n
    start = _canonical(word.letters)
    tie = count()
    frontier = [(_corridor_area(n, start) if start else 0, next(tie), 0, start)]
    depth = {start: 0}
    states = 1
    bound = 0
    while frontier:
        f, _, g, state = heapq.heappop(frontier)
        if g > depth.get(state, math.inf):
            continue
        bound = max(bound, f)
        if not state:
            _LOGGER.debug("Area of %s is %d after %d states", word, g, states)
            return AreaResult(g, True, states)
        for nxt in _moves(n, state):
            g2 = g + 1
            if g2 >= depth.get(nxt, math.inf):
                continue
            depth[nxt] = g2
            states += 1
            if states > budget:
                _LOGGER.info("Area search for %s stopped at %d states", word, budget)
                return AreaResult(bound, False, states)
            h = _corridor_area(n, nxt) if nxt else 0
            heapq.heappush(frontier, (g2 + h, next(tie), g2, nxt))
    return AreaResult(bound, False, states)


# ---------------------------------------------------------------------------
# Loops on sigma_inf
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledLoop:
    points: tuple[OmegaPoint, ...]
    length: float

    @property
    def closed(self) -> bool:
        first, last = self.points[0], self.points[-1]
        return first.tree == last.tree and abs(first.plane.x - last.plane.x) <= 1e-9 and abs(first.plane.y - last.plane.y) <= 1e-9

    def polyline_length(self, params: ModelParams) -> float:
        return float(sum(omega_distance(a, b, params) for a, b in zip(self.points, self.points[1:])))


def _letter_step(letter: str, params: ModelParams, samples: int) -> list[OmegaPoint]:
    """Points of the step traced by one letter from ``(0, B, t0)``, start excluded."""
    base = params.base
    b = params.calibration
    if letter in "bB":
        sign = 1.0 if letter == "b" else -1.0
        return [OmegaPoint.of(sign * k / samples, b, base) for k in range(1, samples + 1)]
    target = tree_act(letter_elements(params.p)[_PSL2_LETTER[letter]], base)
    route = TreeRoute.to_point(base, TreePoint.at_vertex(target), params.edge_length)
    out = []
    for s in np.linspace(0.0, route.length, samples + 1)[1:]:
        t = route.point_at(float(s))
        out.append(OmegaPoint(HPoint(0.0, sigma_inf_height(t, params)), t))
    return out


def step_length(letter: str, params: ModelParams) -> float:
    """Length of the step of one letter: ``1/B`` along a horocycle or ``1 + 2 log p`` up two edges."""
    if letter in "bB":
        return 1.0 / params.calibration
    return 2.0 * params.edge_length + params.distortion


def embed_loop_in_sigma(word: BSWord, params: ModelParams, samples: int = DEFAULT_LOOP_SAMPLES) -> SampledLoop:
    """Trace a loop of BS(1, p**2) on sigma_inf from ``(0, B, t0)``.

    A ``b`` is a unit horocyclic step at height B and an ``a`` climbs two
    edges while the plane point rises from B to ``p**2 B``; each step is
    moved into place by the element read so far.
    """
    if word.n != params.p**2:
        raise ParameterRangeError(f"loops of BS(1, {word.n}) do not live on sigma_inf for p = {params.p}")
    prefix = GroupElement.identity(params.p)
    if not is_identity(bs_matrix(word)):
        raise NonTrivialWordError(f"{word} is not a loop")
    table = {letter: bs_matrix(BSWord(word.n, letter)) for letter in BS_LETTERS}
    points = [OmegaPoint.of(0.0, params.calibration, params.base)]
    length = 0.0
    for letter in word.letters:
        points.extend(eta_act(prefix, q) for q in _letter_step(letter, params, samples))
        length += step_length(letter, params)
        prefix = prefix * table[letter]
    loop = SampledLoop(tuple(points), length)
    if not loop.closed:
        _LOGGER.warning("Loop for %s misses its start by more than 1e-9", word)
    return loop


def projection_distortion_check(p: int) -> float:
    """Plane length of the projection of a unit tree segment onto sigma_inf.

    The segment climbs two edges from t0 with the plane point frozen; its
    projection is vertical, so the length is the log of the height ratio,
    exactly ``2 log p``.
    """
    params = ModelParams(p, edge_length=TREE_EDGE_LENGTH)
    route = TreeRoute.to_point(
        params.base,
        TreePoint.at_vertex(tree_act(generating_set(p)["A"], params.base)),
        params.edge_length,
    )
    start = project_pi(OmegaPoint(HPoint(0.0, 1.0), route.point_at(0.0)), params)
    end = project_pi(OmegaPoint(HPoint(0.0, 1.0), route.point_at(1.0)), params)
    value = math.log(end.plane.y / start.plane.y)
    if abs(value - params.distortion) > 1e-12:
        raise ParameterRangeError(f"projected length {value} differs from 2 log p = {params.distortion}")
    return value


# ---------------------------------------------------------------------------
# Table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DehnRow:
    k: int
    word_length: int
    area: int
    area_exact: bool
    area_source: str
    corridor_area: int
    rewriting_cost: int
    relator_applications: int
    distortion: float
    loop_length: float

    def row(self) -> dict:
        return dict(self.__dict__)


def dehn_table(
    n: int,
    k_max: int,
    budget: int = DEFAULT_AREA_BUDGET,
    search_kmax: int = DEFAULT_SEARCH_KMAX,
    calibration: float = DEFAULT_CALIBRATION,
) -> list[DehnRow]:
    """Witness loops of BS(1, n) with their areas and rewriting costs.

    ``n`` must be the square of a prime p.  The search oracle runs for
    ``k <= search_kmax``; beyond that the area column is the corridor count,
    a certified lower bound marked by ``area_source``.  ``loop_length`` is
    the length of the polyline traced on sigma_inf.
    """
    params = ModelParams(_square_root_prime(n), calibration)
    distortion = projection_distortion_check(params.p)
    rows = []
    for k in range(1, k_max + 1):
        loop = witness_loop(k, n)
        corridors = corridor_area(loop)
        if k <= search_kmax:
            found = area_oracle(loop, budget)
            area, exact, source = found.value, found.exact, AREA_FROM_SEARCH
        else:
            area, exact, source = corridors, False, AREA_FROM_CORRIDORS
        stats = bs_normal_form(conjugated_b(k, n)).stats
        rows.append(
            DehnRow(
                k,
                len(loop),
                area,
                exact,
                source,
                corridors,
                stats.emitted_b,
                stats.relator_applications,
                distortion,
                embed_loop_in_sigma(loop, params).polyline_length(params),
            )
        )
        _LOGGER.debug("Witness loop k=%d: area %d (%s), corridors %d", k, area, source, corridors)
    return rows
