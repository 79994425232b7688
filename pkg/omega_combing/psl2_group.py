"""Exact arithmetic in PSL2(Z[1/p]) and its diagonal action on H2 x T_p."""

from __future__ import annotations

import dataclasses
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .const import PSL2_LETTERS
from .exceptions import ParameterRangeError
from .hyp_plane import mobius_apply

_LOGGER = logging.getLogger(__name__)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class GroupElement:
    """A determinant-one matrix over Z[1/p], taken up to sign.

    Construct through :meth:`of`, which checks the entries and fixes the
    sign so the first nonzero entry is positive.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    p: int

    @classmethod
    def of(cls, a, b, c, d, p: int) -> GroupElement:
        a, b, c, d = (Fraction(x) for x in (a, b, c, d))
        if a * d - b * c != 1:
            raise ParameterRangeError(f"determinant of [[{a}, {b}], [{c}, {d}]] is not 1")
        for x in (a, b, c, d):
            den = x.denominator
            while den % p == 0:
                den //= p
            if den != 1:
                raise ParameterRangeError(f"entry {x} is not in Z[1/{p}]")
        first = next(x for x in (a, b, c, d) if x != 0)
        if first < 0:
            a, b, c, d = -a, -b, -c, -d
        return cls(a, b, c, d, p)

    @classmethod
    def identity(cls, p: int) -> GroupElement:
        return cls.of(1, 0, 0, 1, p)

    @property
    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a, self.b, self.c, self.d

    def as_real_matrix(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    @property
    def boundary_image(self) -> Fraction | None:
        """g(infinity); None for infinity itself."""
        if self.c == 0:
            return None
        return self.a / self.c

    def to_json(self) -> list[list[int]]:
        return [[x.numerator, x.denominator] for x in self.entries]

    @classmethod
    def from_json(cls, data, p: int) -> GroupElement:
        return cls.of(*(Fraction(int(n), int(d)) for n, d in data), p=p)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def multiply(m1: GroupElement, m2: GroupElement) -> GroupElement:
    return GroupElement.of(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
        m1.p,
    )


def invert(m: GroupElement) -> GroupElement:
    return GroupElement.of(m.d, -m.b, -m.c, m.a, m.p)


def is_identity(m: GroupElement) -> bool:
    return m == GroupElement.identity(m.p)


def generating_set(p: int) -> dict[str, GroupElement]:
    """The generators S, T, A keyed by their letters."""
    if not is_prime(p):
        raise ParameterRangeError(f"{p} is not prime")
    return {
        "S": GroupElement.of(0, -1, 1, 0, p),
        "T": GroupElement.of(1, 1, 0, 1, p),
        "A": GroupElement.of(p, 0, 0, Fraction(1, p), p),
    }


def letter_elements(p: int) -> dict[str, GroupElement]:
    """Every letter of the word alphabet, inverses in lowercase."""
    gens = generating_set(p)
    table = dict(gens)
    table.update({name.lower(): invert(g) for name, g in gens.items()})
    return table


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


def check_word(word: str) -> str:
    bad = set(word) - set(PSL2_LETTERS)
    if bad:
        raise ParameterRangeError(f"unknown letters {sorted(bad)} in word {word!r}")
    return word


def invert_word(word: str) -> str:
    return check_word(word)[::-1].swapcase()


def free_reduce(word: str) -> str:
    out: list[str] = []
    for letter in check_word(word):
        if out and out[-1] == letter.swapcase():
            out.pop()
        else:
            out.append(letter)
    return "".join(out)


def word_to_matrix(word: str, p: int) -> GroupElement:
    table = letter_elements(p)
    result = GroupElement.identity(p)
    for letter in check_word(word):
        result = result * table[letter]
    return result


def word_problem(word: str, p: int) -> bool:
    """True iff the word represents the identity."""
    return is_identity(word_to_matrix(word, p))


def ball(p: int, radius: int) -> dict[GroupElement, str]:
    """Elements of word length <= radius mapped to a shortest word.

    Insertion order is breadth-first with letters in the order S s T t A a,
    so every consumer sees the same enumeration.
    """
    table = letter_elements(p)
    order = [letter for letter in PSL2_LETTERS]
    start = GroupElement.identity(p)
    seen = {start: ""}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        word = seen[g]
        if len(word) == radius:
            continue
        for letter in order:
            h = g * table[letter]
            if h not in seen:
                seen[h] = word + letter
                queue.append(h)
    _LOGGER.debug("ball of radius %d for p=%d has %d elements", radius, p, len(seen))
    return seen


def ball_sizes(p: int, r_max: int) -> list[int]:
    """Cumulative ball sizes for radii 0..r_max."""
    lengths = [len(word) for word in ball(p, r_max).values()]
    return [sum(1 for n in lengths if n <= r) for r in range(r_max + 1)]


# ---------------------------------------------------------------------------
# Diagonal action
# ---------------------------------------------------------------------------


def eta_act(m: GroupElement, q):
    """Apply ``m`` to both factors of a point of H2 x T_p."""
    return dataclasses.replace(q, plane=mobius_apply(m, q.plane), tree=q.tree.moved(m))
