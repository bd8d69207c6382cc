"""Urn mechanism for the increase substep.

Elementary urn ``B_i`` (1 <= i <= n) holds ``m_i - k_i + 1`` balls of color
``c_i`` and ``k_i - m_{i+1}`` balls of color ``d_i``.  One draw, with
replacement, is made from each union urn ``B_{a,j} = B_a u ... u B_j`` in the
order given by :func:`urn_order`; the colors form a word, and the class of
the word decides which coordinate of ``m`` goes up.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Sequence, Tuple

from .core import ResourceError, StateSignature, StructureError

MAX_ENUMERATION_N = 4


@dataclass(frozen=True, order=True)
class Letter:
    color: str
    index: int

    def __post_init__(self):
        if self.color not in ("c", "d"):
            raise StructureError(f"unknown color {self.color!r}")
        if self.index < 1:
            raise StructureError(f"letter index must be >= 1, got {self.index}")

    def __str__(self):
        return f"{self.color}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Letter":
        text = text.strip()
        try:
            return cls(text[0], int(text[1:]))
        except (IndexError, ValueError):
            raise StructureError(f"cannot parse letter {text!r}") from None


Word = Tuple[Letter, ...]


def format_word(word: Sequence[Letter]) -> str:
    return ",".join(map(str, word))


def parse_word(text: str) -> Word:
    return tuple(Letter.parse(part) for part in text.split(","))


@lru_cache(maxsize=None)
def urn_order(n: int) -> Tuple[Tuple[int, int], ...]:
    """Spans ``(a, j)`` of the union urns in draw order: by ``j``, then ``a`` descending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return tuple((a, j) for j in range(1, n + 1) for a in range(j, 0, -1))


def urn_letters(a: int, j: int) -> Tuple[Letter, ...]:
    """Letter types available in urn ``B_{a,j}``, in the order c_a, d_a, c_{a+1}, ..."""
    return tuple(Letter(color, i) for i in range(a, j + 1) for color in "cd")


def elementary_counts(state: StateSignature) -> Dict[Letter, int]:
    m, k = state.m, state.k.k
    out = {}
    for i in range(1, len(k) + 1):
        out[Letter("c", i)] = m[i - 1] - k[i - 1] + 1
        out[Letter("d", i)] = k[i - 1] - m[i]
    return out


@dataclass(frozen=True)
class UrnView:
    """Ball counts of ``B_{a,j}`` at a given state."""

    a: int
    j: int
    counts: Tuple[Tuple[Letter, int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def count(self, letter: Letter) -> int:
        return dict(self.counts).get(letter, 0)


def urn_view(state: StateSignature, a: int, j: int) -> UrnView:
    if not 1 <= a <= j <= state.n:
        raise StructureError(f"invalid urn span ({a},{j}) for n={state.n}")
    elem = elementary_counts(state)
    return UrnView(a, j, tuple((letter, elem[letter]) for letter in urn_letters(a, j)))


def sample_space_size(n: int) -> int:
    return math.prod(2 * (j - a + 1) for a, j in urn_order(n))


def enumerate_words(n: int) -> Iterator[Word]:
    """Every word over letter types, including letters whose urn count is zero."""
    if n > MAX_ENUMERATION_N:
        raise ResourceError(
            f"word enumeration is capped at n <= {MAX_ENUMERATION_N} "
            f"(n={n} would give {sample_space_size(n)} words)"
        )
    return itertools.product(*(urn_letters(a, j) for a, j in urn_order(n)))


def _check_word(word: Sequence[Letter], n: int):
    order = urn_order(n)
    if len(word) != len(order):
        raise StructureError(f"word has {len(word)} letters, expected {len(order)} for n={n}")
    for letter, (a, j) in zip(word, order):
        if not isinstance(letter, Letter) or not a <= letter.index <= j:
            raise StructureError(f"letter {letter} cannot come from urn B_({a},{j})")


def classify(word: Sequence[Letter], n: int) -> int:
    """Class ``j`` (1..n+1) of a word, i.e. the coordinate to increase.

    Level 1: ``c1`` gives 1, ``d1`` gives 2.  Going from level ``l-1`` to
    ``l`` with current class ``j``, look at the letter drawn from ``B_{j,l}``:
    ``d_l`` moves the class to ``l+1``, anything else keeps it.
    """
    _check_word(word, n)
    return _classify_unchecked(word, n)


def _classify_unchecked(word: Sequence[Letter], n: int) -> int:
    cls = 1 if word[0].color == "c" else 2
    for level in range(2, n + 1):
        start = level * (level - 1) // 2
        letter = word[start + level - cls]
        if letter.color == "d" and letter.index == level:
            cls = level + 1
    return cls


def class_cardinalities_recursive(n: int) -> Tuple[int, ...]:
    """Class sizes ``|S_{j,n+1}|`` from the size recursion on ``n``."""
    sizes = (1, 1)
    for level in range(2, n + 1):
        others = [
            math.prod(2 * (level - a + 1) for a in range(1, level + 1) if a != j)
            for j in range(1, level + 1)
        ]
        new = [sizes[j - 1] * (2 * (level - j) + 1) * others[j - 1] for j in range(1, level + 1)]
        new.append(sum(sizes[j - 1] * others[j - 1] for j in range(1, level + 1)))
        sizes = tuple(new)
    return sizes


def class_cardinalities_enumerated(n: int) -> Tuple[int, ...]:
    counts = [0] * (n + 1)
    for word in enumerate_words(n):
        counts[_classify_unchecked(word, n) - 1] += 1
    return tuple(counts)


def class_cardinality(j: int, n: int, method: str = "recursive") -> int:
    table = class_cardinalities_recursive(n) if method == "recursive" else class_cardinalities_enumerated(n)
    return table[j - 1]


def _position_weights(state: StateSignature):
    """Per position: (letters, integer counts, urn total)."""
    elem = elementary_counts(state)
    out = []
    for a, j in urn_order(state.n):
        letters = urn_letters(a, j)
        counts = tuple(elem[x] for x in letters)
        out.append((letters, counts, sum(counts)))
    return out


def word_probability(word: Sequence[Letter], state: StateSignature) -> Fraction:
    _check_word(word, state.n)
    p = Fraction(1)
    for letter, (letters, counts, total) in zip(word, _position_weights(state)):
        p *= Fraction(counts[letters.index(letter)], total)
    return p


def class_distribution(state: StateSignature) -> Tuple[Fraction, ...]:
    """Exact class probabilities by summing over the whole sample space."""
    n = state.n
    weights = _position_weights(state)
    denominator = math.prod(total for _, _, total in weights)
    per_position = [list(zip(letters, counts)) for letters, counts, _ in weights]
    sums = [0] * (n + 1)
    for combo in enumerate_words_weighted(per_position, n):
        word, weight = combo
        sums[_classify_unchecked(word, n) - 1] += weight
    return tuple(Fraction(s, denominator) for s in sums)


def enumerate_words_weighted(per_position, n: int):
    if n > MAX_ENUMERATION_N:
        raise ResourceError(f"word enumeration is capped at n <= {MAX_ENUMERATION_N}")
    for combo in itertools.product(*per_position):
        weight = math.prod(c for _, c in combo)
        yield tuple(letter for letter, _ in combo), weight


def class_probability(j: int, state: StateSignature) -> Fraction:
    return class_distribution(state)[j - 1]


def _draw(rng: random.Random, counts: Sequence[int]) -> int:
    u = rng.randrange(sum(counts))
    for idx, c in enumerate(counts):
        if u < c:
            return idx
        u -= c
    raise AssertionError("unreachable")


def sample_word(state: StateSignature, rng: random.Random) -> Word:
    return tuple(
        letters[_draw(rng, counts)] for letters, counts, _ in _position_weights(state)
    )


def urn_step(state: StateSignature, rng: random.Random) -> StateSignature:
    cls = _classify_unchecked(sample_word(state, rng), state.n)
    nxt = state.shifted(cls, 1)
    if nxt is None:
        raise AssertionError(f"urn draw produced a blocked move e_{cls} at {state}")
    return nxt


def apply_ball_update(counts: Dict[Letter, int], j: int) -> Dict[Letter, int]:
    """Ball bookkeeping after an outcome of class ``j``: take one ``d_{j-1}``
    ball out, put one ``c_j`` ball in (no removal for ``j = 1``; no ``c_{n+1}``
    color exists)."""
    out = dict(counts)
    if j > 1:
        out[Letter("d", j - 1)] -= 1
    if Letter("c", j) in out:
        out[Letter("c", j)] += 1
    return out


def enumeration_rows(state: StateSignature) -> Iterator[Tuple[Word, int, Fraction]]:
    n = state.n
    for word in enumerate_words(n):
        yield word, _classify_unchecked(word, n), word_probability(word, state)
