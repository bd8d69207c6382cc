"""Young-diagram mechanism for the increase substep.

A state with ``m_{n+1} >= 0`` is drawn as a diagram with the 2n+1 rows
``m_1, k_1, m_2, ..., k_n, m_{n+1}``.  Experiment ``E_{a,j}`` picks one
elementary slot uniformly among the rows ``2a-1 .. 2j``: odd row ``2i-1``
offers ``m_i - k_i + 1`` insertion slots, even row ``2i`` offers
``k_i - m_{i+1}`` deletions.  Insertion into row ``2i-1`` plays the role of
urn color ``c_i`` and deletion from row ``2i`` the role of ``d_i``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from . import urn
from .core import (
    DomainError,
    KWeight,
    MechanismUnavailableError,
    ResourceError,
    StateSignature,
    StructureError,
)
from .urn import Letter

DEFAULT_GLYPH = "▢"


@dataclass(frozen=True)
class YoungState:
    rows: Tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(x) for x in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) < 3 or len(rows) % 2 == 0:
            raise StructureError(f"a diagram state needs 2n+1 >= 3 rows, got {len(rows)}")
        for i in range(len(rows) - 1):
            if rows[i] < rows[i + 1]:
                raise DomainError(f"row {i + 1} ({rows[i]}) shorter than row {i + 2} ({rows[i + 1]})")
        if rows[-1] < 0:
            raise DomainError(f"last row has negative length {rows[-1]}")

    @property
    def n(self) -> int:
        return (len(self.rows) - 1) // 2

    @property
    def m(self) -> Tuple[int, ...]:
        return self.rows[0::2]

    @property
    def k(self) -> Tuple[int, ...]:
        return self.rows[1::2]

    def to_state(self) -> StateSignature:
        return StateSignature(self.m, KWeight(self.k))

    @classmethod
    def from_state(cls, state: StateSignature) -> "YoungState":
        if state.m[-1] < 0:
            raise MechanismUnavailableError(
                f"m_{{n+1}}={state.m[-1]} < 0 has no Young diagram"
            )
        rows = []
        for mi, ki in zip(state.m, state.k.k):
            rows += [mi, ki]
        rows.append(state.m[-1])
        return cls(tuple(rows))


@dataclass(frozen=True)
class ElementaryMove:
    kind: str  # "insert" or "delete"
    row: int

    def __post_init__(self):
        if self.kind == "insert" and self.row % 2 != 1:
            raise StructureError(f"insertions go into odd rows, got row {self.row}")
        if self.kind == "delete" and self.row % 2 != 0:
            raise StructureError(f"deletions come from even rows, got row {self.row}")
        if self.kind not in ("insert", "delete") or self.row < 1:
            raise StructureError(f"bad move {self.kind} row {self.row}")

    @property
    def index(self) -> int:
        return (self.row + 1) // 2

    def to_letter(self) -> Letter:
        return Letter("c" if self.kind == "insert" else "d", self.index)

    @classmethod
    def from_letter(cls, letter: Letter) -> "ElementaryMove":
        if letter.color == "c":
            return cls("insert", 2 * letter.index - 1)
        return cls("delete", 2 * letter.index)

    def __str__(self):
        return f"D{'+' if self.kind == 'insert' else '-'}e{self.row}"


ExperimentTuple = Tuple[ElementaryMove, ...]


def experiment_outcomes(a: int, j: int, state: YoungState) -> List[Tuple[ElementaryMove, int]]:
    """Moves of ``E_{a,j}`` with their slot multiplicities."""
    if not 1 <= a <= j <= state.n:
        raise StructureError(f"invalid experiment span ({a},{j}) for n={state.n}")
    rows = state.rows
    out = []
    for i in range(a, j + 1):
        out.append((ElementaryMove("insert", 2 * i - 1), rows[2 * i - 2] - rows[2 * i - 1] + 1))
        out.append((ElementaryMove("delete", 2 * i), rows[2 * i - 1] - rows[2 * i]))
    return out


def enumerate_tuples(n: int) -> Iterator[ExperimentTuple]:
    for word in urn.enumerate_words(n):
        yield tuple(ElementaryMove.from_letter(x) for x in word)


def classify_tuple(moves: Sequence[ElementaryMove], n: int) -> int:
    for mv in moves:
        if not isinstance(mv, ElementaryMove):
            raise StructureError(f"not a move: {mv!r}")
    return urn.classify(tuple(mv.to_letter() for mv in moves), n)


def tuple_weight(moves: Sequence[ElementaryMove], state: YoungState) -> Fraction:
    """Probability of observing ``moves`` from the experiments in order."""
    p = Fraction(1)
    for mv, (a, j) in zip(moves, urn.urn_order(state.n)):
        outcomes = experiment_outcomes(a, j, state)
        total = sum(w for _, w in outcomes)
        p *= Fraction(dict(outcomes).get(mv, 0), total)
    return p


def class_distribution(state: YoungState) -> Tuple[Fraction, ...]:
    """Exact class probabilities from the experiments' own slot counts."""
    n = state.n
    if n > urn.MAX_ENUMERATION_N:
        raise ResourceError(f"tuple enumeration is capped at n <= {urn.MAX_ENUMERATION_N}")
    per_position = []
    for a, j in urn.urn_order(n):
        outcomes = experiment_outcomes(a, j, state)
        per_position.append(outcomes)
    denominator = math.prod(sum(w for _, w in outs) for outs in per_position)
    sums = [0] * (n + 1)
    for combo in itertools.product(*per_position):
        weight = math.prod(w for _, w in combo)
        if weight:
            sums[classify_tuple([mv for mv, _ in combo], n) - 1] += weight
    return tuple(Fraction(s, denominator) for s in sums)


def class_cardinalities(state: YoungState) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(letter-level, realizable) class sizes; realizable tuples have every move available."""
    n = state.n
    letter_level = [0] * (n + 1)
    realizable = [0] * (n + 1)
    avail = [dict(experiment_outcomes(a, j, state)) for a, j in urn.urn_order(n)]
    for moves in enumerate_tuples(n):
        cls = classify_tuple(moves, n)
        letter_level[cls - 1] += 1
        if all(av[mv] > 0 for av, mv in zip(avail, moves)):
            realizable[cls - 1] += 1
    return tuple(letter_level), tuple(realizable)


def sample_tuple(state: YoungState, rng: random.Random) -> ExperimentTuple:
    out = []
    for a, j in urn.urn_order(state.n):
        outcomes = experiment_outcomes(a, j, state)
        u = rng.randrange(sum(w for _, w in outcomes))
        for mv, w in outcomes:
            if u < w:
                out.append(mv)
                break
            u -= w
    return tuple(out)


def apply_class(state: YoungState, cls: int) -> YoungState:
    """Add one box to row ``2*cls - 1``."""
    rows = list(state.rows)
    rows[2 * cls - 2] += 1
    return YoungState(tuple(rows))


def young_step(state: YoungState, rng: random.Random) -> YoungState:
    return apply_class(state, classify_tuple(sample_tuple(state, rng), state.n))


def render(state: YoungState, glyph: str = DEFAULT_GLYPH) -> str:
    return "".join(glyph * length + "\n" for length in state.rows if length > 0)
