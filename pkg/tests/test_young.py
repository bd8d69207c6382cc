import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from dualwalk import urn, young
from dualwalk.core import (
    DomainError,
    KWeight,
    MechanismUnavailableError,
    StateSignature,
    StructureError,
    a_row,
)
from dualwalk.young import ElementaryMove, YoungState

from _gen import states

F = Fraction


def Y(m, k):
    return YoungState.from_state(StateSignature(tuple(m), KWeight(tuple(k))))


def mv(text):
    """Parse ``D+e1`` / ``D-e4`` notation."""
    return ElementaryMove("insert" if text[1] == "+" else "delete", int(text[3:]))


def test_rows_and_round_trip():
    d = Y((8, 5, 1), (6, 3))
    assert d.rows == (8, 6, 5, 3, 1)
    assert d.to_state().m == (8, 5, 1)
    assert d.k == (6, 3)


def test_invalid_rows():
    with pytest.raises(DomainError):
        YoungState((3, 4, 1))
    with pytest.raises(StructureError):
        YoungState((3, 2))
    with pytest.raises(MechanismUnavailableError):
        Y((3, -1), (2,))


def test_move_letter_map():
    assert mv("D+e3").to_letter() == urn.Letter("c", 2)
    assert mv("D-e4").to_letter() == urn.Letter("d", 2)
    assert ElementaryMove.from_letter(urn.Letter("d", 1)) == mv("D-e2")
    assert str(mv("D+e1")) == "D+e1"
    with pytest.raises(StructureError):
        ElementaryMove("insert", 2)


def test_experiment_outcomes_example():
    d = Y((8, 5, 1), (6, 3))
    outcomes = young.experiment_outcomes(1, 2, d)
    assert [w for _, w in outcomes] == [3, 1, 3, 2]
    assert [str(m) for m, _ in outcomes] == ["D+e1", "D-e2", "D+e3", "D-e4"]


def test_degenerate_delete_weight_zero():
    d = Y((6, 6, 1), (6, 3))
    assert dict(young.experiment_outcomes(1, 1, d))[mv("D-e2")] == 0


@settings(max_examples=100, deadline=None)
@given(states(max_n=4, bound=16, nonneg_last=True))
def test_outcome_weights_match_urn_counts(s):
    d = YoungState.from_state(s)
    for a, j in urn.urn_order(s.n):
        view = urn.urn_view(s, a, j)
        moves = young.experiment_outcomes(a, j, d)
        assert [(m.to_letter(), w) for m, w in moves] == list(view.counts)


def test_n2_partition_as_listed():
    c1, d1, c2, d2 = mv("D+e1"), mv("D-e2"), mv("D+e3"), mv("D-e4")
    expected = {
        1: set(itertools.product([c1], [c2, d2], [c1, c2, d1])),
        2: set(itertools.product([d1], [c2], [c1, c2, d1, d2])),
        3: set(itertools.product([c1], [c2, d2], [d2])) | set(itertools.product([d1], [d2], [c1, d1, c2, d2])),
    }
    got = {1: set(), 2: set(), 3: set()}
    for moves in young.enumerate_tuples(2):
        got[young.classify_tuple(moves, 2)].add(moves)
    assert got == expected
    assert [len(got[j]) for j in (1, 2, 3)] == [6, 4, 6]


def test_degenerate_case():
    d = Y((6, 6, 1), (6, 3))
    letter_level, realizable = young.class_cardinalities(d)
    assert letter_level == (6, 4, 6)
    assert realizable == (4, 0, 2)
    m1, m3, k2 = 6, 1, 3
    expected = (F(m1 - k2 + 2, m1 - m3 + 2), F(0), F(k2 - m3, m1 - m3 + 2))
    assert expected == (F(5, 7), 0, F(2, 7))
    assert young.class_distribution(d) == expected == a_row((6, 6, 1), (6, 3))


@settings(max_examples=60, deadline=None)
@given(states(max_n=3, bound=14, nonneg_last=True))
def test_young_urn_a_sq_agree(s):
    d = YoungState.from_state(s)
    assert young.class_distribution(d) == urn.class_distribution(s) == a_row(s.m, s.k.k)


def test_tuple_weight_matches_word_probability():
    s = StateSignature((8, 5, 1), KWeight((6, 3)))
    d = YoungState.from_state(s)
    for moves in young.enumerate_tuples(2):
        word = tuple(m.to_letter() for m in moves)
        assert young.tuple_weight(moves, d) == urn.word_probability(word, s)


def test_apply_class_example():
    d = Y((8, 5, 1), (6, 3))
    assert young.apply_class(d, 1).rows == (9, 6, 5, 3, 1)
    assert young.apply_class(d, 3).rows == (8, 6, 5, 3, 2)


def test_young_step_keeps_k_rows_and_validity():
    rng = random.Random(2)
    d = Y((4, 3, 2, 0), (3, 2, 0))
    for _ in range(200):
        d = young.young_step(d, rng)
        assert d.k == (3, 2, 0)
        d.to_state()


def test_render():
    assert young.render(YoungState((2, 1, 0)), "#") == "##\n#\n"
    text = young.render(Y((8, 5, 1), (6, 3)))
    assert [len(line) for line in text.splitlines()] == [8, 6, 5, 3, 1]
    assert set(text.replace("\n", "")) == {young.DEFAULT_GLYPH}
    assert young.render(Y((8, 5, 0), (6, 3))).count("\n") == 4
