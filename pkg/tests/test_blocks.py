import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualwalk import blocks
from dualwalk.blocks import (
    TruncationWarning,
    assemble,
    build_ABC,
    build_RS,
    build_XY,
    check_factorization,
    evolve,
    evolve_states,
    m_row,
    tilde_row,
)
from dualwalk.core import (
    DomainError,
    KWeight,
    PCoordinate,
    StateSignature,
    b_sq,
    enumerate_omega,
    omega_position,
    state_from_wr,
    wr_from_state,
)
from dualwalk.walk import exact_row

from _gen import random_states

K3 = KWeight((3,))
K63 = KWeight((6, 3))
F = Fraction


def entry(block):
    assert block.size == 1
    return block[0, 0]


@st.composite
def small_k(draw, max_n=4, max_spread=6):
    n = draw(st.integers(1, max_n))
    kn = draw(st.integers(0, 3))
    gaps = draw(st.lists(st.integers(0, 3), min_size=n - 1, max_size=n - 1))
    if sum(gaps) > max_spread:
        gaps = [0] * (n - 1)
    k = [kn]
    for g in reversed(gaps):
        k.insert(0, k[0] + g)
    return KWeight(tuple(k))


# -- explicit blocks at k = (3) ----------------------------------------------

def test_abc_examples_n1():
    A0, B0, C0 = build_ABC(0, K3)
    assert (entry(A0), entry(B0), entry(C0)) == (0, F(4, 5), F(1, 5))
    A1, _, _ = build_ABC(1, K3)
    assert entry(A1) == F(2, 15)


def test_xy_rs_examples_n1():
    X0, Y0 = build_XY(0, K3)
    assert (entry(X0), entry(Y0)) == (F(1, 4), F(3, 4))
    _, S0 = build_RS(0, K3)
    assert entry(S0) == 1
    R1, S1 = build_RS(1, K3)
    assert (entry(R1), entry(S1)) == (F(1, 5), F(4, 5))


def test_factorization_by_hand_n1():
    X0, Y0 = build_XY(0, K3)
    R0, S0 = build_RS(0, K3)
    R1, S1 = build_RS(1, K3)
    _, B0, C0 = build_ABC(0, K3)
    assert entry(X0 @ R1 + Y0 @ S0) == F(1, 20) + F(3, 4) == entry(B0)
    assert entry(X0 @ S1) == F(1, 5) == entry(C0)


def test_build_rejects_low_w():
    with pytest.raises(DomainError):
        build_ABC(-1, K63)
    with pytest.raises(DomainError):
        build_XY(0, KWeight((2, -2)))


# -- stochasticity and structure ---------------------------------------------

@pytest.mark.parametrize("w", range(0, 8))
def test_substep_rows_sum_to_one_k63(w):
    X, Y = build_XY(w, K63)
    R, S = build_RS(w, K63)
    assert all(s == 1 for s in (X + Y).row_sums())
    assert all(s == 1 for s in (R + S).row_sums())


@settings(max_examples=40, deadline=None)
@given(small_k(), st.sampled_from(blocks.LAYOUTS))
def test_assembled_interior_rows_are_stochastic(k, layout):
    mat = assemble(k, 6, layout)
    assert mat.stochasticity_failures() == []


def test_boundary_row_is_substochastic():
    mat = assemble(K63, 3, "M")
    sums = [mat.row_sum(3, r) for r in enumerate_omega(K63)]
    assert all(s <= 1 for s in sums)
    assert any(s < 1 for s in sums)


def test_inadmissible_m2_row_when_kn_zero():
    k = KWeight((2, 0))
    assert not blocks.admissible_m2_row(0, (0,), k)
    R, S = build_RS(0, k)
    assert R.row_sums()[0] == 0 and S.row_sums()[0] == 0
    assert assemble(k, 4, "M2").stochasticity_failures() == []


def test_assemble_refuses_negative_kn():
    with pytest.raises(DomainError):
        assemble(KWeight((2, -1)), 4)


@settings(max_examples=40, deadline=None)
@given(small_k(), st.integers(0, 6))
def test_block_patterns(k, w):
    A, B, C = build_ABC(w, k)
    X, Y = build_XY(w, k)
    R, S = build_RS(w, k)
    for block in (A, B, C, X, Y, R, S):
        assert block.is_nonnegative()
    assert X.is_diagonal() and R.is_diagonal()
    omega = enumerate_omega(k)
    pos = omega_position(k)
    n = k.n
    for i, r in enumerate(omega):
        y_cols = {pos[r]} | {pos[s] for s in (_shift(r, j, 1) for j in range(1, n)) if s in pos}
        s_cols = {pos[r]} | {pos[s] for s in (_shift(r, j, -1) for j in range(1, n)) if s in pos}
        for c in range(len(omega)):
            if c not in y_cols:
                assert Y[i, c] == 0
            if c not in s_cols:
                assert S[i, c] == 0


def _shift(r, j, d):
    out = list(r)
    out[j - 1] += d
    return tuple(out)


# -- factorization -------------------------------------------------------------

def test_factorization_k63():
    report = check_factorization(K63, 10)
    assert report.ok
    assert report.summary() == "OK (30 identities)"


@settings(max_examples=25, deadline=None)
@given(small_k(), st.integers(1, 6))
def test_factorization_random(k, w_max):
    assert check_factorization(k, w_max).ok


def test_factorization_reports_violation(monkeypatch):
    real = blocks.build_ABC

    def broken(w, k):
        A, B, C = real(w, k)
        return A, B, C + C
    monkeypatch.setattr(blocks, "build_ABC", broken)
    report = check_factorization(K3, 2)
    assert not report.ok
    assert any("C=XS'" in line and "lhs=" in line for line in report.lines())


# -- rows of the extended walks ----------------------------------------------

def test_tilde_m1_example():
    s = StateSignature((8, 5, 1), K63)
    row = tilde_row(s, "M1")
    assert {t.m: v for t, v in row.items()} == {(9, 5, 1): F(7, 12), (8, 6, 1): F(3, 20), (8, 5, 2): F(4, 15)}


def test_tilde_m2_example():
    s = StateSignature((8, 5, 1), K63)
    shifted = StateSignature((8, 5, 2), K63)
    row = {t.m: v for t, v in tilde_row(s, "M2").items()}
    assert row == {(7, 5, 1): b_sq(shifted, 1), (8, 4, 1): b_sq(shifted, 2), (8, 5, 0): b_sq(shifted, 3)}
    assert sum(row.values()) == 1


def test_tilde_m2_needs_room_below_kn():
    with pytest.raises(DomainError):
        tilde_row(StateSignature((8, 5, 3), K63), "M2")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tilde_m_matches_composition(n):
    for s in random_states(100 + n, n, 60):
        assert dict(tilde_row(s, "M").items()) == dict(exact_row(s).items())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_submatrix_of_tilde(n):
    rng = random.Random(7 + n)
    for _ in range(40):
        k = KWeight(tuple(sorted((rng.randint(0, 5) for _ in range(n)), reverse=True)))
        r = rng.choice(enumerate_omega(k))
        s = state_from_wr(PCoordinate(rng.randint(0, 5), r), k)
        from_blocks = {state_from_wr(p, k): v for p, v in m_row(s).items()}
        from_tilde = dict(tilde_row(s, "M").items())
        assert all(t.in_p for t in from_tilde)
        assert from_blocks == from_tilde


# -- evolution -----------------------------------------------------------------

def test_evolve_zero_steps():
    init = {PCoordinate(1, (2,)): F(1)}
    out = evolve(init, 0, K63, 5)
    assert dict(out.items()) == init and out.deficit == 0


def test_evolve_one_step_n1():
    out = evolve({PCoordinate(0): 1}, 1, K3, 5)
    assert dict(out.items()) == {PCoordinate(0): F(4, 5), PCoordinate(1): F(1, 5)}


def test_evolve_conserves_mass_inside_window():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = evolve({PCoordinate(0, (0,)): 1}, 10, K63, 40)
    assert out.total() == 1 and out.deficit == 0


def test_evolve_warns_and_tracks_deficit():
    with pytest.warns(TruncationWarning):
        out = evolve({PCoordinate(0): 1}, 6, K3, 2)
    assert out.deficit > 0
    assert out.total() + out.deficit == 1


def test_evolve_states_agrees_with_evolve_on_p():
    start = StateSignature((5, -2), K3)
    exact = evolve({wr_from_state(start): 1}, 5, K3, 20)
    by_state = evolve_states({start: 1}, 5)
    assert {state_from_wr(p, K3): v for p, v in exact.items()} == dict(by_state.items())


def test_evolve_states_off_p():
    out = evolve_states({StateSignature((5, 2), K3): 1}, 4)
    assert out.total() == 1
    assert all(s.total == 7 for s in out.support())
