"""Random valid states for tests: a seeded plain generator and a hypothesis strategy."""

import random

from hypothesis import strategies as st

from dualwalk.core import KWeight, StateSignature


def random_k(rng: random.Random, n: int, low: int = -4, high: int = 8) -> KWeight:
    return KWeight(tuple(sorted((rng.randint(low, high) for _ in range(n)), reverse=True)))


def random_state(rng: random.Random, n: int, spread: int = 5, k: KWeight = None) -> StateSignature:
    k = k or random_k(rng, n)
    kt = k.k
    m = [kt[0] + rng.randint(0, spread)]
    for i in range(1, n):
        m.append(rng.randint(kt[i], kt[i - 1]))
    m.append(kt[-1] - rng.randint(0, spread))
    return StateSignature(tuple(m), k)


def random_states(seed: int, n: int, count: int, **kw):
    rng = random.Random(seed)
    return [random_state(rng, n, **kw) for _ in range(count)]


@st.composite
def states(draw, min_n: int = 1, max_n: int = 5, bound: int = 30, nonneg_last: bool = False):
    """Valid states with entries in [-bound, bound]; ``nonneg_last`` keeps m_{n+1} >= 0."""
    half = bound // 2
    n = draw(st.integers(min_n, max_n))
    k_low = 0 if nonneg_last else -half
    k = sorted(draw(st.lists(st.integers(k_low, half), min_size=n, max_size=n)), reverse=True)
    m = [draw(st.integers(k[0], k[0] + half))]
    for i in range(1, n):
        m.append(draw(st.integers(k[i], k[i - 1])))
    m.append(draw(st.integers(0 if nonneg_last else k[-1] - half, k[-1])))
    return StateSignature(tuple(m), KWeight(tuple(k)))
