"""Markov dynamics: increase and decrease substeps, the composed step, and
Monte Carlo simulation with reproducible per-walker random streams.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import urn, young
from .core import (
    Distribution,
    DomainError,
    MechanismUnavailableError,
    StateSignature,
    a_row,
    as_kweight,
    b_row,
    interlacing_violation,
)

MECHANISMS = ("direct", "urn", "young")
KINDS = ("full", "increase", "decrease")


def _plus(m, i, delta=1):
    out = list(m)
    out[i - 1] += delta
    return tuple(out)


def _wheel(probs: Sequence[Fraction]) -> Tuple[int, Tuple[int, ...]]:
    """Integer weights over a common denominator."""
    den = math.lcm(*(p.denominator for p in probs))
    return den, tuple(int(p * den) for p in probs)


@lru_cache(maxsize=1 << 16)
def _a_wheel(m, k):
    return _wheel(a_row(m, k))


@lru_cache(maxsize=1 << 16)
def _b_wheel(m, k):
    return _wheel(b_row(m, k))


def _spin(rng: random.Random, wheel) -> int:
    den, weights = wheel
    u = rng.randrange(den)
    for idx, w in enumerate(weights):
        if u < w:
            return idx
        u -= w
    raise AssertionError(f"weights {weights} do not fill {den}")


def draw_index(rng: random.Random, probs: Sequence[Fraction]) -> int:
    """0-based categorical draw from exact probabilities summing to 1."""
    return _spin(rng, _wheel(probs))


def _shifted_for_decrease(m, k):
    shifted = _plus(m, len(m))
    if interlacing_violation(shifted, k) is not None:
        raise DomainError(
            f"decrease substep undefined at m={m}: m + e_{{n+1}} violates interlacing (m_{{n+1}} = k_n)"
        )
    return shifted


# -- raw steps on tuples -----------------------------------------------------

def _increase_raw(m, k, rng, mechanism):
    if mechanism == "direct":
        return _plus(m, _spin(rng, _a_wheel(m, k)) + 1)
    state = StateSignature(m, k)
    if mechanism == "urn":
        return urn.urn_step(state, rng).m
    if mechanism == "young":
        ystate = young.YoungState.from_state(state)
        return young.young_step(ystate, rng).m
    raise ValueError(f"mechanism must be one of {MECHANISMS}")


def _decrease_raw(m, k, rng):
    shifted = _shifted_for_decrease(m, k)
    return _plus(m, _spin(rng, _b_wheel(shifted, k)) + 1, -1)


def _full_raw(m, k, rng, mechanism):
    mid = _increase_raw(m, k, rng, mechanism)
    return _plus(mid, _spin(rng, _b_wheel(mid, k)) + 1, -1)


def _step_raw(m, k, rng, mechanism, kind):
    if kind == "full":
        return _full_raw(m, k, rng, mechanism)
    if kind == "increase":
        return _increase_raw(m, k, rng, mechanism)
    if kind == "decrease":
        return _decrease_raw(m, k, rng)
    raise ValueError(f"kind must be one of {KINDS}")


# -- public steps ----------------------------------------------------------

def step_increase(state: StateSignature, rng: random.Random, mechanism: str = "direct") -> StateSignature:
    """Move to ``m + e_j`` with probability ``a_j^2(m)``."""
    if mechanism == "young" and state.m[-1] < 0:
        raise MechanismUnavailableError("the Young mechanism needs m_{n+1} >= 0")
    return StateSignature(_increase_raw(state.m, state.k.k, rng, mechanism), state.k)


def step_decrease(state: StateSignature, rng: random.Random) -> StateSignature:
    """Move to ``m - e_j`` with probability ``b_j^2(m + e_{n+1})``."""
    return StateSignature(_decrease_raw(state.m, state.k.k, rng), state.k)


def full_step(state: StateSignature, rng: random.Random, mechanism: str = "direct") -> StateSignature:
    """Increase then decrease: ``i ~ a^2(m)``, then ``j ~ b^2(m + e_i)``."""
    if mechanism == "young" and state.m[-1] < 0:
        raise MechanismUnavailableError("the Young mechanism needs m_{n+1} >= 0")
    return StateSignature(_full_raw(state.m, state.k.k, rng, mechanism), state.k)


def increase_row(state: StateSignature) -> Distribution:
    m, k = state.m, state.k.k
    return Distribution({
        StateSignature(_plus(m, i), state.k): a
        for i, a in enumerate(a_row(m, k), start=1) if a
    })


def decrease_row(state: StateSignature) -> Distribution:
    m, k = state.m, state.k.k
    shifted = _shifted_for_decrease(m, k)
    return Distribution({
        StateSignature(_plus(m, j, -1), state.k): b
        for j, b in enumerate(b_row(shifted, k), start=1) if b
    })


def exact_row(state: StateSignature) -> Distribution:
    """Exact one-step law of :func:`full_step` by composing the two substeps."""
    m, k = state.m, state.k.k
    out: Dict[StateSignature, Fraction] = {}
    for i, a in enumerate(a_row(m, k), start=1):
        if not a:
            continue
        mid = _plus(m, i)
        for j, b in enumerate(b_row(mid, k), start=1):
            if b:
                key = StateSignature(_plus(mid, j, -1), state.k)
                out[key] = out.get(key, Fraction(0)) + a * b
    return Distribution(out)


# -- simulation ------------------------------------------------------------

def walker_rng(seed: int, walker_id: int) -> random.Random:
    """Independent stream for one walker, a function of (seed, walker_id) only."""
    words = np.random.SeedSequence(seed, spawn_key=(walker_id,)).generate_state(4, dtype=np.uint64)
    return random.Random(int.from_bytes(words.tobytes(), "little"))


@dataclass
class TrajectoryLog:
    seed: int
    mechanism: str
    kind: str
    trajectories: Dict[int, List[Tuple[int, ...]]] = field(default_factory=dict)

    def records(self) -> List[str]:
        """``walker_id,step,m_1,...,m_{n+1}`` lines, sorted by walker then step."""
        lines = []
        for wid in sorted(self.trajectories):
            for step, m in enumerate(self.trajectories[wid]):
                lines.append(f"{wid},{step}," + ",".join(map(str, m)))
        return lines

    def text(self) -> str:
        return "".join(line + "\n" for line in self.records())


@dataclass
class SimulationResult:
    counts: Counter
    walkers: int
    log: TrajectoryLog

    @property
    def empirical(self) -> Distribution:
        return Distribution({m: c / self.walkers for m, c in sorted(self.counts.items())})


def _run_chunk(args):
    m0, k, t, seed, mechanism, kind, first, last, log_walkers = args
    counts: Counter = Counter()
    logs = {}
    for wid in range(first, last):
        rng = walker_rng(seed, wid)
        m = m0
        path = [m] if wid < log_walkers else None
        for _ in range(t):
            m = _step_raw(m, k, rng, mechanism, kind)
            if path is not None:
                path.append(m)
        counts[m] += 1
        if path is not None:
            logs[wid] = path
    return counts, logs


def simulate(
    initial: StateSignature,
    t: int,
    walkers: int,
    seed: int,
    mechanism: str = "direct",
    kind: str = "full",
    workers: int = 1,
    log_walkers: int = 10,
) -> SimulationResult:
    """Run ``walkers`` independent copies for ``t`` steps.

    The result depends only on (initial, t, walkers, seed, mechanism, kind);
    ``workers`` changes how walkers are split across processes, not what
    they do.  Final states are counted by raw ``m`` tuple.
    """
    if mechanism not in MECHANISMS:
        raise ValueError(f"mechanism must be one of {MECHANISMS}")
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if mechanism == "young" and initial.m[-1] < 0:
        raise MechanismUnavailableError("the Young mechanism needs m_{n+1} >= 0")
    k = initial.k.k
    workers = max(1, int(workers))
    bounds = np.linspace(0, walkers, workers + 1).astype(int)
    chunks = [
        (initial.m, k, t, seed, mechanism, kind, int(lo), int(hi), log_walkers)
        for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
    ]
    if workers == 1 or len(chunks) <= 1:
        results = [_run_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, chunks))
    counts: Counter = Counter()
    log = TrajectoryLog(seed, mechanism, kind)
    for c, logs in results:
        counts.update(c)
        log.trajectories.update(logs)
    log.trajectories = dict(sorted(log.trajectories.items()))
    return SimulationResult(counts, walkers, log)


def empirical_states(result: SimulationResult, k) -> Distribution:
    k = as_kweight(k)
    return Distribution({StateSignature(m, k): c / result.walkers for m, c in sorted(result.counts.items())})
