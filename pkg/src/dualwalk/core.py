"""State space of the walk and the exact transition coefficients.

A state is an integer (n+1)-tuple ``m`` interlacing a fixed weakly
decreasing n-tuple ``k``::

    m_1 >= k_1 >= m_2 >= k_2 >= ... >= m_n >= k_n >= m_{n+1}

Coefficients are returned as :class:`fractions.Fraction`.  Indices ``i`` of
the coefficient functions are 1-based, matching the usual ``e_i`` notation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple


class DualWalkError(Exception):
    """Base class for library errors."""


class DimensionError(DualWalkError, ValueError):
    pass


class DomainError(DualWalkError, ValueError):
    pass


class NotInPError(DomainError):
    """State does not lie on the hyperplane ``sum(m) == sum(k)``."""


class ResourceError(DualWalkError):
    pass


class StructureError(DualWalkError, ValueError):
    pass


class MechanismUnavailableError(DualWalkError):
    pass


@dataclass(frozen=True)
class KWeight:
    """The fixed n-tuple ``k`` (n >= 1), weakly decreasing."""

    k: Tuple[int, ...]

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        object.__setattr__(self, "k", k)
        if len(k) < 1:
            raise DimensionError("k must have at least one entry")
        for i in range(len(k) - 1):
            if k[i] < k[i + 1]:
                raise DomainError(
                    f"k is not weakly decreasing: k_{i + 1}={k[i]} < k_{i + 2}={k[i + 1]}"
                )

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def total(self) -> int:
        return sum(self.k)

    @property
    def young_ready(self) -> bool:
        return self.k[-1] >= 0

    @property
    def w_min(self) -> int:
        return max(0, -self.k[-1])

    @property
    def omega_size(self) -> int:
        return math.prod(self.k[i] - self.k[i + 1] + 1 for i in range(self.n - 1))

    def __iter__(self):
        return iter(self.k)

    def __len__(self):
        return len(self.k)

    def __getitem__(self, i):
        return self.k[i]

    def __str__(self):
        return ",".join(map(str, self.k))


def as_kweight(k) -> KWeight:
    return k if isinstance(k, KWeight) else KWeight(tuple(k))


def interlacing_violation(m: Sequence[int], k: Sequence[int]) -> Optional[str]:
    """Return a description of the first violated inequality, or None."""
    if len(m) != len(k) + 1:
        raise DimensionError(f"m has length {len(m)}, expected n+1 = {len(k) + 1}")
    for i in range(len(k)):
        if m[i] < k[i]:
            return f"m_{i + 1} >= k_{i + 1} violated ({m[i]} < {k[i]})"
        if k[i] < m[i + 1]:
            return f"k_{i + 1} >= m_{i + 2} violated ({k[i]} < {m[i + 1]})"
    return None


def validate_interlacing(m: Sequence[int], k) -> bool:
    """True iff ``m`` interlaces ``k``; raises DimensionError on a length mismatch."""
    return interlacing_violation(tuple(m), tuple(as_kweight(k).k)) is None


@dataclass(frozen=True)
class StateSignature:
    """A position of the walker: an (n+1)-tuple interlacing ``k``."""

    m: Tuple[int, ...]
    k: KWeight

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        object.__setattr__(self, "k", as_kweight(self.k))
        problem = interlacing_violation(self.m, self.k.k)
        if problem is not None:
            raise DomainError(f"m={self.m} does not interlace k={self.k.k}: {problem}")

    @property
    def n(self) -> int:
        return self.k.n

    @property
    def total(self) -> int:
        return sum(self.m)

    @property
    def in_p(self) -> bool:
        return self.total == self.k.total

    def shifted(self, i: int, delta: int = 1) -> Optional["StateSignature"]:
        """``m + delta*e_i`` if that is still a valid state, else None."""
        m = list(self.m)
        m[i - 1] += delta
        if interlacing_violation(m, self.k.k) is not None:
            return None
        return StateSignature(tuple(m), self.k)

    def __str__(self):
        return ",".join(map(str, self.m))


def make_state(m: Iterable[int], k) -> StateSignature:
    return StateSignature(tuple(m), as_kweight(k))


# -- coefficients ----------------------------------------------------------

def _check_index(i: int, n: int):
    if not 1 <= i <= n + 1:
        raise DimensionError(f"index i={i} outside 1..{n + 1}")


def _denominator(m: Tuple[int, ...], i0: int) -> int:
    den = 1
    for j0, mj in enumerate(m):
        if j0 != i0:
            den *= mj - m[i0] - j0 + i0
    if den == 0:
        raise DomainError(f"vanishing coefficient denominator at m={m}, i={i0 + 1}")
    return den


def _a_sq_raw(m: Tuple[int, ...], k: Tuple[int, ...], i: int) -> Fraction:
    i0 = i - 1
    num = 1
    for j0, kj in enumerate(k):
        num *= kj - m[i0] - j0 + i0 - 1
    return abs(Fraction(num, _denominator(m, i0)))


def _b_sq_raw(m: Tuple[int, ...], k: Tuple[int, ...], i: int) -> Fraction:
    i0 = i - 1
    num = 1
    for j0, kj in enumerate(k):
        num *= kj - m[i0] - j0 + i0
    return abs(Fraction(num, _denominator(m, i0)))


@lru_cache(maxsize=1 << 16)
def a_row(m: Tuple[int, ...], k: Tuple[int, ...]) -> Tuple[Fraction, ...]:
    """All ``a_i^2(m, k)`` for i = 1..n+1 on raw tuples (no validation)."""
    return tuple(_a_sq_raw(m, k, i) for i in range(1, len(m) + 1))


@lru_cache(maxsize=1 << 16)
def b_row(m: Tuple[int, ...], k: Tuple[int, ...]) -> Tuple[Fraction, ...]:
    """All ``b_i^2(m, k)`` for i = 1..n+1 on raw tuples (no validation)."""
    return tuple(_b_sq_raw(m, k, i) for i in range(1, len(m) + 1))


def a_sq(state: StateSignature, i: int) -> Fraction:
    """Probability that the increase substep raises ``m_i`` by one."""
    _check_index(i, state.n)
    return a_row(state.m, state.k.k)[i - 1]


def b_sq(state: StateSignature, i: int) -> Fraction:
    """Coefficient of ``m - e_i`` in the decrease formula at ``state``."""
    _check_index(i, state.n)
    return b_row(state.m, state.k.k)[i - 1]


# -- (w, r) coordinates on the hyperplane P --------------------------------

@dataclass(frozen=True)
class PCoordinate:
    """Coordinates ``(w, r)`` of a state with ``sum(m) == sum(k)``."""

    w: int
    r: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "w", int(self.w))
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))

    def __str__(self):
        return f"w={self.w} r=({','.join(map(str, self.r))})"


def check_omega_index(r: Sequence[int], k) -> None:
    k = as_kweight(k)
    if len(r) != k.n - 1:
        raise DimensionError(f"r has length {len(r)}, expected n-1 = {k.n - 1}")
    for i, ri in enumerate(r):
        if not 0 <= ri <= k[i] - k[i + 1]:
            raise DomainError(f"r_{i + 1}={ri} outside 0..{k[i] - k[i + 1]}")


def check_pcoordinate(p: PCoordinate, k) -> None:
    k = as_kweight(k)
    check_omega_index(p.r, k)
    if p.w < 0:
        raise DomainError(f"w={p.w} is negative")
    # m_{n+1} = -(w + sum(r)) must not exceed k_n
    if p.w + sum(p.r) < -k[-1]:
        raise DomainError(f"w + sum(r) = {p.w + sum(p.r)} below -k_n = {-k[-1]}")


@lru_cache(maxsize=256)
def _omega(k: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    ranges = [range(k[i] - k[i + 1] + 1) for i in range(len(k) - 1)]
    return tuple(itertools.product(*ranges))


def enumerate_omega(k) -> List[Tuple[int, ...]]:
    """All r in the box ``0 <= r_i <= k_i - k_{i+1}``, ascending lexicographic."""
    return list(_omega(as_kweight(k).k))


def omega_position(k) -> Dict[Tuple[int, ...], int]:
    return {r: idx for idx, r in enumerate(_omega(as_kweight(k).k))}


def state_from_wr(p: PCoordinate, k) -> StateSignature:
    k = as_kweight(k)
    check_pcoordinate(p, k)
    return StateSignature(_m_of(p.w, p.r, k.k), k)


def _m_of(w: int, r: Tuple[int, ...], k: Tuple[int, ...]) -> Tuple[int, ...]:
    return (w + k[0],) + tuple(ri + k[i + 1] for i, ri in enumerate(r)) + (-(w + sum(r)),)


def wr_from_state(state: StateSignature) -> PCoordinate:
    k = state.k
    if not state.in_p:
        raise NotInPError(
            f"m={state.m} is not in P: sum(m)={state.total} != sum(k)={k.total}"
        )
    return PCoordinate(state.m[0] - k[0], tuple(state.m[i + 1] - k[i + 1] for i in range(k.n - 1)))


# -- distributions ---------------------------------------------------------

@dataclass
class Distribution:
    """Finitely supported weights; ``deficit`` records mass lost to truncation."""

    weights: Dict[Hashable, object] = field(default_factory=dict)
    deficit: object = 0

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.weights.values())

    def total(self):
        return sum(self.weights.values(), Fraction(0) if self.exact else 0.0)

    def support(self):
        return [s for s, v in self.weights.items() if v != 0]

    def get(self, key, default=0):
        return self.weights.get(key, default)

    def __getitem__(self, key):
        return self.weights[key]

    def __iter__(self) -> Iterator:
        return iter(self.weights)

    def __len__(self):
        return len(self.weights)

    def items(self):
        return self.weights.items()

    def pruned(self) -> "Distribution":
        return Distribution({s: v for s, v in self.weights.items() if v != 0}, self.deficit)

    def map_keys(self, fn) -> "Distribution":
        out: Dict[Hashable, object] = {}
        for s, v in self.weights.items():
            key = fn(s)
            out[key] = out.get(key, 0) + v
        return Distribution(out, self.deficit)


def total_variation(p, q) -> float:
    """Half the L1 distance between two weight mappings."""
    p = p.weights if isinstance(p, Distribution) else p
    q = q.weights if isinstance(q, Distribution) else q
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(s, 0)) - float(q.get(s, 0))) for s in keys)


def format_rational(x) -> str:
    """Exact text form: ``p/q`` in lowest terms, integers in decimal."""
    return str(Fraction(x))


def parse_int_tuple(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))
