"""Omega x Omega blocks of the walk on P, truncated block matrices, and
exact evolution of distributions.

Rows and columns of every block follow :func:`dualwalk.core.enumerate_omega`.
The full matrix ``M`` is block tridiagonal (``A_w`` below the diagonal,
``B_w`` on it, ``C_w`` above); it factors as ``M1 @ M2`` with ``M1`` upper
block bidiagonal (``Y_w``, ``X_w``) and ``M2`` lower block bidiagonal
(``R_w``, ``S_w``).
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from .core import (
    Distribution,
    DomainError,
    KWeight,
    PCoordinate,
    StateSignature,
    a_row,
    as_kweight,
    b_row,
    check_pcoordinate,
    enumerate_omega,
    format_rational,
    interlacing_violation,
    omega_position,
    wr_from_state,
    _m_of,
)

ZERO = Fraction(0)


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Block:
    """Dense square matrix of Fractions."""

    entries: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def zeros(cls, size: int) -> "Block":
        return cls(tuple((ZERO,) * size for _ in range(size)))

    @classmethod
    def from_rows(cls, rows) -> "Block":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other: "Block") -> "Block":
        cols = list(zip(*other.entries))
        return Block(tuple(
            tuple(sum((a * b for a, b in zip(row, col) if a and b), ZERO) for col in cols)
            for row in self.entries
        ))

    def __add__(self, other: "Block") -> "Block":
        return Block(tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)
        ))

    def row_sums(self) -> List[Fraction]:
        return [sum(row, ZERO) for row in self.entries]

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, row in enumerate(self.entries) for j, v in enumerate(row) if i != j)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for row in self.entries for v in row)

    def tolist(self) -> List[List[Fraction]]:
        return [list(row) for row in self.entries]

    def __str__(self):
        return "[" + "; ".join(" ".join(format_rational(v) for v in row) for row in self.entries) + "]"


# -- coefficient helpers ---------------------------------------------------

def _valid(m, k) -> bool:
    return interlacing_violation(m, k) is None


def _plus(m: Tuple[int, ...], i: int, delta: int = 1) -> Tuple[int, ...]:
    out = list(m)
    out[i - 1] += delta
    return tuple(out)


def _ab(m: Tuple[int, ...], k: Tuple[int, ...], i: int, j: int) -> Fraction:
    """``a_i^2(m) * b_j^2(m + e_i)``; zero when the increase is blocked."""
    a = a_row(m, k)[i - 1]
    if a == 0:
        return ZERO
    return a * b_row(_plus(m, i), k)[j - 1]


def _check_w(w: int, k: KWeight):
    if w < k.w_min:
        raise DomainError(f"w={w} below max(0, -k_n)={k.w_min}")


def _shift_r(r: Tuple[int, ...], j: int, delta: int) -> Tuple[int, ...]:
    out = list(r)
    out[j - 1] += delta
    return tuple(out)


class _BlockBuilder:
    def __init__(self, k: KWeight):
        self.k = k
        self.omega = enumerate_omega(k)
        self.pos = omega_position(k)
        self.size = len(self.omega)

    def empty(self):
        return [[ZERO] * self.size for _ in range(self.size)]

    def put(self, rows, r, s, value, label):
        """Store at (r, s); a target outside Omega must carry zero mass."""
        col = self.pos.get(s)
        if col is None:
            if value != 0:
                raise AssertionError(f"{label}: mass {value} leaves Omega at r={r} -> s={s}")
            return
        rows[self.pos[r]][col] += value


def build_ABC(w: int, k) -> Tuple[Block, Block, Block]:
    """Blocks ``(A_w, B_w, C_w)`` of the walk on P, entry by entry from the
    case lists in terms of ``a_i^2(m(w, r))`` and ``b_j^2(m(w, r) + e_i)``."""
    k = as_kweight(k)
    _check_w(w, k)
    bb = _BlockBuilder(k)
    n, kt = k.n, k.k
    A, B, C = bb.empty(), bb.empty(), bb.empty()
    for r in bb.omega:
        m = _m_of(w, r, kt)
        bb.put(A, r, r, _ab(m, kt, n + 1, 1), "A")
        bb.put(C, r, r, _ab(m, kt, 1, n + 1), "C")
        bb.put(B, r, r, sum((_ab(m, kt, j, j) for j in range(1, n + 2)), ZERO), "B")
        for j in range(1, n):
            up, down = _shift_r(r, j, 1), _shift_r(r, j, -1)
            bb.put(A, r, up, _ab(m, kt, j + 1, 1), "A")
            bb.put(C, r, down, _ab(m, kt, 1, j + 1), "C")
            bb.put(B, r, up, _ab(m, kt, j + 1, n + 1), "B")
            bb.put(B, r, down, _ab(m, kt, n + 1, j + 1), "B")
            for i in range(1, n):
                if i != j:
                    bb.put(B, r, _shift_r(up, i, -1), _ab(m, kt, j + 1, i + 1), "B")
    return Block.from_rows(A), Block.from_rows(B), Block.from_rows(C)


def build_XY(w: int, k) -> Tuple[Block, Block]:
    """Blocks ``(X_w, Y_w)`` of the increase substep ``M1``."""
    k = as_kweight(k)
    _check_w(w, k)
    bb = _BlockBuilder(k)
    n, kt = k.n, k.k
    X, Y = bb.empty(), bb.empty()
    for r in bb.omega:
        a = a_row(_m_of(w, r, kt), kt)
        bb.put(X, r, r, a[0], "X")
        bb.put(Y, r, r, a[n], "Y")
        for j in range(1, n):
            bb.put(Y, r, _shift_r(r, j, 1), a[j], "Y")
    return Block.from_rows(X), Block.from_rows(Y)


def admissible_m2_row(w: int, r: Tuple[int, ...], k) -> bool:
    """Row (w, r) of ``M2`` describes the state ``m(w, r) + e_{n+1}``, which
    lies outside the state space only when ``k_n == 0`` and ``w + sum(r) == 0``."""
    kt = as_kweight(k).k
    return _valid(_plus(_m_of(w, r, kt), len(kt) + 1), kt)


def build_RS(w: int, k) -> Tuple[Block, Block]:
    """Blocks ``(R_w, S_w)`` of the decrease substep ``M2``.

    Inadmissible rows (see :func:`admissible_m2_row`) are left at zero.
    """
    k = as_kweight(k)
    _check_w(w, k)
    bb = _BlockBuilder(k)
    n, kt = k.n, k.k
    R, S = bb.empty(), bb.empty()
    for r in bb.omega:
        shifted = _plus(_m_of(w, r, kt), n + 1)
        if not _valid(shifted, kt):
            continue
        b = b_row(shifted, kt)
        bb.put(R, r, r, b[0], "R")
        bb.put(S, r, r, b[n], "S")
        for j in range(1, n):
            bb.put(S, r, _shift_r(r, j, -1), b[j], "S")
    return Block.from_rows(R), Block.from_rows(S)


# -- factorization check ---------------------------------------------------

@dataclass
class IdentityResult:
    w: int
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"w={self.w} {self.name}: " + ("OK" if self.ok else self.detail)


@dataclass
class FactorizationReport:
    k: KWeight
    w_max: int
    results: List[IdentityResult] = field(default_factory=list)

    @property
    def violations(self) -> List[IdentityResult]:
        return [res for res in self.results if not res.ok]

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> List[str]:
        return [res.line() for res in self.results]

    def summary(self) -> str:
        if self.ok:
            return f"OK ({len(self.results)} identities)"
        return f"FAILED ({len(self.violations)} of {len(self.results)} identities)"


def _first_difference(lhs: Block, rhs: Block, omega) -> str:
    for i, (r1, r2) in enumerate(zip(lhs.entries, rhs.entries)):
        for j, (x, y) in enumerate(zip(r1, r2)):
            if x != y:
                return (f"entry (r={omega[i]}, s={omega[j]}): "
                        f"lhs={format_rational(x)} rhs={format_rational(y)}")
    return ""


def check_factorization(k, w_max: int) -> FactorizationReport:
    """Check ``A_w = Y_w R_w``, ``B_w = X_w R_{w+1} + Y_w S_w`` and
    ``C_w = X_w S_{w+1}`` exactly for ``w = w_min .. w_max - 1``."""
    k = as_kweight(k)
    if w_max < 1:
        raise DomainError("w_max must be at least 1")
    omega = enumerate_omega(k)
    report = FactorizationReport(k, w_max)
    xy = {}
    rs = {}
    for w in range(k.w_min, w_max + 1):
        xy[w] = build_XY(w, k)
        rs[w] = build_RS(w, k)
    for w in range(k.w_min, w_max):
        A, B, C = build_ABC(w, k)
        X, Y = xy[w]
        R, S = rs[w]
        R1, S1 = rs[w + 1]
        for name, lhs, rhs in (
            ("A=YR", A, Y @ R),
            ("B=XR'+YS", B, X @ R1 + Y @ S),
            ("C=XS'", C, X @ S1),
        ):
            ok = lhs == rhs
            report.results.append(IdentityResult(w, name, ok, "" if ok else _first_difference(lhs, rhs, omega)))
    return report


# -- truncated semi-infinite matrices ---------------------------------------

LAYOUTS = ("M", "M1", "M2")


@dataclass
class TruncatedBlockMatrix:
    """Block rows ``w_min..w_max`` of M, M1 or M2; columns beyond ``w_max`` are cut off.

    ``rows[w]`` is a list of ``(column offset, Block)`` pairs.
    """

    layout: str
    k: KWeight
    w_max: int
    rows: Dict[int, List[Tuple[int, Block]]]

    @property
    def omega(self):
        return enumerate_omega(self.k)

    def row(self, w: int, r: Tuple[int, ...]) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
        """Nonzero entries of row (w, r) inside the window."""
        omega = self.omega
        i = omega_position(self.k)[r]
        out = {}
        for offset, block in self.rows[w]:
            col_w = w + offset
            if not self.k.w_min <= col_w <= self.w_max:
                continue
            for j, v in enumerate(block.entries[i]):
                if v:
                    out[(col_w, omega[j])] = v
        return out

    def row_sum(self, w: int, r: Tuple[int, ...]) -> Fraction:
        return sum(self.row(w, r).values(), ZERO)

    def is_interior(self, w: int, r: Tuple[int, ...]) -> bool:
        if self.layout == "M2":
            return admissible_m2_row(w, r, self.k)
        return w < self.w_max

    def row_keys(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        for w in range(self.k.w_min, self.w_max + 1):
            for r in self.omega:
                yield w, r

    def stochasticity_failures(self) -> List[Tuple[int, Tuple[int, ...], Fraction]]:
        """Rows ``(w, r, sum)`` that break stochasticity.

        Interior rows must sum to exactly 1, boundary rows to at most 1, and
        no row may hold a negative entry.
        """
        bad = []
        for w, r in self.row_keys():
            entries = self.row(w, r)
            s = sum(entries.values(), ZERO)
            if (self.is_interior(w, r) and s != 1) or s > 1 or any(v < 0 for v in entries.values()):
                bad.append((w, r, s))
        return bad

    def to_csv(self, float_column: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["w_row", "r_row", "w_col", "r_col", "value_p_over_q"]
        if float_column:
            header.append("value_float")
        writer.writerow(header)
        for w, r in self.row_keys():
            for (cw, cr), v in sorted(self.row(w, r).items()):
                rec = [w, format_omega(r), cw, format_omega(cr), format_rational(v)]
                if float_column:
                    rec.append(repr(float(v)))
                writer.writerow(rec)
        return buf.getvalue()


def format_omega(r: Sequence[int]) -> str:
    return ";".join(map(str, r))


def _require_nonnegative_kn(k: KWeight):
    if k.k[-1] < 0:
        raise DomainError(
            "block matrices are assembled only for k_n >= 0; "
            f"k_n={k.k[-1]} leaves part of P below the block window"
        )


def assemble(k, w_max: int, layout: str = "M") -> TruncatedBlockMatrix:
    k = as_kweight(k)
    _require_nonnegative_kn(k)
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}")
    rows: Dict[int, List[Tuple[int, Block]]] = {}
    for w in range(k.w_min, w_max + 1):
        if layout == "M":
            A, B, C = build_ABC(w, k)
            rows[w] = [(-1, A), (0, B), (1, C)]
        elif layout == "M1":
            X, Y = build_XY(w, k)
            rows[w] = [(0, Y), (1, X)]
        else:
            R, S = build_RS(w, k)
            rows[w] = [(-1, R), (0, S)]
    return TruncatedBlockMatrix(layout, k, w_max, rows)


# -- rows of the extended walks ----------------------------------------------

def _state_key(m, k):
    return StateSignature(m, k)


def tilde_row(state: StateSignature, which: str = "M") -> Distribution:
    """Row of the extended transition matrix at ``state``.

    ``which`` is ``"M1"`` (increase), ``"M2"`` (decrease, with coefficients
    at ``m + e_{n+1}``) or ``"M"`` (both, read off the block case lists with
    site labels translated to states via ``m(w, r +- e_j) = m(w, r) +- (e_{j+1} - e_{n+1})``
    and ``m(w +- 1, r) = m(w, r) +- (e_1 - e_{n+1})``).
    """
    m, k = state.m, state.k
    kt, n = k.k, k.n
    out: Dict[StateSignature, Fraction] = {}

    def add(target, value):
        if value == 0:
            return
        key = _state_key(target, k)
        out[key] = out.get(key, ZERO) + value

    if which == "M1":
        for j, a in enumerate(a_row(m, kt), start=1):
            if a:
                add(_plus(m, j), a)
        return Distribution(out)

    if which == "M2":
        shifted = _plus(m, n + 1)
        if not _valid(shifted, kt):
            raise DomainError(f"m + e_{{n+1}} = {shifted} is not a valid state (m_{{n+1}} = k_n)")
        for j, b in enumerate(b_row(shifted, kt), start=1):
            if b:
                add(_plus(m, j, -1), b)
        return Distribution(out)

    if which != "M":
        raise ValueError("which must be 'M1', 'M2' or 'M'")

    def move(up: int, down: int):
        return _plus(_plus(m, up), down, -1)

    # lower block: w -> w-1
    add(move(n + 1, 1), _ab(m, kt, n + 1, 1))
    for j in range(1, n):
        add(move(j + 1, 1), _ab(m, kt, j + 1, 1))
    # upper block: w -> w+1
    add(move(1, n + 1), _ab(m, kt, 1, n + 1))
    for j in range(1, n):
        add(move(1, j + 1), _ab(m, kt, 1, j + 1))
    # diagonal block
    add(m, sum((_ab(m, kt, j, j) for j in range(1, n + 2)), ZERO))
    for j in range(1, n):
        add(move(j + 1, n + 1), _ab(m, kt, j + 1, n + 1))
        add(move(n + 1, j + 1), _ab(m, kt, n + 1, j + 1))
        for i in range(1, n):
            if i != j:
                add(move(j + 1, i + 1), _ab(m, kt, j + 1, i + 1))
    return Distribution(out)


def m_row(state: StateSignature) -> Dict[PCoordinate, Fraction]:
    """Row of ``M`` at ``wr_from_state(state)``, read from the A/B/C blocks."""
    p = wr_from_state(state)
    k = state.k
    omega = enumerate_omega(k)
    i = omega_position(k)[p.r]
    out = {}
    for offset, block in zip((-1, 0, 1), build_ABC(p.w, k)):
        for j, v in enumerate(block.entries[i]):
            if v:
                if p.w + offset < k.w_min:
                    raise AssertionError(f"mass {v} below the lowest block at {p}")
                out[PCoordinate(p.w + offset, omega[j])] = v
    return out


# -- exact evolution -------------------------------------------------------

def evolve(initial, t: int, k, w_max: int) -> Distribution:
    """Exact ``initial @ M^t`` on block rows up to ``w_max``.

    ``initial`` maps :class:`PCoordinate` to weights.  Mass pushed past
    ``w_max`` is dropped and accumulated in ``deficit``.  A
    :class:`TruncationWarning` is issued if the initial support is closer
    than ``t`` blocks to the cut.
    """
    k = as_kweight(k)
    _require_nonnegative_kn(k)
    if t < 0:
        raise DomainError("t must be non-negative")
    omega = enumerate_omega(k)
    pos = omega_position(k)
    vec: Dict[Tuple[int, int], Fraction] = {}
    for p, v in dict(initial).items():
        if not isinstance(p, PCoordinate):
            p = PCoordinate(*p)
        check_pcoordinate(p, k)
        if p.w > w_max:
            raise DomainError(f"initial support at w={p.w} beyond w_max={w_max}")
        vec[(p.w, pos[p.r])] = vec.get((p.w, pos[p.r]), ZERO) + Fraction(v)
    if vec:
        reach = max(w for w, _ in vec) + t
        if reach > w_max:
            warnings.warn(
                f"support may reach w={reach} > w_max={w_max}; "
                f"leaked mass is reported in the deficit",
                TruncationWarning,
                stacklevel=2,
            )
    cache: Dict[int, Tuple[Block, Block, Block]] = {}
    leaked = ZERO
    for _ in range(t):
        nxt: Dict[Tuple[int, int], Fraction] = {}
        for (w, i), v in vec.items():
            if not v:
                continue
            if w not in cache:
                cache[w] = build_ABC(w, k)
            for offset, block in zip((-1, 0, 1), cache[w]):
                for j, entry in enumerate(block.entries[i]):
                    if not entry:
                        continue
                    mass = v * entry
                    cw = w + offset
                    if cw > w_max:
                        leaked += mass
                    else:
                        nxt[(cw, j)] = nxt.get((cw, j), ZERO) + mass
        vec = nxt
    weights = {PCoordinate(w, omega[i]): v for (w, i), v in sorted(vec.items()) if v}
    return Distribution(weights, deficit=leaked)


def evolve_states(initial, t: int) -> Distribution:
    """Exact ``t``-step law of the extended walk from a state-keyed distribution.

    Uses :func:`tilde_row` rows of the composed walk, so it works off the
    hyperplane P as well; the support stays finite and nothing is truncated.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    vec: Dict[StateSignature, Fraction] = {s: Fraction(v) for s, v in dict(initial).items() if v}
    rows: Dict[StateSignature, Distribution] = {}
    for _ in range(t):
        nxt: Dict[StateSignature, Fraction] = {}
        for s, v in vec.items():
            if s not in rows:
                rows[s] = tilde_row(s, "M")
            for target, p in rows[s].items():
                nxt[target] = nxt.get(target, ZERO) + v * p
        vec = nxt
    return Distribution(vec)
