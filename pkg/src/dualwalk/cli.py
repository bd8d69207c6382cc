"""Command-line interface.

Exit status: 0 on success, 1 on invalid input (bad k or m, oversized
enumeration), 2 when an identity or tolerance check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import blocks, urn, walk, young
from .core import (
    DualWalkError,
    KWeight,
    PCoordinate,
    StateSignature,
    a_row,
    b_row,
    format_rational,
    parse_int_tuple,
    state_from_wr,
    total_variation,
    wr_from_state,
)

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 1, 2
SEED_ENV = "DUALWALK_SEED"


class _Out:
    """Collects tabular output in one of the three formats."""

    def __init__(self, fmt: str, header: Sequence[str], with_float: bool = False, float_of: Optional[str] = None):
        self.fmt = fmt
        self.header = list(header)
        self.float_of = float_of if with_float else None
        if self.float_of:
            self.header.append(self.float_of.replace("_p_over_q", "") + "_float")
        self.rows: List[List[object]] = []

    def add(self, *values):
        values = list(values)
        if self.float_of:
            values.append(repr(float(Fraction(values[self.header.index(self.float_of)]))))
        self.rows.append(values)

    def render(self) -> str:
        if self.fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.header)
            writer.writerows(self.rows)
            return buf.getvalue()
        if self.fmt == "records":
            return "".join(json.dumps(dict(zip(self.header, map(str, row)))) + "\n" for row in self.rows)
        return "".join(" ".join(str(v) for v in row) + "\n" for row in self.rows)


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kweight(args) -> KWeight:
    return KWeight(parse_int_tuple(args.k))


def _state(args) -> StateSignature:
    k = _kweight(args)
    if args.m is not None:
        return StateSignature(parse_int_tuple(args.m), k)
    if getattr(args, "w", None) is not None:
        return state_from_wr(PCoordinate(args.w, parse_int_tuple(args.r or "")), k)
    raise DualWalkError("give the state with --m (or --w/--r)")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


# -- subcommands -----------------------------------------------------------

def cmd_coeffs(args) -> int:
    state = _state(args)
    a = a_row(state.m, state.k.k)
    b = b_row(state.m, state.k.k)
    if args.format == "table":
        lines = ["a " + " ".join(map(format_rational, a)), "b " + " ".join(map(format_rational, b))]
        if args.float:
            lines.append("a_float " + " ".join(repr(float(x)) for x in a))
            lines.append("b_float " + " ".join(repr(float(x)) for x in b))
        _emit("".join(line + "\n" for line in lines), args.output)
        return EXIT_OK
    out = _Out(args.format, ["coefficient", "i", "value_p_over_q"], args.float, "value_p_over_q")
    for name, row in (("a", a), ("b", b)):
        for i, v in enumerate(row, start=1):
            out.add(name, i, format_rational(v))
    _emit(out.render(), args.output)
    return EXIT_OK


def cmd_matrix(args) -> int:
    mat = blocks.assemble(_kweight(args), args.wmax, args.which)
    if args.format == "csv":
        _emit(mat.to_csv(args.float), args.output)
        return EXIT_OK
    out = _Out(args.format, ["w_row", "r_row", "w_col", "r_col", "value_p_over_q"], args.float, "value_p_over_q")
    for w, r in mat.row_keys():
        for (cw, cr), v in sorted(mat.row(w, r).items()):
            out.add(w, blocks.format_omega(r), cw, blocks.format_omega(cr), format_rational(v))
    _emit(out.render(), args.output)
    return EXIT_OK


def cmd_factor_check(args) -> int:
    report = blocks.check_factorization(_kweight(args), args.wmax)
    lines = report.lines() if args.verbose or not report.ok else []
    lines.append(report.summary())
    _emit("".join(line + "\n" for line in lines), args.output)
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_urn_enum(args) -> int:
    state = _state(args)
    out = _Out("csv" if args.format == "table" else args.format,
               ["word", "class", "probability_p_over_q"], args.float, "probability_p_over_q")
    for word, cls, p in urn.enumeration_rows(state):
        out.add(urn.format_word(word), cls, format_rational(p))
    _emit(out.render(), args.output)
    return EXIT_OK


def cmd_urn_card(args) -> int:
    table = urn.class_cardinalities_recursive(args.n)
    status = EXIT_OK
    lines = [" ".join(map(str, table))]
    if args.check:
        enumerated = urn.class_cardinalities_enumerated(args.n)
        if enumerated == table:
            lines.append(f"enumeration agrees ({sum(enumerated)} words)")
        else:
            lines.append("enumeration disagrees: " + " ".join(map(str, enumerated)))
            status = EXIT_CHECK
    _emit("".join(line + "\n" for line in lines), args.output)
    return status


def cmd_young_render(args) -> int:
    ystate = young.YoungState.from_state(_state(args))
    _emit(young.render(ystate, args.glyph), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    state = _state(args)
    res = walk.simulate(state, args.steps, args.walkers, _seed(args), args.mechanism,
                        args.kind, args.workers, args.log_walkers)
    if args.trajectory_out:
        with open(args.trajectory_out, "w", encoding="utf-8") as fh:
            fh.write(res.log.text())
    out = _Out(args.format, ["state", "count", "frequency"])
    for m, c in sorted(res.counts.items()):
        out.add(",".join(map(str, m)), c, repr(c / res.walkers))
    _emit(out.render(), args.output)
    return EXIT_OK


def _exact_law(state: StateSignature, steps: int, wmax: Optional[int]):
    """Exact law after ``steps`` full steps, keyed by state."""
    if state.in_p and state.k.k[-1] >= 0:
        p0 = wr_from_state(state)
        wmax = wmax if wmax is not None else p0.w + steps + 1
        dist = blocks.evolve({p0: 1}, steps, state.k, wmax)
        return dist.map_keys(lambda p: state_from_wr(p, state.k))
    return blocks.evolve_states({state: 1}, steps)


def cmd_evolve(args) -> int:
    state = _state(args)
    dist = _exact_law(state, args.steps, args.wmax)
    out = _Out(args.format, ["state", "value_p_over_q"], args.float, "value_p_over_q")
    for s, v in sorted(dist.items(), key=lambda kv: kv[0].m):
        out.add(str(s), format_rational(v))
    text = out.render()
    if dist.deficit:
        sys.stderr.write(f"leaked mass beyond w_max: {format_rational(dist.deficit)}\n")
    _emit(text, args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    state = _state(args)
    exact = _exact_law(state, args.steps, args.wmax)
    res = walk.simulate(state, args.steps, args.walkers, _seed(args), args.mechanism,
                        "full", args.workers, 0)
    empirical = {StateSignature(m, state.k): c / res.walkers for m, c in res.counts.items()}
    tv = total_variation(empirical, exact)
    ok = tv <= args.tol
    _emit(f"tv={tv:.6f} tol={args.tol} {'OK' if ok else 'FAIL'}\n", args.output)
    return EXIT_OK if ok else EXIT_CHECK


# -- parser ----------------------------------------------------------------

def _add_common(p, state=True):
    p.add_argument("--k", required=True, help="comma-separated k, e.g. 6,3")
    if state:
        p.add_argument("--m", help="comma-separated m, e.g. 8,5,1")
    p.add_argument("--format", choices=("table", "csv", "records"), default="table")
    p.add_argument("--float", action="store_true", help="add a decimal column next to exact values")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="a^2 and b^2 rows at a state")
    _add_common(p)
    p.add_argument("--w", type=int)
    p.add_argument("--r")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("matrix", help="dump the truncated M, M1 or M2")
    _add_common(p, state=False)
    p.add_argument("--wmax", type=int, default=4)
    p.add_argument("--which", choices=blocks.LAYOUTS, default="M")
    p.set_defaults(func=cmd_matrix, format="csv")

    p = sub.add_parser("factor-check", help="check M = M1 M2 block by block")
    p.add_argument("--k", required=True)
    p.add_argument("--wmax", type=int, default=10)
    p.add_argument("--verbose", "-v", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_factor_check)

    p = sub.add_parser("urn-enum", help="all words with class and probability at a state")
    _add_common(p)
    p.set_defaults(func=cmd_urn_enum)

    p = sub.add_parser("urn-card", help="class sizes of the word sample space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check", action="store_true", help="cross-check by enumeration (n <= 4)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_urn_card)

    p = sub.add_parser("young-render", help="draw the Young diagram of a state")
    p.add_argument("--k", required=True)
    p.add_argument("--m", required=True)
    p.add_argument("--glyph", default=young.DEFAULT_GLYPH)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_young_render)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "Monte Carlo walkers"),
        ("evolve", cmd_evolve, "exact distribution after t steps"),
        ("compare", cmd_compare, "simulate vs exact, total variation distance"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--w", type=int)
        p.add_argument("--r")
        p.add_argument("--steps", "-t", type=int, default=1)
        if name == "evolve" or name == "compare":
            p.add_argument("--wmax", type=int, help="block truncation level (states on P)")
        if name != "evolve":
            p.add_argument("--walkers", type=int, default=10000)
            p.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 0")
            p.add_argument("--mechanism", choices=walk.MECHANISMS, default="direct")
            p.add_argument("--workers", type=int, default=1)
        if name == "simulate":
            p.add_argument("--kind", choices=walk.KINDS, default="full")
            p.add_argument("--log-walkers", type=int, default=10)
            p.add_argument("--trajectory-out", help="write per-step records of the logged walkers here")
        if name == "compare":
            p.add_argument("--tol", type=float, default=0.02)
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DualWalkError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
