"""Command-line front end.

Exit codes: 0 success, 1 certificate failure or violated precondition,
2 verification budget exhausted, 64 usage error, 65 malformed formula.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .formula import FormulaSyntaxError, is_normalized, normalize, parse_formula, parse_number, render_formula
from .numeric import RationalInterval, SurdNumber, enclose_surd, render_rational, render_surd
from .propagate import PropagationError, propagate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

DEFAULT_DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _decimal(x: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    if d == 0:
        return "0"
    text = format(d, "f") if abs(d) >= Decimal("1e-6") else format(d, "e")
    if "." in text and "e" not in text:
        text = text.rstrip("0").rstrip(".")
    return text


def render_value(x, exact: bool = False, digits: int = DEFAULT_DIGITS) -> str:
    """Format a rational, surd or enclosure for CSV output."""
    if x is None:
        return ""
    if isinstance(x, RationalInterval):
        return f"[{render_value(x.lo, exact, digits)}; {render_value(x.hi, exact, digits)}]"
    if isinstance(x, SurdNumber):
        if x.is_rational:
            x = x.rat
        elif exact:
            return render_surd(x)
        else:
            # enclosure much tighter than the printed precision
            x = enclose_surd(x, Fraction(1, 10 ** (digits + 20))).midpoint()
    if isinstance(x, float):
        x = Fraction(x)
    x = Fraction(x)
    return render_rational(x) if exact else _decimal(x, digits)


def _write_csv(rows, header, out_path: str | None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(buf.getvalue(), out_path)


def _emit(text: str, out_path: str | None):
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------


def _number(text: str):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _number_list(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _depths(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad depth list {text!r}") from None
    if not out or min(out) < 0:
        raise UsageError(f"bad depth list {text!r}")
    return out


def _assignments(items) -> dict[str, int]:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part.strip():
                continue
            name, sep, value = part.partition("=")
            if not sep or value.strip() not in ("0", "1"):
                raise UsageError(f"bad assignment {part!r}; expected NAME=0 or NAME=1")
            out[name.strip()] = int(value)
    return out


def _soft_leaves(items) -> dict[str, tuple]:
    out = {}
    for item in items or []:
        name, sep, pair = item.partition("=")
        p0, sep2, p1 = pair.partition(":")
        if not sep or not sep2:
            raise UsageError(f"bad leaf {item!r}; expected NAME=P0:P1")
        worlds = (_number(p0), _number(p1))
        if not all(0 <= w <= 1 for w in worlds):
            raise UsageError(f"leaf probabilities must lie in [0, 1]: {item!r}")
        out[name.strip()] = worlds
    return out


def _read_formula(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    lines = [line.split(";", 1)[0] for line in text.splitlines()]
    return parse_formula("\n".join(lines))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import INEQUALITY_NAMES, verify_all

    only = None
    if args.only:
        only = [n for item in args.only for n in item.split(",") if n]
        unknown = [n for n in only if n not in INEQUALITY_NAMES]
        if unknown:
            raise UsageError(f"unknown inequality {', '.join(unknown)}; choose from {', '.join(INEQUALITY_NAMES)}")
    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    beta = _number(args.beta)
    if not (0 < beta < Fraction(1, 2)):
        raise UsageError("--beta must lie in (0, 1/2)")
    min_width = _number(args.min_width)
    if isinstance(min_width, SurdNumber) or min_width <= 0:
        raise UsageError("--min-width must be a positive rational")
    report = verify_all(beta, args.budget, min_width, only, args.workers)
    sys.stdout.write(report.text())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    return report.exit_code


def cmd_propagate(args) -> int:
    f = _read_formula(args.formula)
    fixed = _assignments(args.set)
    soft = _soft_leaves(args.leaf)
    if args.distinguished is None and not soft:
        raise UsageError("give --distinguished or at least one --leaf")
    if not is_normalized(f):
        f = normalize(f)
        print("note: formula normalized to noisy or/parity, not and constants", file=sys.stderr)
    try:
        trace = propagate(f, args.distinguished, fixed, soft=soft, mode=args.mode, bits=args.bits)
    except PropagationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    r = lambda v: render_value(v, args.exact_render, args.digits)  # noqa: E731
    rows = []
    for w in trace.wires:
        p = w.posterior
        rows.append([w.node_id, w.depth, r(p.p0_world0), r(p.p0_world1), r(p.a), r(p.delta), r(w.weighted_bias)])
    _write_csv(rows, ["node_id", "depth", "p0_world0", "p0_world1", "a", "delta", "weighted_bias"], args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    from .experiments import LEAF_PATTERNS, threshold_scan

    epsilons = _number_list(args.eps)
    if not epsilons:
        raise UsageError("--eps needs at least one value")
    for e in epsilons:
        if not (0 <= e <= Fraction(1, 2)):
            raise UsageError(f"noise {render_value(e)} outside [0, 1/2]")
    if args.leaves is not None and args.leaves not in LEAF_PATTERNS:
        raise UsageError(f"--leaves must be one of {', '.join(LEAF_PATTERNS)}")
    result = threshold_scan(args.gate, epsilons, _depths(args.depths), args.leaves)
    r = lambda v: render_value(v, args.exact_render, args.digits)  # noqa: E731
    rows = [
        [r(row.epsilon), row.depth, r(row.delta_out), r(row.weighted_bias_out), r(row.max_gate_ratio)]
        for row in result.rows
    ]
    _write_csv(rows, ["epsilon", "depth", "delta_out", "weighted_bias_out", "max_gate_ratio"], args.output)
    return EXIT_OK


def cmd_potential(args) -> int:
    from .potential import q_eval

    step = _number(args.step)
    if isinstance(step, SurdNumber) or not (0 < step <= 1):
        raise UsageError("--step must be a rational in (0, 1]")
    r = lambda v: render_value(v, args.exact_render, args.digits)  # noqa: E731
    rows = []
    k = 0
    while k * step <= 1:
        x = k * step
        rows.append([r(x), r(q_eval(x))])
        k += 1
    _write_csv(rows, ["x", "q"], args.output)
    return EXIT_OK


def cmd_normalize(args) -> int:
    f = _read_formula(args.formula)
    _emit(render_formula(normalize(f)) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gatenoise", description="Noisy 2-input gate formulas: propagation, potential, certificates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="certify the potential-decay inequalities")
    p.add_argument("--all", action="store_true", help="run every inequality (the default)")
    p.add_argument("--only", action="append", metavar="NAME", help="restrict to these inequalities (repeatable, comma list)")
    p.add_argument("--beta", default="b2", help="threshold value to use (default b2)")
    p.add_argument("--budget", type=int, default=2_000_000, help="max boxes per certificate")
    p.add_argument("--min-width", default="1/1073741824", help="smallest box width before giving up")
    p.add_argument("--workers", type=int, default=1, help="processes for independent inequalities")
    p.add_argument("--json", metavar="PATH", help="also write a machine-readable summary")
    p.set_defaults(func=cmd_verify)

    def add_render(p):
        p.add_argument("--exact-render", action="store_true", help="print exact rationals / p + q*sqrt7")
        p.add_argument("--digits", type=int, default=DEFAULT_DIGITS, help="significant digits of decimal output")
        p.add_argument("-o", "--output", metavar="PATH", help="write CSV here instead of stdout")

    p = sub.add_parser("propagate", help="two-world propagation trace as CSV")
    p.add_argument("formula", help="formula file ('-' for stdin)")
    p.add_argument("-d", "--distinguished", help="input whose two worlds are compared")
    p.add_argument("--set", action="append", metavar="NAME=BIT", help="fix other inputs (repeatable, comma list)")
    p.add_argument("--leaf", action="append", metavar="NAME=P0:P1", help="leaf with given P[0] in each world")
    p.add_argument("--mode", choices=("exact", "interval", "auto"), default="exact")
    p.add_argument("--bits", type=int, default=96, help="outward rounding in interval mode")
    add_render(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("scan", help="bias decay through balanced trees")
    p.add_argument("--gate", choices=("or", "parity"), default="or")
    p.add_argument("--eps", default="b2", help="comma-separated noise values")
    p.add_argument("--depths", default="1..8", help="'LO..HI' or comma list")
    p.add_argument("--leaves", help="leaf pattern: all, one or mixed")
    add_render(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("potential", help="tabulate q on [0, 1]")
    p.add_argument("--step", default="1/100")
    add_render(p)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("normalize", help="rewrite a formula over noisy or/parity, not and constants")
    p.add_argument("formula", help="formula file ('-' for stdin)")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_normalize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "digits", DEFAULT_DIGITS) < 1:
        parser.error("--digits must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gatenoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormulaSyntaxError as exc:
        print(f"gatenoise: formula error: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
