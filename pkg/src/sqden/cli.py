"""Command-line entry point: ``sqden <command> ...``.

Exit status is 0 on success, 1 on bad arguments and 2 when a factorization
budget or precision ceiling stopped part of the work (partial output is
still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .cf import DEFAULT_MAX_DIGITS, convergents, partial_quotients
from .modular import FactorizationError, factorize, solve_quadratic_congruence
from .primes import DEFAULT_ALPHA_FACTOR, conjecture_scan
from .realnum import PrecisionError, make_real, parse_real_spec
from .report import build_figure_series, emit, format_fraction
from .search import SearchConfig, brute_force_scan, full_search, verify_approximation

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _count(text: str) -> int:
    """Positive integer, also accepting forms like 1e7."""
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not d.is_finite() or d != d.to_integral_value() or d < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(d)


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return value


def _xi(text: str):
    try:
        return parse_real_spec(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: standard output)")


def _add_search_args(p):
    p.add_argument("--xi", type=_xi, required=True)
    p.add_argument("--max-b", type=_count, required=True)
    p.add_argument("--c", type=_rational, default=Fraction(1))
    p.add_argument("--alpha-exp", type=_rational, default=Fraction(7, 20))
    p.add_argument("--b-exp", type=_rational, default=Fraction(3, 4))
    p.add_argument("--brute-cutoff", type=_count, default=1000)
    p.add_argument("--threads", type=_count, default=1)
    p.add_argument("--digits", type=_count, default=None)
    _add_output(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqden", description="Approximations of reals by a/b^2 and a/p.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="hybrid brute-force + convergent search")
    _add_search_args(p)
    p.add_argument("--figure-out", default=None, help="also write figure data (CSV) here")

    p = sub.add_parser("figure", help="cumulative hit count against the expectation curves")
    _add_search_args(p)

    p = sub.add_parser("brute", help="direct scan of every b (the oracle)")
    p.add_argument("--xi", type=_xi, required=True)
    p.add_argument("--max-b", type=_count, required=True)
    p.add_argument("--c", type=_rational, default=Fraction(1))
    p.add_argument("--threads", type=_count, default=1)
    _add_output(p)

    p = sub.add_parser("verify", help="certify a single pair (a, b)")
    p.add_argument("--xi", type=_xi, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=_count, required=True)
    p.add_argument("--c", type=_rational, default=Fraction(1))

    p = sub.add_parser("cf", help="partial quotients and convergents as JSON lines")
    p.add_argument("--xi", type=_xi, required=True)
    p.add_argument("--terms", type=_count, default=20)
    p.add_argument("--digits", type=_count, default=50)

    p = sub.add_parser("solve", help="roots of P*b^2 = alpha (mod Q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--q", type=_count, required=True)

    p = sub.add_parser("primes", help="prime-denominator approximations a/p")
    p.add_argument("--xi", type=_xi, required=True)
    p.add_argument("--convergents", type=_count, default=20)
    p.add_argument("--alpha-factor", type=_rational, default=Fraction(DEFAULT_ALPHA_FACTOR))
    _add_output(p)
    return parser


def _config(args) -> SearchConfig:
    return SearchConfig(
        B=args.max_b,
        c=args.c,
        alpha_exponent=args.alpha_exp,
        b_exponent=args.b_exp,
        brute_cutoff=min(args.brute_cutoff, args.max_b),
        digits=args.digits,
        workers=args.threads,
    )


def _report_status(report) -> int:
    budget_hit = any(s.skipped or s.truncated for s in report.convergents)
    for s in report.convergents:
        if s.skipped:
            print(f"sqden: convergent {s.index} (Q={s.Q}) skipped: {s.skipped}", file=sys.stderr)
        elif s.truncated:
            print(f"sqden: convergent {s.index} (Q={s.Q}) hit the root cap", file=sys.stderr)
    return EXIT_BUDGET if budget_hit else EXIT_OK


def _run(args) -> int:
    cmd = args.command
    if cmd in ("search", "figure"):
        cfg = _config(args)
        report = full_search(args.xi, cfg)
        if cmd == "figure":
            emit(build_figure_series(report, cfg), args.format, args.out)
        else:
            emit(report, args.format, args.out)
            if args.figure_out:
                emit(build_figure_series(report, cfg), "csv", args.figure_out)
        return _report_status(report)
    if cmd == "brute":
        hits = brute_force_scan(args.xi, args.max_b, args.c, workers=args.threads)
        emit(hits, args.format, args.out)
        return EXIT_OK
    if cmd == "verify":
        v = verify_approximation(args.xi, args.a, args.b, args.c)
        emit(v, "json")
        return EXIT_OK
    if cmd == "cf":
        real = make_real(args.xi, args.digits)
        qs = partial_quotients(args.xi, real, args.terms, DEFAULT_MAX_DIGITS)
        for conv, a in zip(convergents(qs.terms), qs.terms):
            print(json.dumps({"index": conv.index, "quotient": a, "P": conv.P, "Q": conv.Q,
                              "residual_bound": format_fraction(conv.residual_bound)}))
        print(json.dumps({"terminated": qs.terminated, "terms": qs.terms}))
        return EXIT_OK
    if cmd == "solve":
        try:
            roots = solve_quadratic_congruence(args.p, args.alpha, factorize(args.q))
        except ValueError as err:
            print(f"sqden: {err}", file=sys.stderr)
            return EXIT_USAGE
        print(json.dumps({"P": args.p, "alpha": args.alpha, "Q": args.q,
                          "roots": list(roots.roots), "truncated": roots.truncated}))
        return EXIT_OK
    if cmd == "primes":
        scan = conjecture_scan(args.xi, args.convergents, args.alpha_factor)
        emit(scan, args.format, args.out)
        return EXIT_OK
    raise AssertionError(cmd)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ValueError as err:
        print(f"sqden: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, FactorizationError) as err:
        print(f"sqden: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as err:
        print(f"sqden: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
