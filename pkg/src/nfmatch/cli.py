"""Command-line entry point.

Subcommands: run FILE, eval EXPR, repl, bench {comb2, seq-triple},
examples {sat, twin-primes, triplets}. Exit codes: 0 success, 1 error,
2 usage.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import examples as examples_mod
from .lang import Evaluator, cli_form, repl, run_text


def _engine_flags(default: bool) -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    default_value = None if default else argparse.SUPPRESS
    flags.add_argument(
        "--engine",
        choices=("strict", "stream"),
        default="strict" if default else argparse.SUPPRESS,
        help="strict enumerates results eagerly; stream interleaves fairly",
    )
    flags.add_argument(
        "--naive-multiset",
        action="store_true",
        default=False if default else argparse.SUPPRESS,
        help="bind Multiset to the layered (join/cons) definition",
    )
    flags.add_argument(
        "--max-results",
        type=int,
        metavar="N",
        default=default_value,
        help="truncate each match-all to at most N results",
    )
    return flags


def build_parser() -> argparse.ArgumentParser:
    # the engine flags live on the main parser (defaults) and on each
    # language subcommand (SUPPRESS), so both flag positions work
    outer = _engine_flags(default=True)
    inner = _engine_flags(default=False)
    parser = argparse.ArgumentParser(
        prog="nfmatch",
        parents=[outer],
        description="Pattern matching with backtracking for non-free data types.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[inner], help="evaluate a program file")
    p_run.add_argument("file")
    p_eval = sub.add_parser("eval", parents=[inner], help="evaluate one expression")
    p_eval.add_argument("expr")
    sub.add_parser("repl", parents=[inner], help="interactive session")

    p_bench = sub.add_parser("bench", help="timing harness")
    bench_sub = p_bench.add_subparsers(dest="bench", required=True)
    for name, sizes, variants in (
        ("comb2", "50,100", ",".join(bench_mod.COMB2_VARIANTS)),
        ("seq-triple", "100,200", ",".join(bench_mod.SEQ_TRIPLE_VARIANTS)),
    ):
        bp = bench_sub.add_parser(name)
        bp.add_argument("--sizes", default=sizes, help="comma-separated n values")
        bp.add_argument("--variants", default=variants, help="comma-separated variants")
        bp.add_argument("--reps", type=int, default=5, help="repetitions per cell")
        bp.add_argument("--timeout", type=float, default=60.0, help="seconds per cell")
        bp.add_argument("--csv", default=None, metavar="PATH", help="write rows as CSV")
        bp.add_argument("--parallel", action="store_true", help="run cells concurrently")

    p_ex = sub.add_parser("examples", help="example applications")
    ex_sub = p_ex.add_subparsers(dest="example", required=True)
    p_sat = ex_sub.add_parser("sat", help="Davis-Putnam on a DIMACS-lite file")
    p_sat.add_argument("file")
    p_twin = ex_sub.add_parser("twin-primes", help="first K twin prime pairs")
    p_twin.add_argument("k", type=int)
    p_trip = ex_sub.add_parser("triplets", help="first K prime triplets")
    p_trip.add_argument("k", type=int)
    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    if args.command in ("run", "eval", "repl"):
        evaluator = Evaluator(
            engine_mode=args.engine,
            naive_multiset=args.naive_multiset,
            max_results=args.max_results,
        )
        if args.command == "repl":
            return repl(evaluator)
        if args.command == "eval":
            return run_text(args.expr, evaluator, "<eval>")
        try:
            with open(args.file) as fh:
                text = fh.read()
        except OSError as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
        return run_text(text, evaluator, args.file)

    if args.command == "bench":
        sizes = tuple(int(s) for s in args.sizes.split(",") if s)
        variants = tuple(v for v in args.variants.split(",") if v)
        cfg = bench_mod.BenchConfig(
            sizes=sizes,
            variants=variants,
            repetitions=args.reps,
            timeout=args.timeout,
            bench=args.bench,
            parallel=args.parallel,
        )
        try:
            bench_mod.run_benchmarks(cfg, csv_path=args.csv)
        except bench_mod.BenchError as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
        return 0

    if args.command == "examples":
        try:
            if args.example == "sat":
                with open(args.file) as fh:
                    text = fh.read()
                vars_, cnf = examples_mod.read_dimacs(text)
                verdict = examples_mod.sat(vars_, cnf)
                print("SATISFIABLE" if verdict else "UNSATISFIABLE")
            elif args.example == "twin-primes":
                print(cli_form(examples_mod.twin_primes(args.k)))
            else:
                print(cli_form(examples_mod.prime_triplets(args.k)))
        except (OSError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
        return 0

    parser.print_usage(sys.stderr)
    return 2


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
