"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 file parse error, 3 infeasible
(solver cap, algorithm/network mismatch, failed validation, undefined
oracle entry).  All output goes to stdout; identical invocations produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .bench import ALGORITHMS, BASELINES, evaluate, ratio_csv, ratio_sweep, solve
from .errors import (
    BruteForceCapError,
    CostOverflowError,
    InfeasibleError,
    KhierError,
    OracleUndefinedError,
    ParseError,
)
from .instances import (
    GenSpec,
    ThreeDMatchingSpec,
    ThreePartitionSpec,
    gen_3dmatching,
    gen_3partition,
    gen_random,
    parse_hierarchy,
    parse_instance,
    write_hierarchy,
    write_instance,
)
from .uniform import as_fraction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _n_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        lo = hi = text
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _triples(text: str) -> tuple[tuple[int, int, int], ...]:
    out = []
    for part in text.split(";"):
        if part == "":
            continue
        nums = _int_list(part)
        if len(nums) != 3:
            raise argparse.ArgumentTypeError(f"triple {part!r} must have three entries")
        out.append(nums)
    return tuple(out)


def build_parser() -> _Parser:
    parser = _Parser(prog="khier", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p_solve = sub.add_parser("solve", help="build a hierarchy for an instance")
    p_solve.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    p_solve.add_argument("--gamma", type=_fraction, default=Fraction(7))
    p_solve.add_argument("--uniform-oracle", action="store_true",
                         help="price multicasts at a flat 1 instead of routed cost")
    p_solve.add_argument("--out", help="write the hierarchy file here")

    p_eval = sub.add_parser("eval", help="price a hierarchy against an instance")
    p_eval.add_argument("--instance", required=True)
    p_eval.add_argument("--hierarchy", required=True)
    p_eval.add_argument("--uniform-oracle", action="store_true")

    p_ratio = sub.add_parser("ratio", help="algorithm-vs-baseline sweep as CSV")
    p_ratio.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_ratio.add_argument("--kind", required=True,
                         choices=("random-tree", "random-graph"))
    p_ratio.add_argument("--n-range", required=True, type=_n_range)
    p_ratio.add_argument("--trials", required=True, type=int)
    p_ratio.add_argument("--seed", type=int, default=0)
    p_ratio.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    p_ratio.add_argument("--gamma", type=_fraction, default=Fraction(7))
    p_ratio.add_argument("--uniform-oracle", action="store_true")
    p_ratio.add_argument("--baseline", choices=BASELINES, default="brute-opt")
    p_ratio.add_argument("--max-weight", type=int, default=10)
    p_ratio.add_argument("--max-edge-cost", type=int, default=10)
    p_ratio.add_argument("--extra-edge-factor", type=float, default=0.5)

    p_gen = sub.add_parser("generate", help="emit an instance file")
    p_gen.add_argument("--kind", required=True,
                       choices=("random-tree", "random-graph",
                                "3partition", "3dmatching"))
    p_gen.add_argument("--n", type=int, default=5)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--max-weight", type=int, default=10)
    p_gen.add_argument("--max-edge-cost", type=int, default=10)
    p_gen.add_argument("--extra-edge-factor", type=float, default=0.5)
    p_gen.add_argument("--sizes", type=_int_list,
                       help="3partition: comma-separated element sizes")
    p_gen.add_argument("--bound", type=int, help="3partition: target triple sum")
    p_gen.add_argument("--base-weight", type=int, default=50)
    p_gen.add_argument("--root-edge-cost", type=int, default=1)
    p_gen.add_argument("--q", type=int, help="3dmatching: ground set size")
    p_gen.add_argument("--triples", type=_triples,
                       help="3dmatching: semicolon-separated index triples, e.g. 1,1,1;2,1,2")
    p_gen.add_argument("--out", help="write the instance file here")

    return parser


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _cmd_solve(args) -> int:
    instance = parse_instance(_read(args.instance))
    hierarchy, cost = solve(instance, args.alg, epsilon=args.eps,
                            gamma=args.gamma, uniform_oracle=args.uniform_oracle)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(write_hierarchy(hierarchy))
    print(f"cost {cost}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    instance = parse_instance(_read(args.instance))
    hierarchy = parse_hierarchy(_read(args.hierarchy), instance)
    breakdown = evaluate(instance, hierarchy, uniform_oracle=args.uniform_oracle)
    print(f"total {breakdown.total}")
    for member in sorted(breakdown.per_member):
        print(f"member {member} {breakdown.per_member[member]}")
    return EXIT_OK


def _cmd_ratio(args) -> int:
    records = ratio_sweep(
        args.alg, args.kind, args.n_range, args.trials, args.seed,
        epsilon=args.eps, gamma=args.gamma, uniform_oracle=args.uniform_oracle,
        baseline=args.baseline, max_weight=args.max_weight,
        max_edge_cost=args.max_edge_cost, extra_edge_factor=args.extra_edge_factor)
    sys.stdout.write(ratio_csv(records))
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.kind in ("random-tree", "random-graph"):
        instance = gen_random(GenSpec(
            args.kind, args.n, seed=args.seed, max_weight=args.max_weight,
            max_edge_cost=args.max_edge_cost,
            extra_edge_factor=args.extra_edge_factor))
    elif args.kind == "3partition":
        if args.sizes is None or args.bound is None:
            raise _UsageError("3partition needs --sizes and --bound")
        instance = gen_3partition(ThreePartitionSpec(
            sizes=args.sizes, bound=args.bound, base_weight=args.base_weight,
            root_edge_cost=args.root_edge_cost))
    else:
        if args.q is None or args.triples is None:
            raise _UsageError("3dmatching needs --q and --triples")
        instance = gen_3dmatching(ThreeDMatchingSpec(
            q=args.q, triples=args.triples, root_edge_cost=args.root_edge_cost))
    text = write_instance(instance)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "eval": _cmd_eval,
    "ratio": _cmd_ratio,
    "generate": _cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required (solve, eval, ratio, generate)")
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasibleError, BruteForceCapError, OracleUndefinedError,
            CostOverflowError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except KhierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
