"""``sppkit`` command line.

Exit codes: 0 success (optimal / valid / yes), 1 usage or input error,
2 infeasible / violated / no, 3 iteration, resource or time limit / unknown.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import bench_run, format_summary, parse_bench_config, records_to_csv, summarize
from .core import PolicyError, SppFormatError, load_instance, serialize_instance
from .generate import GenerationError, TvParams, sample_solvable
from .ilp import SolverConfig, Status, decide_budget, solve_spp
from .oracle import OracleCapError, brute_force_chi_optimal, brute_force_optimal
from .paths import ResourceLimitError, check_chi_valid, check_valid
from .reductions import (FormulaSyntaxError, parse_dimacs, parse_qdnf, reduce_3sat,
                         reduce_chi_validity, reduce_qsat2)

log = logging.getLogger("sppkit")

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except SppFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_solve(args) -> int:
    inst = _load(args.file)
    if args.engine == "oracle":
        try:
            found = (brute_force_chi_optimal if args.chi else brute_force_optimal)(inst)
        except OracleCapError as exc:
            print(f"status=ResourceLimit ({exc})")
            return EXIT_LIMIT
        if found is None:
            print("status=Infeasible")
            return EXIT_NEGATIVE
        policy, cost = found
        print(f"status=Optimal cost={cost} policy={','.join(sorted(policy))}")
        return EXIT_OK
    config = SolverConfig(chi=args.chi, max_iters=args.max_iters, cut_strategy=args.cut_strategy)
    rep = solve_spp(inst, config)
    print(rep.to_record())
    if rep.status is Status.OPTIMAL:
        return EXIT_OK
    if rep.status is Status.INFEASIBLE:
        return EXIT_NEGATIVE
    return EXIT_LIMIT


def _policy_arg(text: str) -> list[str]:
    return [e for e in text.split(",") if e]


def cmd_check(args) -> int:
    inst = _load(args.file)
    policy = _policy_arg(args.policy)
    try:
        inst.check_policy(policy)
        v = check_chi_valid(inst, policy) if args.chi else check_valid(inst, policy)
    except PolicyError as exc:
        raise UsageError(str(exc)) from None
    except ResourceLimitError as exc:
        print(f"ResourceLimit: {exc}")
        return EXIT_LIMIT
    if v is None:
        print("ChiValid" if args.chi else "Valid")
        return EXIT_OK
    print(v.render())
    return EXIT_NEGATIVE


def cmd_decide(args) -> int:
    inst = _load(args.file)
    d = decide_budget(inst, args.budget, chi=args.chi)
    if d.outcome == "yes":
        print(f"yes policy={','.join(sorted(d.policy))}")
        return EXIT_OK
    print(d.outcome)
    return EXIT_NEGATIVE if d.outcome == "no" else EXIT_LIMIT


def cmd_reduce(args) -> int:
    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    try:
        if args.kind == "sat3":
            red = reduce_3sat(parse_dimacs(text, max_clause_size=3))
            out = serialize_instance(red.instance, [f"budget {red.budget}", "mode chi"])
        elif args.kind == "chival":
            inst, policy = reduce_chi_validity(parse_dimacs(text, max_clause_size=3))
            out = serialize_instance(inst, [f"policy {','.join(sorted(policy))}"])
        else:
            red = reduce_qsat2(parse_qdnf(text))
            out = serialize_instance(red.instance, [f"budget {red.budget}", "mode chi"])
    except (FormulaSyntaxError, ValueError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    _write(out, args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        params = TvParams(args.states, args.alphabet, args.density,
                          0 if args.single_initial else args.init_density,
                          args.accept_density, args.seed, args.density_mode)
        inst, retries = sample_solvable(params, args.lo, args.hi, args.max_retries)
    except (GenerationError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    log.info("generated after %d retries", retries)
    _write(serialize_instance(inst), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        config = parse_bench_config(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if args.workers is not None:
        config = type(config)(**{**config.__dict__, "workers": args.workers})
    records = bench_run(config)
    _write(records_to_csv(records), args.output)
    table = format_summary(summarize(records))
    if args.summary:
        Path(args.summary).write_text(table, encoding="utf-8")
    sys.stderr.write(table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sppkit", description="Secret protection problem toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute an optimal protecting policy")
    p.add_argument("file")
    p.add_argument("--chi", action="store_true", help="count each protected event once per path")
    p.add_argument("--engine", choices=("ilp", "oracle"), default="ilp")
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--cut-strategy", choices=("first", "all"), default="all")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check a policy")
    p.add_argument("file")
    p.add_argument("--policy", required=True, help="comma separated event names")
    p.add_argument("--chi", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decide", help="budget-constrained decision")
    p.add_argument("file")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--chi", action="store_true")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("reduce", help="build an instance from a formula")
    p.add_argument("kind", choices=("sat3", "chival", "qsat2"))
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="generate a random solvable instance")
    gsub = p.add_subparsers(dest="model", required=True)
    tv = gsub.add_parser("tv", help="Tabakov-Vardi random automaton")
    tv.add_argument("--states", type=int, required=True)
    tv.add_argument("--alphabet", type=int, required=True)
    tv.add_argument("--density", type=str, required=True)
    tv.add_argument("--single-initial", action="store_true")
    tv.add_argument("--init-density", type=str, default="0.001")
    tv.add_argument("--accept-density", type=str, default="0.01")
    tv.add_argument("--density-mode", choices=("per_symbol", "total"), default="per_symbol")
    tv.add_argument("--lo", type=int, default=1)
    tv.add_argument("--hi", type=int, default=10)
    tv.add_argument("--max-retries", type=int, default=100)
    tv.add_argument("--seed", type=int, default=0)
    tv.add_argument("-o", "--output")
    tv.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run the benchmark protocol")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--summary", help="write the median [p95] table here")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
