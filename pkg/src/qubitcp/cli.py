"""Command-line entry point: gen, solve, verify, oracle, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import bench
from .core import (
    CompiledCircuit,
    Status,
    StructureError,
    dump_json,
    load_json,
    problem_from_dict,
    problem_to_dict,
    solution_from_dict,
    solution_to_dict,
)
from .instances import InstanceSpec
from .model import build_model
from .oracle import OracleCapExceeded, oracle_optimal
from .solver import VerificationError, solve_escalating, solve_problem
from .verifier import verify

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def cmd_gen(args) -> int:
    spec = InstanceSpec(args.q, args.layers or args.q, args.topology, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{spec.name}.json"
    dump_json(problem_to_dict(spec.problem(dummy_count=args.dummy_count)), path)
    print(path)
    return EXIT_OK


def _load_problem(args):
    overrides = dict(
        variant=getattr(args, "variant", None),
        mode=getattr(args, "mode", None),
        dummy_count=getattr(args, "dummy_count", None),
    )
    if getattr(args, "no_symmetry", False):
        overrides["symmetry_breaking"] = False
    if getattr(args, "no_frontload", False):
        overrides["frontload_dominance"] = False
    return problem_from_dict(load_json(args.problem), **overrides)


def cmd_solve(args) -> int:
    problem = _load_problem(args)
    if args.dump_model:
        Path(args.dump_model).write_text(build_model(problem).dump() + "\n")
    started = time.perf_counter()
    kwargs = dict(strategy=args.strategy, time_limit=args.time_limit)
    try:
        if args.escalate_k is not None:
            problem, outcome = solve_escalating(problem, args.escalate_k, **kwargs)
        else:
            outcome = solve_problem(problem, **kwargs)
    except VerificationError as exc:
        print(f"internal error: solver output failed verification: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    elapsed = (time.perf_counter() - started) * 1000.0
    data = solution_to_dict(problem, outcome.status, outcome.best)
    data["dummy_count"] = problem.dummy_count
    if args.out:
        dump_json(data, args.out)
    best = outcome.best
    print(
        f"status={outcome.status.value} objective={best.objective if best else '-'} "
        f"depth={best.depth if best else '-'} K={problem.dummy_count} "
        f"time_ms={elapsed:.1f} nodes={outcome.stats.nodes}"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    status, compiled = solution_from_dict(load_json(args.solution))
    if compiled is None:
        print(f"no placements to verify (status {status.value})", file=sys.stderr)
        return EXIT_FAIL
    violations = verify(problem, compiled)
    if violations:
        for v in violations:
            print(v)
        return EXIT_FAIL
    print(f"ok objective={compiled.objective} depth={compiled.depth}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = _load_problem(args)
    try:
        result = oracle_optimal(problem)
    except OracleCapExceeded as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if result.optimum is None:
        data = solution_to_dict(problem, Status.INFEASIBLE, None)
    else:
        compiled = CompiledCircuit.from_placements(problem, result.placements)
        data = solution_to_dict(problem, Status.OPTIMAL, compiled)
    if args.out:
        dump_json(data, args.out)
    print(f"optimum={'infeasible' if result.optimum is None else result.optimum}")
    print(json.dumps(data))
    return EXIT_OK


def cmd_bench(args) -> int:
    instances = bench.suite(args.sizes, args.count, args.topology, args.seed_base, args.layers)
    specs = [
        bench.RunSpec(inst, args.variant or ("linear" if inst.topology == "linear" else "general"),
                      args.mode, args.dummy_count, args.strategy, args.time_limit)
        for inst in instances
    ]
    records = bench.run_suite(specs, args.jobs)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench.csv").write_text(bench.records_to_csv(records))
    (out_dir / "cactus.csv").write_text(bench.cactus_to_csv(bench.cactus_series(records)))
    print(bench.format_depth_table(bench.depth_table(records)))
    failed = [r for r in records if r.status.startswith("error")]
    for r in failed:
        print(f"{r.instance}: {r.status}", file=sys.stderr)
    print(f"wrote {out_dir / 'bench.csv'} and {out_dir / 'cactus.csv'}")
    return EXIT_OK


def _add_problem_flags(p):
    p.add_argument("--variant", choices=["linear", "general"])
    p.add_argument("--mode", choices=["faithful", "swap_only"])
    p.add_argument("--dummy-count", "-K", type=_count, help="dummy layers per block")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubitcp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random q-qubit instance")
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--layers", type=_positive, help="gate layers (default q)")
    p.add_argument("--topology", choices=["linear", "lattice"], default="linear")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dummy-count", "-K", type=_count, default=4)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve a problem file to optimality")
    p.add_argument("problem")
    _add_problem_flags(p)
    p.add_argument("--strategy", choices=["ascent", "bnb"], default="ascent")
    p.add_argument("--time-limit", type=float, help="seconds")
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--no-frontload", action="store_true")
    p.add_argument("--escalate-k", type=_positive, metavar="MAX_K",
                   help="on infeasibility retry with K+1 up to MAX_K")
    p.add_argument("--out", "-o", help="solution JSON path")
    p.add_argument("--dump-model", metavar="PATH", help="write the constraint network as text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against its problem")
    p.add_argument("problem")
    p.add_argument("solution")
    _add_problem_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force optimum for tiny instances")
    p.add_argument("problem")
    _add_problem_flags(p)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run a seeded suite and write CSVs")
    p.add_argument("--sizes", type=_sizes, default=[4, 5, 6, 7])
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--layers", type=_positive, help="gate layers (default q)")
    p.add_argument("--topology", choices=["linear", "lattice"], default="linear")
    p.add_argument("--variant", choices=["linear", "general"])
    p.add_argument("--mode", choices=["faithful", "swap_only"], default="faithful")
    p.add_argument("--dummy-count", "-K", type=_count, default=4)
    p.add_argument("--strategy", choices=["ascent", "bnb"], default="ascent")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--out-dir", default="bench_out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (StructureError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
