from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .bnb import solve_bnb
from .enumeration import solve_enumeration
from .external import SolverError, solve_external
from .generate import GenConfig, generate, instance_name, paper_suite
from .graph import InstanceError, format_instance, format_weight, parse_instance, parse_weight, prefix_instance
from .milp import build_model, check_solution, emit_lp, parse_solution, witness_from_values


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _read_instance(path: str):
    return parse_instance(Path(path).read_text())


def cmd_gen(args: argparse.Namespace) -> int:
    if args.paper_suite:
        if not args.out:
            raise SystemExit("gen --paper-suite needs --out DIR")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, cfg in paper_suite(args.seed):
            if args.max_edges is not None and cfg.edge_count > args.max_edges:
                continue
            (out / f"{name}.mmbp").write_text(format_instance(generate(cfg)))
            print(name)
        return 0
    if args.n is None or args.m is None:
        raise SystemExit("gen needs -n and -m (or --paper-suite)")
    cfg = GenConfig(args.n, args.m, args.k, parse_weight(args.wmin), parse_weight(args.wmax), args.seed)
    text = format_instance(generate(cfg))
    if args.out:
        target = Path(args.out)
        if target.is_dir():
            target = target / f"{instance_name(args.n, args.m)}.mmbp"
        target.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _read_instance(args.file)
    if args.k is not None:
        instance = prefix_instance(instance, args.k)
    if args.method == "enum":
        res = solve_enumeration(instance, args.time_limit, jobs=args.jobs)
    elif args.method == "bnb":
        res = solve_bnb(instance, args.time_limit)
    else:
        res = solve_external(instance, args.time_limit, solver=args.solver)
    if args.json:
        print(json.dumps(res.to_dict(timings=not args.no_timings), indent=2))
        return 0
    members = " ".join(map(str, res.best_bisection.members)) if res.best_bisection else "-"
    print(f"status: {res.status}")
    print(f"value: {format_weight(res.best_value)}")
    print(f"bisection: {members}")
    print(f"explored: {res.explored}")
    for key, val in res.stats.items():
        print(f"{key}: {val}")
    if not args.no_timings:
        t = "-" if res.time_to_best is None else f"{res.time_to_best:.3f}"
        print(f"t: {t}")
        print(f"t_tot: {res.time_total:.3f}")
    return 0


def cmd_emit_lp(args: argparse.Namespace) -> int:
    text = emit_lp(build_model(_read_instance(args.file)))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    model = build_model(_read_instance(args.file))
    witness = witness_from_values(model, parse_solution(Path(args.solution).read_text()))
    report = check_solution(model, witness)
    for family, ok in report.families.items():
        print(f"{family}: {'ok' if ok else 'VIOLATED'}")
    if report.violated:
        print("violated: " + " ".join(report.violated[:20]))
    print(f"feasible: {report.feasible}")
    print(f"tight: {report.tight}")
    if not report.feasible or (args.require_tight and not report.tight):
        return 1
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    suite = bench.load_suite(args.suite)
    if not suite:
        raise SystemExit(f"no .mmbp files in {args.suite}")
    rows = bench.run_protocol(
        suite,
        methods=[m for m in args.methods.split(",") if m],
        k_values=_int_list(args.k),
        time_limit=args.time_limit,
        jobs=args.jobs,
    )
    csv_text = bench.write_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.json:
        Path(args.json).write_text(bench.write_json(rows, timings=not args.no_timings))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmbp", description="Multidimensional maximum bisection tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random instances")
    p.add_argument("-n", type=int, help="vertex count (even)")
    p.add_argument("-m", type=int, help="edge count")
    p.add_argument("-k", type=int, default=20, help="weight dimension")
    p.add_argument("--wmin", default="1.000")
    p.add_argument("--wmax", default="9.999")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paper-suite", action="store_true", help="write the 27 benchmark shapes")
    p.add_argument("--max-edges", type=int, help="with --paper-suite, skip larger graphs")
    p.add_argument("-o", "--out", help="output file or directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one instance exactly")
    p.add_argument("file")
    p.add_argument("--method", choices=sorted(bench.SOLVERS), default="bnb")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--k", type=int, help="solve the k-prefix of the weights")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (enum only)")
    p.add_argument("--solver", help="LP solver binary for --method ext")
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock fields")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("emit-lp", help="write the MILP in LP format")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_emit_lp)

    p = sub.add_parser("check", help="check a '<name> <value>' solution against the MILP")
    p.add_argument("file")
    p.add_argument("--solution", required=True)
    p.add_argument("--require-tight", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run the dimension-sweep protocol over a directory")
    p.add_argument("--suite", required=True)
    p.add_argument("--methods", default="enum,bnb")
    p.add_argument("--k", default=",".join(map(str, bench.PAPER_K_VALUES)))
    p.add_argument("--time-limit", type=float, default=bench.PAPER_TIME_LIMIT)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--json")
    p.add_argument("--no-timings", action="store_true", help="omit timings from --json output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, ValueError, SolverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
