"""Command line: ``gxtsp solve | bench | trace``.

Node labels on the command line and in printed tours are 1-based, as in
TSPLIB files. Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bench import ExperimentError, ExperimentSpec, format_table, load_instances, quality, run_experiment
from .crossover import OPERATORS, get_operator, make_rng
from .errors import ContractViolation
from .ga import GAConfig, run_ga
from .instance import fig1_fixture
from .local_search import LocalSearchConfig
from .tour import Tour


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _operator_name(value):
    name = value.lower()
    if name not in OPERATORS:
        raise argparse.ArgumentTypeError(f"unknown operator {value!r}; valid: {', '.join(sorted(OPERATORS))}")
    return name


def _operator_list(value):
    return [_operator_name(v.strip()) for v in value.split(",") if v.strip()]


def _labels(value):
    try:
        return [int(v) for v in value.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node labels, got {value!r}") from None


def _ga_args(p):
    p.add_argument("--pop", type=int, default=50, help="population size (default 50)")
    p.add_argument("--gen", type=int, default=500, help="children per outer loop (default 500)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-2opt", dest="two_opt", action="store_false")
    p.add_argument("--no-3opt", dest="three_opt", action="store_false")
    p.add_argument("--ls-max-passes", type=int, default=None)
    p.add_argument("--start-node", type=int, default=None,
                   help="fixed crossover start label instead of a random one")
    p.add_argument("--max-loops", type=int, default=10_000, help="outer-loop safety cap")
    p.add_argument("--tsplib-dir", default=None, help="directory searched for instance files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gxtsp", description="Greedy-crossover GA for the symmetric TSP.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{solve,bench,trace}", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="run the GA once on one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--operator", type=_operator_name, default="igx")
    _ga_args(p)

    p = sub.add_parser("bench", help="repeated runs over instances x operators, CSV report")
    p.add_argument("--instance", action="append", required=True,
                   help="instance file or name (repeatable)")
    p.add_argument("--operator", action="append", type=_operator_list, default=None,
                   help="operator name (repeatable or comma-separated; default igx)")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--no-time", dest="record_time", action="store_false",
                   help="leave avg_secs empty so reruns give byte-identical CSV")
    _ga_args(p)

    p = sub.add_parser("trace", help="log one crossover step by step")
    p.add_argument("--operator", type=_operator_name, default="igx")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", choices=["fig1"])
    src.add_argument("--instance")
    p.add_argument("--tsplib-dir", default=None)
    p.add_argument("--father", type=_labels, required=True)
    p.add_argument("--mother", type=_labels, required=True)
    p.add_argument("--start", type=int, default=None, help="start label (default: random)")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _ga_config(args, operator) -> GAConfig:
    ls = LocalSearchConfig(args.two_opt, args.three_opt, args.ls_max_passes)
    start = None if args.start_node is None else args.start_node - 1
    return GAConfig(
        population_size=args.pop,
        generation_size=args.gen,
        operator=operator,
        ls=ls,
        seed=args.seed,
        max_outer_loops=args.max_loops,
        start_node=start,
    )


def cmd_solve(args, out) -> int:
    (inst,) = load_instances([args.instance], args.tsplib_dir)
    cfg = _ga_config(args, args.operator)
    res = run_ga(inst, cfg)
    print(f"instance: {inst.name} (n={inst.n})", file=out)
    print(f"operator: {cfg.operator}  seed: {cfg.seed}", file=out)
    print("tour: " + " ".join(map(str, res.best_tour.labels())), file=out)
    line = f"length: {res.best_length}"
    if inst.known_optimum:
        line += f"  quality: {quality(res.best_length, inst.known_optimum):.2f}%  (optimum {inst.known_optimum})"
    print(line, file=out)
    print(f"outer loops: {res.outer_loops}  children: {res.children_produced}  time: {res.wall_time:.3f}s", file=out)
    if res.abnormal_stop:
        print("warning: stopped at the outer-loop safety cap", file=out)
    return 0


def cmd_bench(args, out) -> int:
    ops = [op for group in args.operator or [["igx"]] for op in group]
    spec = ExperimentSpec(
        instances=args.instance,
        operators=ops,
        runs=args.runs,
        ga=_ga_config(args, "igx"),
        base_seed=args.seed,
        output=args.out,
        jobs=args.jobs,
        record_time=args.record_time,
    )
    reports = run_experiment(spec, tsplib_dir=args.tsplib_dir)
    print(format_table(reports), file=out)
    if args.out:
        print(f"wrote {args.out}", file=out)
    return 0


def cmd_trace(args, out) -> int:
    if args.fixture:
        inst = fig1_fixture()
    else:
        (inst,) = load_instances([args.instance], args.tsplib_dir)
    father = Tour.from_order([v - 1 for v in args.father], inst)
    mother = Tour.from_order([v - 1 for v in args.mother], inst)
    start = None if args.start is None else args.start - 1
    op = get_operator(args.operator)
    steps = []
    child = op(father, mother, inst, make_rng(args.seed), start=start, trace=steps)
    print(f"operator: {args.operator}", file=out)
    print("father: " + " ".join(map(str, father.labels())) + f"  (length {father.length})", file=out)
    print("mother: " + " ".join(map(str, mother.labels())) + f"  (length {mother.length})", file=out)
    print(f"start: {child.order[0] + 1}", file=out)
    for k, s in enumerate(steps, start=1):
        probes = ", ".join(
            f"{c + 1}[{src} d={d}{' visited' if seen else ''}]" for c, src, d, seen in s.candidates
        )
        line = f"step {k}: at {s.current + 1} probe {probes or '-'} -> {s.chosen + 1}"
        if s.fallback:
            line += f" (fallback: {s.fallback}"
            if s.sampled:
                line += " over " + ",".join(str(v + 1) for v in s.sampled)
            line += ")"
        print(line, file=out)
    print("child: " + " ".join(map(str, child.labels())) + f"  (length {child.length})", file=out)
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "trace": cmd_trace}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (ExperimentError, ContractViolation, ValueError, OSError) as exc:
        print(f"gxtsp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
