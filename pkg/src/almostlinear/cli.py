"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 runtime error (I/O, parsing, size).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace

from .bench import BENCH_COLUMNS, FULL_GRID, TRACE_COLUMNS, Grid, bench_scaling, trace
from .dynamics import DynParams
from .graph import ErdosRenyiSpec, GraphFormatError, gen_er, read_gset
from .kernels import Kernel
from .localsearch import SearchMode
from .oracle import InstanceTooLarge, brute_force_maxcut
from .solver import PRESETS, parse_rounding, preset, solve

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _er_arg(text: str):
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected N:P or N:P:SEED, got {text!r}")
    try:
        n, p = int(parts[0]), float(parts[1])
        seed = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N:P or N:P:SEED, got {text!r}") from None
    return n, p, seed


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gset", metavar="PATH", help="graph in GSet text format")
    src.add_argument("--er", type=_er_arg, metavar="N:P[:SEED]",
                     help="Erdos-Renyi graph (graph seed defaults to --seed)")


def _add_dyn_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int)
    p.add_argument("--dt-coef", type=float, help="time step is DT_COEF / N")
    p.add_argument("--ks", type=float, help="anisotropy strength")
    p.add_argument("--kernel", choices=("tri", "triangular", "xy"))
    p.add_argument("--seed", type=int, default=0)


def _add_schedule_args(p: argparse.ArgumentParser) -> None:
    _add_dyn_args(p)
    p.add_argument("--preset", choices=sorted(PRESETS), default="quality")
    p.add_argument("--reps", type=int)
    p.add_argument("--rounding", help="optimal | random:NR")
    p.add_argument("--post", help="none | nmr | nmr+emr")
    p.add_argument("--restart", choices=("fresh_random", "perturb_best"))
    p.add_argument("--noise-amp", type=float)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="almostlinear", description="Almost-linear dynamical Ising machine for max-cut.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one instance, one JSON object per run plus a summary")
    _add_graph_args(p)
    _add_schedule_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("bench-scaling", help="timing study over an Erdos-Renyi ensemble (CSV)")
    _add_schedule_args(p)
    p.set_defaults(preset="scaling")
    p.add_argument("--n", type=_int_list, help="node counts, e.g. 200,400")
    p.add_argument("--p", type=_float_list, help="edge probabilities, e.g. 0.05,0.1")
    p.add_argument("--replicas", type=int)
    p.add_argument("--modes", default="nmr,nmr+emr", help="post-processing modes to compare")
    p.add_argument("--full", action="store_true", help="use the full N<=4000 grid")

    p = sub.add_parser("oracle", help="exact max cut by enumeration (n <= 24)")
    _add_graph_args(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trace", help="snapshot energy and rounded cuts along free evolution (CSV)")
    _add_graph_args(p)
    _add_dyn_args(p)
    p.add_argument("--every", type=int, default=10, help="snapshot interval in steps")
    p.add_argument("--starts", type=int, default=1, help="number of random initial states")
    p.add_argument("--nr", type=int, default=32, help="centers for the random-rounding column")
    return parser


def _load_graph(args):
    if args.gset:
        return read_gset(args.gset), args.gset
    n, p, gseed = args.er
    gseed = args.seed if gseed is None else gseed
    try:
        spec = ErdosRenyiSpec(n, p, gseed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return gen_er(spec), f"er:{n}:{p}:{gseed}"


def _schedule(args):
    over = {"seed": args.seed}
    for attr, key in (("steps", "steps"), ("dt_coef", "dt_coef"), ("ks", "Ks"), ("reps", "repetitions"),
                      ("rounding", "rounding"), ("post", "post"), ("restart", "restart"),
                      ("noise_amp", "noise_amp"), ("kernel", "kernel")):
        val = getattr(args, attr, None)
        if val is not None:
            over[key] = val
    try:
        return preset(args.preset, **over)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=False, separators=(", ", ": "))


def cmd_solve(args, out) -> int:
    sch = _schedule(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    g, name = _load_graph(args)
    t0 = time.perf_counter()
    res = solve(g, sch, workers=args.workers)
    wall = time.perf_counter() - t0
    runs = [r.to_dict() for r in res.records]
    summary = {
        "type": "summary", "graph": name, "N": g.n, "M": g.m, "best_C_F": res.best_cut,
        "total_wall_s": wall, "schedule": sch.to_dict(), "seed": sch.seed,
    }
    if args.format == "json":
        for r in runs:
            out.write(_json({"type": "run", **r}) + "\n")
        out.write(_json(summary) + "\n")
    else:
        w = csv.DictWriter(out, fieldnames=list(runs[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(runs)
        sys.stderr.write(_json(summary) + "\n")
    return 0


def cmd_bench_scaling(args, out) -> int:
    sch = _schedule(args)
    try:
        modes = tuple(SearchMode.parse(m) for m in args.modes.split(",") if m)
        if args.full:
            grid = replace(FULL_GRID, modes=modes)
        else:
            base = Grid()
            grid = Grid(args.n or base.ns, args.p or base.ps,
                        base.replicas if args.replicas is None else args.replicas, modes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in bench_scaling(grid, sch, seed=args.seed, workers=args.workers):
        w.writerow(row)
        out.flush()
    return 0


def cmd_oracle(args, out) -> int:
    g, name = _load_graph(args)
    best, config = brute_force_maxcut(g)
    out.write(_json({"graph": name, "N": g.n, "M": g.m, "max_cut": best, "config": config.tolist()}) + "\n")
    return 0


def cmd_trace(args, out) -> int:
    g, _ = _load_graph(args)
    try:
        params = DynParams(
            Ks=1.0 if args.ks is None else args.ks,
            dt=(140.0 if args.dt_coef is None else args.dt_coef) / g.n,
            steps=250 if args.steps is None else args.steps,
            kernel=Kernel(args.kernel or "triangular"),
        )
        rows = trace(g, params, args.every, starts=args.starts, n_rounds=args.nr, seed=args.seed)
        w = csv.DictWriter(out, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        w.writeheader()
        first = next(rows)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    w.writerow(first)
    w.writerows(rows)
    return 0


COMMANDS = {"solve": cmd_solve, "bench-scaling": cmd_bench_scaling, "oracle": cmd_oracle, "trace": cmd_trace}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"almostlinear {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError, InstanceTooLarge) as exc:
        print(f"almostlinear {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
