"""Command-line entry point and benchmark harness."""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bnb, heuristics, model as model_mod, preprocess, priority
from .instance import (GENERATORS, Instance, InstanceFormatError,
                       read_instance, write_instance)
from .network import build_network

EXIT_OK = 0
EXIT_INPUT = 2


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT


def _load(path: str) -> Instance:
    try:
        return read_instance(path)
    except FileNotFoundError:
        raise InstanceFormatError(f"no such file: {path}")


def _build_model(inst: Instance, kind: str, reduce: bool = True):
    net = build_network(inst)
    if reduce:
        net, _ = preprocess.minimize(net)
    if kind == "cs1":
        return model_mod.build_cs1(net)
    return model_mod.build_cs2(net, priority.forest_constraints(inst))


def cmd_generate(args) -> int:
    if args.group not in GENERATORS:
        return _fail(f"unknown group: {args.group}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        inst = GENERATORS[args.group](args.n, seed)
        path = out / f"{args.group}-n{args.n}-s{seed}.txt"
        write_instance(inst, path, seed=seed, group=args.group)
        print(path)
    return EXIT_OK


def _instance_set(path: str) -> str:
    stem = Path(path).stem
    head, sep, tail = stem.rpartition("-s")
    return head if sep and tail.isdigit() else stem


def _solve_one(path: str, opts: dict) -> dict:
    inst = _load(path)
    report = {
        "instance": str(path),
        "method": opts["method"],
        "model": opts["model"],
        "n": inst.n,
        "value": 0,
        "ub": None,
        "gap_pct": None,
        "iterations": 0,
        "improvements": None,
        "construction_value": None,
        "elapsed_s": 0.0,
        "status": "optimal",
        "seed": opts["seed"],
    }
    if inst.n == 0:
        return report
    model = _build_model(inst, opts["model"])
    if opts["method"] == "bb":
        res = bnb.solve_exact(model, time_limit=opts["time_limit"])
        report.update(value=res.value, ub=res.upper_bound,
                      gap_pct=res.gap_pct, iterations=res.nodes,
                      elapsed_s=res.elapsed_s, status=res.status)
    else:
        rng = random.Random(opts["seed"])
        if opts["method"] == "grasp":
            res = heuristics.grasp(model, alpha=opts["alpha"],
                                   time_limit=opts["time_limit"], rng=rng)
        elif opts["method"] == "vns":
            res = heuristics.vns(model, time_limit=opts["time_limit"], rng=rng)
        else:
            res = heuristics.tabu_search(model, tenure=opts["tenure"],
                                         time_limit=opts["time_limit"], rng=rng)
        report.update(value=res.value, iterations=res.iterations,
                      improvements=res.improvements,
                      construction_value=res.construction_value,
                      elapsed_s=res.elapsed_s,
                      status="time-limit" if res.interrupted else "completed")
    return report


def _mean_sd(values) -> tuple[float, float]:
    vals = list(values)
    if not vals:
        return 0.0, 0.0
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    return mean, math.sqrt(var)


def _write_csv(path: str, reports: list[dict]) -> None:
    groups: dict[str, list[dict]] = {}
    for rep in reports:
        groups.setdefault(_instance_set(rep["instance"]), []).append(rep)
    lines = ["set,count,opt,avg_value,sd_value,avg_gap_pct,sd_gap_pct,avg_iterations"]
    for name in sorted(groups):
        reps = groups[name]
        n_opt = sum(1 for r in reps if r["status"] == "optimal")
        mv, sv = _mean_sd(r["value"] for r in reps)
        gaps = [r["gap_pct"] for r in reps if r["gap_pct"] is not None]
        mg, sg = _mean_sd(gaps)
        mi, _ = _mean_sd(r["iterations"] for r in reps)
        lines.append(f"{name},{len(reps)},{n_opt},{mv:.2f},{sv:.2f},"
                     f"{mg:.3f},{sg:.3f},{mi:.1f}")
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_solve(args) -> int:
    opts = {
        "method": args.method,
        "model": args.model,
        "time_limit": args.time_limit,
        "alpha": args.alpha,
        "tenure": args.tenure,
        "seed": args.seed,
    }
    reports = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_solve_one, p, opts) for p in args.instances]
            reports = [f.result() for f in futures]
    else:
        reports = [_solve_one(p, opts) for p in args.instances]
    for rep in reports:
        print(json.dumps(rep, sort_keys=True))
    if args.csv:
        _write_csv(args.csv, reports)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    print("instance,vertices_before,arcs_before,vertices_after,arcs_after,operations")
    for path in args.instances:
        inst = _load(path)
        net = build_network(inst)
        reduced, trace = preprocess.minimize(net)
        print(f"{path},{net.n_vertices},{net.n_arcs},"
              f"{reduced.n_vertices},{reduced.n_arcs},{len(trace.operations)}")
    return EXIT_OK


def cmd_export(args) -> int:
    for path in args.instances:
        inst = _load(path)
        model = _build_model(inst, args.model, reduce=not args.raw)
        target = Path(args.out) if args.out and len(args.instances) == 1 \
            else Path(path).with_suffix(f".{args.format}")
        model_mod.export(model, args.format, target)
        print(target)
    return EXIT_OK


def cmd_priority_stats(args) -> int:
    print("instance,raw_pairs,reduced_arcs,forest_arcs")
    totals = [0, 0, 0]
    for path in args.instances:
        stats = priority.priority_stats(_load(path))
        row = (stats["raw_pairs"], stats["reduced_arcs"], stats["forest_arcs"])
        totals = [t + v for t, v in zip(totals, row)]
        print(f"{path},{row[0]},{row[1]},{row[2]}")
    if args.instances:
        k = len(args.instances)
        print(f"average,{totals[0] / k:.2f},{totals[1] / k:.2f},{totals[2] / k:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carshare",
        description="Solvers and benchmark tooling for two-station "
                    "car-sharing customer satisfaction.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write benchmark instance files")
    gen.add_argument("--group", required=True, choices=sorted(GENERATORS))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", default=".")
    gen.set_defaults(func=cmd_generate)

    solve = sub.add_parser("solve", help="solve instance files")
    solve.add_argument("--method", default="bb",
                       choices=["bb", "grasp", "vns", "ts"])
    solve.add_argument("--model", default="cs2", choices=["cs1", "cs2"])
    solve.add_argument("--time-limit", type=float, default=600.0)
    solve.add_argument("--alpha", type=float, default=heuristics.DEFAULT_ALPHA)
    solve.add_argument("--tenure", type=float, default=heuristics.DEFAULT_TENURE)
    solve.add_argument("--seed", type=int, default=1)
    solve.add_argument("--jobs", type=int, default=1)
    solve.add_argument("--csv", help="write an aggregate CSV to this path")
    solve.add_argument("instances", nargs="+")
    solve.set_defaults(func=cmd_solve)

    prep = sub.add_parser("preprocess", help="report network reduction sizes")
    prep.add_argument("instances", nargs="+")
    prep.set_defaults(func=cmd_preprocess)

    exp = sub.add_parser("export", help="write the MIP model to a file")
    exp.add_argument("--format", default="mps", choices=["mps", "lp"])
    exp.add_argument("--model", default="cs2", choices=["cs1", "cs2"])
    exp.add_argument("--raw", action="store_true",
                     help="skip network reduction before building the model")
    exp.add_argument("--out", help="output path (single input only)")
    exp.add_argument("instances", nargs="+")
    exp.set_defaults(func=cmd_export)

    stats = sub.add_parser("priority-stats",
                           help="dominance and precedence statistics")
    stats.add_argument("instances", nargs="+")
    stats.set_defaults(func=cmd_priority_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceFormatError as exc:
        return _fail(str(exc))
    except (OSError, ValueError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
