"""Command-line harness: solve, round, gen, verify, gap-experiment.

Exit codes: 0 success, 1 verification failure, 2 input/validation error,
3 non-convergence under --strict.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from .baselines import grid_oracle, sphere_oracle, svd_optimal
from .experiments import gap_experiment
from .generators import (
    gap_net_parameters,
    gaussian_gap_instance,
    load_graph,
    load_ulc,
    minuncut_reduce,
    ulc_parameters,
    ulc_reduce,
)
from .instance import (
    InstanceFormatError,
    InstanceValidationError,
    PointSet,
    ProblemSpec,
    load_instance,
    normalize_measures,
    save_instance,
)
from .relaxation import SolverConfig, UnsupportedExponentError, solve_relaxation
from .rounding import RoundingConfig, expected_ratio_bound, round_solution
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT = 2
EXIT_NONCONVERGED = 3


class CliInputError(Exception):
    pass


def parse_genspec(text):
    """Parse the one-liner generator spec, e.g. gap:n=100,m=50000,p=4,seed=7."""
    if ":" not in text:
        raise CliInputError(f"genspec must look like kind:key=val,... got '{text}'")
    kind, _, rest = text.partition(":")
    kv = {}
    for item in rest.split(","):
        if "=" not in item:
            raise CliInputError(f"bad genspec item '{item}'")
        key, _, val = item.partition("=")
        kv[key.strip()] = val.strip()
    try:
        if kind == "gap":
            ps, spec = gaussian_gap_instance(
                n=int(kv["n"]), m=int(kv["m"]), p=float(kv["p"]), seed=int(kv.get("seed", "0")))
        elif kind == "minuncut":
            g = load_graph(kv["graph"])
            ps, spec, thresholds = minuncut_reduce(g, p=float(kv["p"]))
            ps = PointSet(rows=ps.rows, meta={**ps.meta, "thresholds": thresholds})
        elif kind == "ulc":
            u = load_ulc(kv["file"])
            p = float(kv["p"])
            if "B" in kv:
                B = float(kv["B"])
            else:
                B = ulc_parameters(float(kv["eta"]), p).B
            ps, spec = ulc_reduce(u, p=p, B=B)
        else:
            raise CliInputError(f"unknown generator kind '{kind}'")
    except KeyError as exc:
        raise CliInputError(f"genspec '{text}' missing key {exc}") from exc
    return ps, spec, {"genspec": text}


def _load_or_generate(args):
    if getattr(args, "instance", None):
        ps, spec = load_instance(args.instance)
        descriptor = {"path": args.instance}
    elif getattr(args, "gen", None):
        ps, spec, descriptor = parse_genspec(args.gen)
    else:
        raise CliInputError("provide --instance PATH or --gen SPEC")
    if ps.row_weights is not None or ps.col_weights is not None:
        ps = normalize_measures(ps, spec)
        descriptor["normalized_measures"] = True
    return ps, spec, descriptor


def _solver_config(args):
    return SolverConfig(max_iters=args.max_iters, tol=args.tol)


def _write_report(report, out, csv_path=None):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if csv_path:
        flat = _flatten(report)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(flat.keys())
            writer.writerow(flat.values())


def _flatten(obj, prefix=""):
    flat = {}
    if isinstance(obj, dict):
        for key in sorted(obj):
            flat.update(_flatten(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            flat.update(_flatten(item, f"{prefix}{i}."))
    else:
        flat[prefix[:-1]] = obj
    return flat


def cmd_solve(args):
    ps, spec, descriptor = _load_or_generate(args)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    sol = solve_relaxation(ps, spec, cfg)
    solve_time = time.perf_counter() - t0
    report = {
        "kind": "solve",
        "version": __version__,
        "instance": {**descriptor, "m": ps.m, "n": ps.n, "k": spec.k, "p": spec.p},
        "config": {"tol": cfg.tol, "max_iters": cfg.max_iters},
        "relaxation": {"value": sol.value, "converged": sol.converged,
                       "iterations": sol.iterations},
        "timings": {"solve_s": solve_time},
    }
    _write_report(report, args.out, getattr(args, "csv", None))
    if args.dump_x:
        with open(args.dump_x, "w", encoding="utf-8") as fh:
            json.dump([[float(v) for v in row] for row in sol.X], fh)
            fh.write("\n")
    if args.strict and not sol.converged:
        print("solver did not converge within max_iters", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_round(args):
    ps, spec, descriptor = _load_or_generate(args)
    cfg = _solver_config(args)
    rcfg = RoundingConfig(runs=args.runs, seed=args.seed)
    timings = {}
    t0 = time.perf_counter()
    sol = solve_relaxation(ps, spec, cfg)
    timings["solve_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    rounded = round_solution(ps, spec, sol, rcfg)
    timings["round_s"] = time.perf_counter() - t0
    baselines = {}
    t0 = time.perf_counter()
    if spec.p == 2.0:
        baselines["svd"] = svd_optimal(ps, spec.k).optimal_value
    if spec.k == ps.n - 1 and ps.n <= 12:
        _, value = sphere_oracle(ps, spec.p, restarts=8, seed=args.seed)
        baselines["sphere"] = value
    if spec.k == ps.n - 1 and ps.n <= 3:
        bracket = grid_oracle(ps, spec.p, resolution=2e-3)
        baselines["grid_min"] = bracket.grid_min
        baselines["grid_lower_bound"] = bracket.lower_bound
    timings["baselines_s"] = time.perf_counter() - t0
    ratio = rounded.value / sol.value if sol.value > 0 else 1.0
    report = {
        "kind": "round",
        "version": __version__,
        "instance": {**descriptor, "m": ps.m, "n": ps.n, "k": spec.k, "p": spec.p},
        "config": {"tol": cfg.tol, "max_iters": cfg.max_iters,
                   "runs": rcfg.runs, "seed": rcfg.seed},
        "relaxation": {"value": sol.value, "converged": sol.converged,
                       "iterations": sol.iterations},
        "rounding": {"value": rounded.value, "runs": rcfg.runs,
                     "best_run": rounded.run_index},
        "baselines": baselines,
        "ratio": ratio,
        "ratio_bound": expected_ratio_bound(ps.n, spec.k, spec.p),
        "timings": timings,
    }
    _write_report(report, args.out, getattr(args, "csv", None))
    if args.strict and not sol.converged:
        print("solver did not converge within max_iters", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_gen(args):
    if args.generator == "gap":
        ps, spec = gaussian_gap_instance(n=args.n, m=args.m, p=args.p, seed=args.seed)
        if args.eta is not None:
            net = gap_net_parameters(args.n, args.p, args.eta)
            ps = PointSet(rows=ps.rows, meta={
                **ps.meta,
                "net_parameters": {"eta": args.eta, "epsilon": net.epsilon,
                                   "delta": net.delta, "m_min": net.m_min},
            })
    elif args.generator == "minuncut":
        g = load_graph(args.graph)
        ps, spec, thresholds = minuncut_reduce(g, p=args.p)
        ps = PointSet(rows=ps.rows, meta={**ps.meta, "thresholds": thresholds})
    elif args.generator == "ulc":
        u = load_ulc(args.ulc)
        if args.B is not None:
            B = args.B
            params_meta = {"B": B}
        else:
            if args.eta is None:
                raise CliInputError("ulc generation needs --eta or --B")
            params = ulc_parameters(args.eta, args.p)
            B = params.B
            params_meta = {"eta": params.eta, "tau": params.tau, "beta": params.beta,
                           "delta": params.delta, "B": params.B, "epsilon": params.epsilon}
        ps, spec = ulc_reduce(u, p=args.p, B=B)
        ps = PointSet(rows=ps.rows, meta={**ps.meta, "schedule": params_meta})
    else:
        raise CliInputError(f"unknown generator '{args.generator}'")
    save_instance(ps, spec, args.out)
    print(f"wrote {args.out} ({ps.m} x {ps.n}, k={spec.k}, p={spec.p})")
    return EXIT_OK


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names)
    failed = False
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"[{status}] {res.name}: {res.passed}/{res.total}")
        for msg in res.failures[:10]:
            print(f"    {msg}")
        failed = failed or not res.ok
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


def cmd_gap_experiment(args):
    seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    t0 = time.perf_counter()
    results = gap_experiment(
        n=args.n, m=args.m, p=args.p, seeds=seeds,
        directions=args.directions, refine_iters=args.refine_iters,
        run_solver=args.solve, solver_cfg=_solver_config(args))
    report = {
        "kind": "gap-experiment",
        "version": __version__,
        "config": {"n": args.n, "m": args.m, "p": args.p, "seeds": seeds,
                   "directions": args.directions, "refine_iters": args.refine_iters,
                   "solver": args.solve},
        "results": results,
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    return EXIT_OK


def _add_instance_args(sub):
    sub.add_argument("--instance", help="instance JSON path")
    sub.add_argument("--gen", help="generator spec, e.g. gap:n=100,m=50000,p=4,seed=7")
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--max-iters", type=int, default=2000)
    sub.add_argument("--strict", action="store_true",
                     help="exit 3 when the solver does not converge")
    sub.add_argument("--out", help="report output path (default: stdout)")
    sub.add_argument("--csv", help="also write a flattened one-row CSV")


def build_parser():
    parser = argparse.ArgumentParser(prog="subspace-approx")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("solve", help="solve the convex relaxation")
    _add_instance_args(sub)
    sub.add_argument("--dump-x", help="write the solution matrix X as JSON")
    sub.set_defaults(func=cmd_solve)

    sub = subs.add_parser("round", help="solve, round, and compare against baselines")
    _add_instance_args(sub)
    sub.add_argument("--runs", type=int, default=32)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_round)

    sub = subs.add_parser("gen", help="generate a paper-family instance")
    gen_subs = sub.add_subparsers(dest="generator", required=True)
    g = gen_subs.add_parser("gap")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eta", type=float, help="also record the net parameter schedule")
    g.add_argument("--out", required=True)
    g = gen_subs.add_parser("minuncut")
    g.add_argument("--graph", required=True, help="graph JSON path")
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--out", required=True)
    g = gen_subs.add_parser("ulc")
    g.add_argument("--ulc", required=True, help="label-cover JSON path")
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--eta", type=float)
    g.add_argument("--B", type=float)
    g.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_gen)

    sub = subs.add_parser("verify", help="run the executable property suites")
    sub.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("gap-experiment", help="empirical rank-gap experiment")
    sub.add_argument("--n", type=int, default=100)
    sub.add_argument("--m", type=int, default=50_000)
    sub.add_argument("--p", type=float, default=4.0)
    sub.add_argument("--seeds", default="0,1,2", help="comma-separated seed list")
    sub.add_argument("--directions", type=int, default=1000)
    sub.add_argument("--refine-iters", type=int, default=25)
    sub.add_argument("--solve", action="store_true",
                     help="also run the relaxation solver (slow at full scale)")
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--max-iters", type=int, default=2000)
    sub.add_argument("--out", help="report output path (default: stdout)")
    sub.set_defaults(func=cmd_gap_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, InstanceFormatError, InstanceValidationError,
            UnsupportedExponentError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
