"""Command-line driver.

Exit codes: 0 on success, 2 when a solver stops without converging, 1 on
errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .cb_solver import solve_cb_pgo
from .errors import CycleBenchError
from .experiment import SOLVERS, ExperimentConfig, report, run_experiment
from .mcb import fundamental_cycle_basis, minimum_cycle_basis
from .pgo import load_g2o, objective, write_g2o
from .synthetic import generate_synthetic
from .vb_solver import odometry_init, solve_vb_pgo

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _threads(args):
    if args.threads is not None:
        os.environ["CYCLEBENCH_THREADS"] = str(args.threads)
        return args.threads
    env = os.environ.get("CYCLEBENCH_THREADS")
    return int(env) if env else None


def _basis(kind, topo, threads):
    if kind == "fcb":
        return fundamental_cycle_basis(topo)
    return minimum_cycle_basis(topo, threads=threads)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_solve(args):
    threads = _threads(args)
    t0 = time.perf_counter()
    g = load_g2o(args.input)
    t_parse = time.perf_counter() - t0
    info = {"input": args.input, "vertices": g.vertex_count, "edges": g.edge_count, "nu": g.cycle_rank}
    if args.solver == "vb":
        poses, st = solve_vb_pgo(g, odometry_init(g), args.max_iter, args.xi_tol)
    else:
        basis = _basis(args.basis, g.topology(), threads)
        if basis.nu != g.cycle_rank:
            raise CycleBenchError(f"basis size {basis.nu} differs from nu = {g.cycle_rank}")
        info["basis"] = args.basis
        info["basis_weight"] = basis.total_weight
        info["basis_timings"] = basis.meta.get("timings", {})
        _, poses, st = solve_cb_pgo(g, basis, None, args.max_iter, args.xi_tol, args.beta_tol)
    info.update(
        solver=args.solver,
        parse_time=t_parse,
        **{k: st[k] for k in ("converged", "iterations", "objective", "system_rows")},
        history=st["history"],
    )
    if "max_beta" in st:
        info["max_beta"] = st["max_beta"]
    if args.out:
        with open(args.out, "w") as fh:
            write_g2o(g.with_poses(poses), fh)
    if args.stats:
        _emit(info, args.stats)
    else:
        info.pop("history")
        _emit(info)
    return EXIT_OK if st["converged"] else EXIT_NOT_CONVERGED


def cmd_mcb(args):
    threads = _threads(args)
    g = load_g2o(args.input)
    topo = g.topology()
    basis = _basis(args.basis, topo, threads)
    if basis.nu != g.cycle_rank:
        raise CycleBenchError(f"basis size {basis.nu} differs from nu = {g.cycle_rank}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(basis.dumps())
    summary = {
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "nu": basis.nu,
        "cycle_ratio": basis.nu / g.edge_count if g.edge_count else 0.0,
        "kind": basis.kind,
        "total_weight": basis.total_weight,
    }
    summary.update({k: v for k, v in basis.meta.items() if k != "nu"})
    _emit(summary)
    return EXIT_OK


def cmd_generate(args):
    truth, noisy = generate_synthetic(
        args.poses, args.cycle_ratio, args.trans_std, args.rot_std, args.seed
    )
    with open(args.out, "w") as fh:
        write_g2o(noisy, fh)
    if args.truth:
        with open(args.truth, "w") as fh:
            write_g2o(truth, fh)
    _emit(
        {
            "vertices": noisy.vertex_count,
            "edges": noisy.edge_count,
            "nu": noisy.cycle_rank,
            "cycle_ratio": noisy.cycle_rank / noisy.edge_count,
            "odometry_objective": objective(noisy),
        }
    )
    return EXIT_OK


def cmd_bench(args):
    from .bench import bench_kernels

    rows = bench_kernels(args.sizes, args.repeats, args.seed, _threads(args))
    _emit(rows, args.out)
    return EXIT_OK


def cmd_montecarlo(args):
    threads = _threads(args)
    solvers = SOLVERS if args.solver == "all" else tuple(args.solver.split(","))
    for s in solvers:
        if s not in SOLVERS:
            raise CycleBenchError(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
    config = ExperimentConfig(
        solvers=solvers,
        dataset=args.dataset,
        poses=args.poses,
        cycle_ratio=args.cycle_ratio,
        trans_std=args.trans_std,
        rot_std=args.rot_std,
        trials=args.trials,
        seed=args.seed,
        max_iter=args.max_iter,
        xi_tol=args.xi_tol,
        beta_tol=args.beta_tol,
        threads=threads,
        out=args.out,
    )
    results = list(run_experiment(config))
    summary = report(results, args.out, config)
    _emit(summary["solvers"])
    return EXIT_OK


def _add_thresholds(p):
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--xi-tol", type=float, default=1e-3)
    p.add_argument("--beta-tol", type=float, default=1e-3)


def _add_threads(p):
    p.add_argument("--threads", type=int, default=None, help="worker cap (also CYCLEBENCH_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclebench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimize a g2o pose graph")
    p.add_argument("input")
    p.add_argument("--solver", choices=("cb", "vb"), default="cb")
    p.add_argument("--basis", choices=("mcb", "fcb"), default="mcb")
    p.add_argument("--out", help="write optimized poses as g2o")
    p.add_argument("--stats", help="write full JSON stats including per-iteration records")
    _add_thresholds(p)
    _add_threads(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mcb", help="cycle basis of a g2o graph topology")
    p.add_argument("input")
    p.add_argument("--basis", choices=("mcb", "fcb"), default="mcb")
    p.add_argument("--out", help="write the basis, one cycle per line")
    _add_threads(p)
    p.set_defaults(func=cmd_mcb)

    p = sub.add_parser("generate", help="write a synthetic noisy pose graph")
    p.add_argument("--poses", type=int, default=100)
    p.add_argument("--cycle-ratio", type=float, default=0.15)
    p.add_argument("--trans-std", type=float, default=0.1)
    p.add_argument("--rot-std", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="also write the ground-truth graph")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="time the LexDijkstra kernels")
    p.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write JSON results")
    _add_threads(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("montecarlo", help="seeded multi-trial solver comparison")
    p.add_argument("--solver", default="all", help="comma list of cb-mcb, cb-fcb, vb, or 'all'")
    p.add_argument("--dataset", help="g2o file instead of synthetic graphs")
    p.add_argument("--poses", type=int, default=100)
    p.add_argument("--cycle-ratio", type=float, default=0.15)
    p.add_argument("--trans-std", type=float, default=0.1)
    p.add_argument("--rot-std", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    _add_thresholds(p)
    _add_threads(p)
    p.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CycleBenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
