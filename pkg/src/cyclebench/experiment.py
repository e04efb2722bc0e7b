"""Monte-Carlo experiment driver and report writers.

Every trial draws its graph and noise from ``np.random.default_rng([seed,
trial])`` so trials are reproducible independently of each other.  The
reference objective ``f*`` is the Gauss-Newton optimum started from ground
truth (or from the file's vertex estimates for datasets without ground
truth).  A run counts as a success when ``|f / f* - 1| < 0.01``.

``trials.csv`` holds only deterministic columns; wall-clock timings go to
``timings.csv`` so that repeated runs with one seed produce identical
``trials.csv`` files.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .cb_solver import solve_cb_pgo
from .errors import CycleBenchError
from .mcb import fundamental_cycle_basis, minimum_cycle_basis
from .pgo import load_g2o
from .synthetic import generate_synthetic
from .vb_solver import odometry_init, solve_vb_pgo

SOLVERS = ("cb-mcb", "cb-fcb", "vb")
SUCCESS_TOL = 0.01
ZERO_OBJECTIVE = 1e-9

TRIAL_FIELDS = [
    "trial",
    "solver",
    "vertices",
    "edges",
    "nu",
    "cycle_ratio",
    "basis_weight",
    "iterations",
    "converged",
    "objective",
    "reference",
    "success",
    "max_beta",
    "system_rows",
    "error",
]
TIMING_FIELDS = [
    "trial",
    "solver",
    "generate",
    "parse",
    "reference",
    "smoothing",
    "apsp",
    "isometric",
    "independence",
    "basis",
    "linearize",
    "cholesky",
    "update",
    "solve",
    "total",
]


@dataclass
class ExperimentConfig:
    solvers: tuple = ("cb-mcb",)
    dataset: str | None = None
    poses: int = 100
    cycle_ratio: float = 0.15
    trans_std: float = 0.1
    rot_std: float = 0.05
    trials: int = 1
    seed: int = 0
    max_iter: int = 50
    xi_tol: float = 1e-3
    beta_tol: float = 1e-3
    threads: int | None = None
    out: str | None = None
    extra: dict = field(default_factory=dict)


def is_success(f: float, f_ref: float) -> bool:
    """``|f / f* - 1| < 0.01``, with an absolute test when ``f*`` is ~0."""
    if not (math.isfinite(f) and math.isfinite(f_ref)):
        return False
    if abs(f_ref) <= ZERO_OBJECTIVE:
        return abs(f) <= ZERO_OBJECTIVE
    return abs(f / f_ref - 1.0) < SUCCESS_TOL


def _basis(kind, topo, threads):
    if kind == "cb-mcb":
        return minimum_cycle_basis(topo, threads=threads)
    return fundamental_cycle_basis(topo)


def run_solver(solver, graph, config, threads=None):
    """Run one solver; returns ``(row, timings)`` dicts without trial fields."""
    clock = time.perf_counter
    row = {"solver": solver}
    timings = {"solver": solver}
    t0 = clock()
    try:
        if solver == "vb":
            poses, st = solve_vb_pgo(graph, odometry_init(graph), config.max_iter, config.xi_tol)
            row.update(basis_weight="", max_beta="")
        elif solver in ("cb-mcb", "cb-fcb"):
            topo = graph.topology()
            tb = clock()
            basis = _basis(solver, topo, threads)
            timings["basis"] = clock() - tb
            for key, value in basis.meta.get("timings", {}).items():
                timings[key] = value
            if basis.nu != graph.cycle_rank:
                raise CycleBenchError(
                    f"basis has {basis.nu} cycles but the graph has nu = {graph.cycle_rank}"
                )
            _, poses, st = solve_cb_pgo(
                graph, basis, None, config.max_iter, config.xi_tol, config.beta_tol
            )
            row.update(basis_weight=basis.total_weight, max_beta=st["max_beta"])
        else:
            raise ValueError(f"unknown solver {solver!r}")
        row.update(
            iterations=st["iterations"],
            converged=st["converged"],
            objective=st["objective"],
            system_rows=st["system_rows"],
            error="",
        )
        hist = st["history"]
        timings.update(
            linearize=sum(h["linearize_time"] for h in hist),
            cholesky=sum(h["solve_time"] for h in hist),
            update=sum(h["update_time"] for h in hist),
        )
    except CycleBenchError as exc:
        row.update(
            iterations="",
            converged=False,
            objective=float("nan"),
            system_rows="",
            basis_weight=row.get("basis_weight", ""),
            max_beta=row.get("max_beta", ""),
            error=f"{type(exc).__name__}: {exc}",
        )
    timings["solve"] = clock() - t0
    return row, timings


def _load_trial(config, trial):
    clock = time.perf_counter
    timings = {}
    if config.dataset:
        t0 = clock()
        graph = load_g2o(config.dataset)
        timings["parse"] = clock() - t0
        reference_init = graph.poses
    else:
        t0 = clock()
        rng = np.random.default_rng([config.seed, trial])
        truth, graph = generate_synthetic(
            config.poses, config.cycle_ratio, config.trans_std, config.rot_std, rng
        )
        timings["generate"] = clock() - t0
        reference_init = truth.poses
    t0 = clock()
    try:
        _, ref = solve_vb_pgo(graph, reference_init, config.max_iter, config.xi_tol)
        f_ref = ref["objective"]
    except CycleBenchError:
        f_ref = float("nan")
    timings["reference"] = clock() - t0
    return graph, f_ref, timings


def run_experiment(config: ExperimentConfig):
    """Yield one ``(row, timings)`` pair per trial and solver."""
    for trial in range(config.trials):
        t_trial = time.perf_counter()
        graph, f_ref, base_timings = _load_trial(config, trial)
        n, m = graph.vertex_count, graph.edge_count
        nu = graph.cycle_rank
        for solver in config.solvers:
            row, timings = run_solver(solver, graph, config, config.threads)
            row.update(
                trial=trial,
                vertices=n,
                edges=m,
                nu=nu,
                cycle_ratio=nu / m if m else 0.0,
                reference=f_ref,
                success=is_success(row["objective"], f_ref),
            )
            timings.update(base_timings, trial=trial)
            timings["total"] = time.perf_counter() - t_trial
            yield row, timings


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return value


def summarize(rows) -> dict:
    out = {}
    for solver in dict.fromkeys(r["solver"] for r in rows):
        sel = [r for r in rows if r["solver"] == solver]
        iters = [r["iterations"] for r in sel if r["iterations"] != ""]
        out[solver] = {
            "trials": len(sel),
            "successes": sum(bool(r["success"]) for r in sel),
            "success_rate": sum(bool(r["success"]) for r in sel) / len(sel),
            "converged": sum(bool(r["converged"]) for r in sel),
            "errors": sum(bool(r["error"]) for r in sel),
            "mean_iterations": float(np.mean(iters)) if iters else None,
        }
    return out


def report(results, out_dir, config: ExperimentConfig | None = None) -> dict:
    """Write ``trials.csv``, ``timings.csv`` and ``summary.json`` to ``out_dir``."""
    rows = [r for r, _ in results]
    timings = [t for _, t in results]
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "trials.csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRIAL_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in TRIAL_FIELDS})
    with open(os.path.join(out_dir, "timings.csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TIMING_FIELDS, lineterminator="\n")
        w.writeheader()
        for t in timings:
            w.writerow({k: _fmt(t.get(k, "")) for k in TIMING_FIELDS})
    summary = {
        "config": asdict(config) if config is not None else None,
        "solvers": summarize(rows) if rows else {},
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return summary
