"""Vertex-based Gauss-Newton pose graph optimization.

Pose 0 is held fixed; the remaining poses are updated as
``T_i <- T_i Exp(delta_i)`` from the normal equations of the residuals
``r_k = Log(Tm_k^-1 T_i^-1 T_j)``.
"""
from __future__ import annotations

import time

import numpy as np

from . import liegroup as lg
from .pgo import PoseGraph, objective, poses_from_relative, spanning_tree
from .sparse_chol import solve_spd

MAX_ITER = 50
XI_TOL = 1e-3


def edge_jacobians(m, poses):
    """Residual of one measurement and its Jacobians w.r.t. ``delta_i``, ``delta_j``."""
    Tij = poses[m.source].inverse() @ poses[m.target]
    r = lg.log(m.transform.inverse() @ Tij)
    Aj = lg.jr_inv(r)
    Ai = -Aj @ lg.adjoint(Tij.inverse())
    return r, Ai, Aj


def normal_equations(g: PoseGraph, poses):
    """Gauss-Newton blocks over poses ``1..n-1``.

    Returns ``(blocks, gradient, cost)`` where ``blocks`` holds the lower
    triangle of ``H = sum A^T Lambda A`` keyed by ``(i - 1, j - 1)`` and
    ``gradient = sum A^T Lambda r`` has shape ``(n - 1, 6)``.
    """
    n = g.vertex_count
    blocks = {(i, i): np.zeros((6, 6)) for i in range(n - 1)}
    grad = np.zeros((max(n - 1, 0), 6))
    cost = 0.0
    for m in g.measurements:
        r, Ai, Aj = edge_jacobians(m, poses)
        L = m.information
        cost += float(r @ L @ r)
        terms = {}
        for v, A in ((m.source, Ai), (m.target, Aj)):
            if v != 0:
                terms[v - 1] = terms[v - 1] + A if v - 1 in terms else A
        for a, Aa in terms.items():
            LA = L @ Aa
            grad[a] += Aa.T @ (L @ r)
            for b, Ab in terms.items():
                if a >= b:
                    key = (a, b)
                    blocks[key] = blocks[key] + LA.T @ Ab if key in blocks else LA.T @ Ab
    # blocks[(a, b)] = Aa^T L Ab with a >= b is the lower triangle of H
    return blocks, grad, cost


def odometry_init(g: PoseGraph):
    """Compose measurements along edges ``0..n-2`` (or any spanning tree)."""
    n = g.vertex_count
    tree = spanning_tree(g, preferred=range(min(n - 1, g.edge_count)))
    return poses_from_relative(g, [m.transform for m in g.measurements], tree)


def solve_vb_pgo(g: PoseGraph, init=None, max_iter: int = MAX_ITER, xi_tol: float = XI_TOL):
    """Undamped Gauss-Newton from ``init`` (odometry composition by default).

    Returns ``(poses, stats)``; ``stats`` mirrors :func:`solve_cb_pgo`.
    """
    clock = time.perf_counter
    t_start = clock()
    poses = list(init) if init is not None else odometry_init(g)
    n = g.vertex_count
    history = []
    converged = False
    increases = 0
    prev_cost = None
    it = 0
    for it in range(1, max_iter + 1):
        if n <= 1:
            converged = True
            break
        t0 = clock()
        blocks, grad, cost = normal_equations(g, poses)
        t1 = clock()
        delta, st = solve_spd(blocks, n - 1, -grad.reshape(-1))
        delta = delta.reshape(-1, 6)
        t2 = clock()
        poses = [poses[0]] + [T @ lg.exp(d) for T, d in zip(poses[1:], delta)]
        t3 = clock()
        if prev_cost is not None and cost > prev_cost:
            increases += 1
        prev_cost = cost
        step = float(np.linalg.norm(delta, axis=1).max())
        history.append(
            {
                "iteration": it,
                "objective": cost,
                "xi_norm": step,
                "damped": st["damped"],
                "nnz_blocks": st["nnz_blocks"],
                "linearize_time": t1 - t0,
                "solve_time": t2 - t1,
                "update_time": t3 - t2,
                "time": clock() - t0,
            }
        )
        if step < xi_tol:
            converged = True
            break
    stats = {
        "solver": "vb",
        "converged": converged,
        "iterations": it,
        "objective": objective(g, poses),
        "system_rows": 6 * (n - 1),
        "objective_increases": increases,
        "history": history,
        "total_time": clock() - t_start,
    }
    return poses, stats
