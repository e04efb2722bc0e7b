"""Cycle-based pose graph optimization over relative poses.

The decision variables are the relative poses ``T^_k``, one per measurement.
Each basis cycle constrains the product of the signed relative poses around
it to be the identity.  Every iteration linearizes the cost

    sum_k ||Log(Tm_k^-1 T^_k)||^2_Sigma_k

and the cycle constraints at the current estimate and solves the resulting
equality-constrained quadratic as a minimum-norm problem of dimension
``6 * nu``.  Steps are applied as ``T^_k <- T^_k Exp(xi_k)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import liegroup as lg
from .errors import NonSimpleCycle
from .liegroup import Transform
from .pgo import PoseGraph, objective, poses_from_relative
from .sparse_chol import solve_spd

MAX_ITER = 50
XI_TOL = 1e-3
BETA_TOL = 1e-3
RESIDUAL_TOL = 1e-9
_I6 = np.eye(6)


@dataclass(frozen=True)
class OrientedCycle:
    """Closed walk ``((edge, sigma), ...)`` starting at ``start``.

    ``sigma`` is +1 when the edge is walked from its source to its target.
    """

    start: int
    steps: tuple

    @property
    def edges(self) -> tuple:
        return tuple(sorted(k for k, _ in self.steps))

    def __len__(self):
        return len(self.steps)

    def reversed(self) -> "OrientedCycle":
        return OrientedCycle(self.start, tuple((k, -s) for k, s in reversed(self.steps)))


def orient_cycle(cycle, g: PoseGraph) -> OrientedCycle:
    """Walk one circuit from its lowest vertex along its lowest incident edge."""
    cycle = tuple(sorted(set(cycle)))
    if not cycle:
        raise NonSimpleCycle("empty cycle")
    ms = g.measurements
    incident = {}
    for k in cycle:
        m = ms[k]
        incident.setdefault(m.source, []).append(k)
        incident.setdefault(m.target, []).append(k)
    if any(len(v) != 2 for v in incident.values()):
        raise NonSimpleCycle(f"cycle {cycle} has a vertex of degree != 2")
    start = min(incident)
    x = start
    k = min(incident[start])
    steps = []
    used = set()
    while True:
        m = ms[k]
        used.add(k)
        if m.source == x:
            steps.append((k, 1))
            x = m.target
        else:
            steps.append((k, -1))
            x = m.source
        if x == start:
            break
        a, b = incident[x]
        k = b if a == k else a
    if len(used) != len(cycle):
        raise NonSimpleCycle(f"cycle {cycle} is not a single circuit")
    return OrientedCycle(start, tuple(steps))


def build_oriented_cycles(basis, g: PoseGraph) -> list:
    cycles = basis.cycles if hasattr(basis, "cycles") else basis
    return [orient_cycle(c, g) for c in cycles]


def cycle_product(cycle: OrientedCycle, rel) -> Transform:
    """Composed geometric cycle; the identity when ``rel`` is consistent."""
    P = Transform()
    for k, s in cycle.steps:
        P = P @ (rel[k] if s > 0 else rel[k].inverse())
    return P


def cycle_residual(cycle: OrientedCycle, rel) -> np.ndarray:
    return lg.log(cycle_product(cycle, rel))


def linearize_cost(g: PoseGraph, rel):
    """Per-edge ``Jr(eta_k)`` blocks, residuals ``eta_k`` and covariance roots.

    The cost model is ``||eta + J^-1 xi||^2_Sigma``.  ``Sigma^(1/2)`` is
    returned as ``U^-T`` where ``U U^T`` is the Cholesky factor of the
    information matrix.
    """
    m = g.edge_count
    J = np.empty((m, 6, 6))
    eta = np.empty((m, 6))
    S = np.empty((m, 6, 6))
    for k, meas in enumerate(g.measurements):
        e = lg.log(meas.transform.inverse() @ rel[k])
        eta[k] = e
        J[k] = lg.jr(e)
        U = np.linalg.cholesky(meas.information)
        S[k] = solve_triangular(U, _I6, lower=True).T
    return J, eta, S


def linearize_cycle(cycle: OrientedCycle, rel):
    """Constraint row of one cycle.

    Returns ``(blocks, b, beta)``: ``blocks[h]`` is the 6x6 coefficient of
    ``xi`` for the ``h``-th step, so that the cycle residual after the update
    is ``Log(Exp(sum_h blocks[h] xi_h) C) ~ beta + Jl^-1(beta) sum_h blocks[h] xi_h``,
    and ``b = Jl(beta) beta``.  The linearized constraint reads
    ``sum_h blocks[h] xi_h = -b``.
    """
    P = Transform()
    blocks = []
    for k, s in cycle.steps:
        if s > 0:
            P = P @ rel[k]
            blocks.append(lg.adjoint(P))
        else:
            blocks.append(-lg.adjoint(P))
            P = P @ rel[k].inverse()
    beta = lg.log(P)
    return blocks, lg.jl(beta) @ beta, beta


@dataclass
class LinearizedSystem:
    """Whitened constraint system ``Bbar xibar = bbar`` of one SQP step.

    ``rows[i]`` lists ``(edge, block)`` pairs of cycle ``i``; the block
    pattern equals the cycle matrix of the basis.
    """

    edge_count: int
    rows: list
    bbar: np.ndarray
    J: np.ndarray
    eta: np.ndarray
    S: np.ndarray
    beta: np.ndarray
    stats: dict = field(default_factory=dict)

    @property
    def shape(self):
        return (6 * len(self.rows), 6 * self.edge_count)

    def pattern(self) -> np.ndarray:
        P = np.zeros((len(self.rows), self.edge_count), dtype=bool)
        for i, row in enumerate(self.rows):
            for k, _ in row:
                P[i, k] = True
        return P

    def dense(self) -> np.ndarray:
        B = np.zeros(self.shape)
        for i, row in enumerate(self.rows):
            for k, blk in row:
                B[6 * i:6 * i + 6, 6 * k:6 * k + 6] += blk
        return B

    def apply(self, xibar) -> np.ndarray:
        """``Bbar @ xibar`` without forming the dense matrix."""
        xb = np.asarray(xibar).reshape(-1, 6)
        out = np.zeros((len(self.rows), 6))
        for i, row in enumerate(self.rows):
            for k, blk in row:
                out[i] += blk @ xb[k]
        return out.reshape(-1)

    def apply_transpose(self, y) -> np.ndarray:
        yb = np.asarray(y).reshape(-1, 6)
        out = np.zeros((self.edge_count, 6))
        for i, row in enumerate(self.rows):
            for k, blk in row:
                out[k] += blk.T @ yb[i]
        return out.reshape(-1)


def linearize(g: PoseGraph, cycles, rel) -> LinearizedSystem:
    J, eta, S = linearize_cost(g, rel)
    JS = J @ S
    Jeta = np.einsum("kab,kb->ka", J, eta)
    rows = []
    bbar = np.empty(6 * len(cycles))
    beta = np.empty((len(cycles), 6))
    for i, cyc in enumerate(cycles):
        blocks, b, bt = linearize_cycle(cyc, rel)
        beta[i] = bt
        row = []
        acc = -b
        for (k, _), B in zip(cyc.steps, blocks):
            row.append((k, B @ JS[k]))
            acc = acc + B @ Jeta[k]
        rows.append(row)
        bbar[6 * i:6 * i + 6] = acc
    return LinearizedSystem(g.edge_count, rows, bbar, J, eta, S, beta)


def _normal_blocks(sys: LinearizedSystem) -> dict:
    """Lower-triangle blocks of ``Bbar Bbar^T`` accumulated edge by edge."""
    by_edge = {}
    for i, row in enumerate(sys.rows):
        for k, blk in row:
            by_edge.setdefault(k, []).append((i, blk))
    blocks = {}
    for entries in by_edge.values():
        idx = [i for i, _ in entries]
        stack = np.stack([b for _, b in entries])
        prods = np.einsum("iab,jcb->ijac", stack, stack)
        for a, i in enumerate(idx):
            for b in range(a + 1):
                j = idx[b]
                key, M = ((i, j), prods[a, b]) if i >= j else ((j, i), prods[b, a])
                if key in blocks:
                    blocks[key] += M
                else:
                    blocks[key] = M.copy()
    return blocks


def solve_min_norm(sys: LinearizedSystem, refine: int = 2):
    """Minimum-norm step ``xibar = Bbar^T (Bbar Bbar^T)^-1 bbar``.

    Returns ``(xi, xibar)`` with ``xi = J (Sigma^(1/2) xibar - eta)`` as an
    ``(|E|, 6)`` array.  Up to ``refine`` rounds of iterative refinement are
    applied when the constraint residual exceeds ``1e-9 (1 + ||bbar||)``.
    """
    nu = len(sys.rows)
    if nu:
        blocks = _normal_blocks(sys)
        y, st = solve_spd(blocks, nu, sys.bbar)
        xibar = sys.apply_transpose(y)
        tol = RESIDUAL_TOL * (1.0 + np.linalg.norm(sys.bbar))
        res = sys.bbar - sys.apply(xibar)
        rounds = 0
        while np.linalg.norm(res) > tol and rounds < refine:
            dy, _ = solve_spd(blocks, nu, res)
            y = y + dy
            xibar = sys.apply_transpose(y)
            res = sys.bbar - sys.apply(xibar)
            rounds += 1
        sys.stats.update(st)
        sys.stats["refinements"] = rounds
        sys.stats["constraint_residual"] = float(np.linalg.norm(res))
        sys.stats["residual_ok"] = bool(np.linalg.norm(res) <= tol)
    else:
        xibar = np.zeros(6 * sys.edge_count)
        sys.stats.update(constraint_residual=0.0, residual_ok=True, nnz_blocks=0)
    xb = xibar.reshape(-1, 6)
    xi = np.einsum("kab,kb->ka", sys.J, np.einsum("kab,kb->ka", sys.S, xb) - sys.eta)
    return xi, xibar


def relative_cost(g: PoseGraph, rel) -> float:
    total = 0.0
    for k, m in enumerate(g.measurements):
        e = lg.log(m.transform.inverse() @ rel[k])
        total += float(e @ m.information @ e)
    return total


def solve_cb_pgo(
    g: PoseGraph,
    basis,
    init=None,
    max_iter: int = MAX_ITER,
    xi_tol: float = XI_TOL,
    beta_tol: float = BETA_TOL,
    tree=None,
):
    """Sequential quadratic programming over relative poses.

    Parameters
    ----------
    g : PoseGraph
    basis : CycleBasis or list of edge-id tuples
        Cycle basis of the topology graph, ``nu`` independent circuits.
    init : list of Transform, optional
        Initial relative poses; the measurements by default.
    tree : list of int, optional
        Spanning tree used to recover poses at the end.

    Returns
    -------
    rel : list of Transform
    poses : list of Transform
        Recovered from ``rel`` with pose 0 at the identity.
    stats : dict
        ``converged``, ``iterations``, ``objective``, ``max_beta``, per
        iteration ``history`` records and system dimensions.
    """
    clock = time.perf_counter
    t_start = clock()
    cycles = build_oriented_cycles(basis, g)
    rel = list(init) if init is not None else [m.transform for m in g.measurements]
    history = []
    converged = False
    it = 0
    beta_max = max((float(np.linalg.norm(cycle_residual(c, rel))) for c in cycles), default=0.0)
    system_rows = 6 * len(cycles)
    pattern_ok = True
    for it in range(1, max_iter + 1):
        t0 = clock()
        sys = linearize(g, cycles, rel)
        t1 = clock()
        xi, _ = solve_min_norm(sys)
        t2 = clock()
        rel = [T @ lg.exp(x) for T, x in zip(rel, xi)]
        t3 = clock()
        xi_norm = float(np.linalg.norm(xi, axis=1).max()) if len(xi) else 0.0
        beta_max = max(
            (float(np.linalg.norm(cycle_residual(c, rel))) for c in cycles), default=0.0
        )
        system_rows = sys.shape[0]
        pattern_ok = pattern_ok and _pattern_matches(sys, cycles)
        history.append(
            {
                "iteration": it,
                "objective": relative_cost(g, rel),
                "xi_norm": xi_norm,
                "beta_max": beta_max,
                "constraint_residual": sys.stats.get("constraint_residual", 0.0),
                "damped": sys.stats.get("damped", False),
                "nnz_blocks": sys.stats.get("nnz_blocks", 0),
                "linearize_time": t1 - t0,
                "solve_time": t2 - t1,
                "update_time": t3 - t2,
                "time": clock() - t0,
            }
        )
        if xi_norm < xi_tol and beta_max < beta_tol:
            converged = True
            break
    poses = poses_from_relative(g, rel, tree)
    stats = {
        "solver": "cb",
        "converged": converged,
        "iterations": it,
        "objective": objective(g, poses),
        "max_beta": beta_max,
        "system_rows": system_rows,
        "nu": len(cycles),
        "pattern_matches": pattern_ok,
        "history": history,
        "total_time": clock() - t_start,
    }
    return rel, poses, stats


def _pattern_matches(sys: LinearizedSystem, cycles) -> bool:
    for row, cyc in zip(sys.rows, cycles):
        if tuple(sorted(k for k, _ in row)) != cyc.edges:
            return False
    return True
