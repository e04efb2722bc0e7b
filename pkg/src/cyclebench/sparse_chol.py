"""Block-sparse Cholesky factorization with a minimum-degree ordering.

Symmetric positive-definite systems are given as a dict of dense square
blocks ``{(i, j): block}`` holding the lower triangle (``i >= j``) of an
``n x n`` block matrix.  Factorization is right-looking over block columns in
the order chosen by a greedy minimum-degree heuristic on the block graph.
"""
from __future__ import annotations

import heapq

import numpy as np
from scipy.linalg import solve_triangular

from .errors import CholeskyFailure, SingularSystem

DAMPING = 1e-9


def minimum_degree_ordering(n: int, edges) -> list:
    """Greedy minimum-degree elimination order of a graph on ``0..n-1``.

    Ties go to the lowest vertex index, so the order is deterministic.
    """
    adj = [set() for _ in range(n)]
    for i, j in edges:
        if i != j:
            adj[i].add(j)
            adj[j].add(i)
    heap = [(len(adj[v]), v) for v in range(n)]
    heapq.heapify(heap)
    done = [False] * n
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d != len(adj[v]):
            continue
        done[v] = True
        order.append(v)
        nbrs = adj[v]
        for u in nbrs:
            a = adj[u]
            a.discard(v)
            a |= nbrs
            a.discard(u)
            heapq.heappush(heap, (len(a), u))
        adj[v] = set()
    return order


class BlockCholesky:
    """Factor ``A = P^T L L^T P`` for a block-sparse SPD matrix.

    Parameters
    ----------
    blocks : dict
        Lower-triangle blocks ``{(i, j): ndarray}`` with ``i >= j``.
    n : int
        Number of block rows.
    size : int
        Block edge length.
    order : sequence of int, optional
        Elimination order; minimum degree when omitted.
    """

    def __init__(self, blocks: dict, n: int, size: int = 6, order=None):
        self.n = n
        self.size = size
        if order is None:
            order = minimum_degree_ordering(n, (k for k in blocks if k[0] != k[1]))
        self.order = list(order)
        self.position = np.empty(n, dtype=np.int64)
        self.position[self.order] = np.arange(n)
        self._factor(blocks)

    def _factor(self, blocks):
        n, size = self.n, self.size
        pos = self.position
        # work[c] maps row position -> block of column position c (rows >= c)
        work = [dict() for _ in range(n)]
        for (i, j), B in blocks.items():
            pi, pj = pos[i], pos[j]
            if pi < pj:
                pi, pj, B = pj, pi, B.T
            col = work[pj]
            if pi in col:
                col[pi] = col[pi] + B
            else:
                col[pi] = np.array(B, dtype=float)
        eye = np.eye(size)
        self.diag = [None] * n
        self.cols = [None] * n
        nnz = 0
        for k in range(n):
            col = work[k]
            D = col.pop(k, None)
            if D is None:
                raise CholeskyFailure(f"block column {k} has no diagonal block")
            D = 0.5 * (D + D.T)
            try:
                Lkk = np.linalg.cholesky(D)
            except np.linalg.LinAlgError:
                raise CholeskyFailure(f"pivot block {k} is not positive definite") from None
            if not np.all(np.isfinite(Lkk)):
                raise CholeskyFailure(f"pivot block {k} is not finite")
            self.diag[k] = Lkk
            rows = sorted(col)
            if rows:
                Linv_t = solve_triangular(Lkk, eye, lower=True).T
                stacked = np.stack([col[r] for r in rows]) @ Linv_t
                for a, ra in enumerate(rows):
                    La = stacked[a]
                    for b in range(a + 1):
                        # rows ascend, so the update lands in column rb, row ra
                        tcol = work[rows[b]]
                        upd = La @ stacked[b].T
                        if ra in tcol:
                            tcol[ra] = tcol[ra] - upd
                        else:
                            tcol[ra] = -upd
                self.cols[k] = (np.asarray(rows, dtype=np.int64), stacked)
                nnz += len(rows)
            else:
                self.cols[k] = (np.empty(0, dtype=np.int64), np.empty((0, size, size)))
            work[k] = None
        self.nnz_blocks = nnz + n

    def solve(self, rhs) -> np.ndarray:
        n, size = self.n, self.size
        rhs = np.asarray(rhs, dtype=float)
        y = rhs.reshape(n, size, -1)[self.order].copy()
        for k in range(n):
            y[k] = solve_triangular(self.diag[k], y[k], lower=True)
            rows, L = self.cols[k]
            if rows.size:
                y[rows] -= L @ y[k]
        for k in range(n - 1, -1, -1):
            rows, L = self.cols[k]
            if rows.size:
                y[k] -= np.einsum("rji,rjc->ic", L, y[rows])
            y[k] = solve_triangular(self.diag[k], y[k], lower=True, trans="T")
        out = np.empty_like(y)
        out[self.order] = y
        return out.reshape(rhs.shape)


def solve_spd(blocks: dict, n: int, rhs, size: int = 6):
    """Solve a block SPD system, retrying once with diagonal damping.

    The retry adds ``1e-9 * trace / dim`` to the diagonal.  Returns the
    solution and a stats dict; raises :class:`SingularSystem` when the damped
    factorization fails as well.
    """
    stats = {"damped": False}
    if n == 0:
        stats["nnz_blocks"] = 0
        return np.zeros_like(np.asarray(rhs, dtype=float)), stats
    try:
        fac = BlockCholesky(blocks, n, size)
    except CholeskyFailure:
        trace = sum(np.trace(B) for (i, j), B in blocks.items() if i == j)
        lam = DAMPING * trace / (n * size)
        damped = dict(blocks)
        for i in range(n):
            key = (i, i)
            damped[key] = damped.get(key, np.zeros((size, size))) + lam * np.eye(size)
        try:
            fac = BlockCholesky(damped, n, size)
        except CholeskyFailure as exc:
            raise SingularSystem(f"factorization failed after damping: {exc}") from exc
        stats["damped"] = True
    stats["nnz_blocks"] = fac.nnz_blocks
    return fac.solve(rhs), stats


def dense_from_blocks(blocks: dict, n: int, size: int = 6) -> np.ndarray:
    """Dense symmetric matrix assembled from lower-triangle blocks."""
    A = np.zeros((n * size, n * size))
    for (i, j), B in blocks.items():
        A[i * size:(i + 1) * size, j * size:(j + 1) * size] += B
        if i != j:
            A[j * size:(j + 1) * size, i * size:(i + 1) * size] += B.T
    return A
