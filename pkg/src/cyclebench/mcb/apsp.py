"""Consistent all-pairs shortest paths via LexDijkstra.

The compiled kernel is used when the extension was built and
``CYCLEBENCH_PURE_PYTHON`` is unset; otherwise the pure-Python kernel runs.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DisconnectedGraph, NonPositiveWeight, OutOfBudget
from ..graph import Graph
from . import _lexdijkstra_py

try:
    if os.environ.get("CYCLEBENCH_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _lexdijkstra as _compiled
except ImportError:  # extension not built
    _compiled = None

DEFAULT_VERTEX_CAP = 20_000


def available_kernels() -> dict:
    kernels = {"python": _lexdijkstra_py}
    if _compiled is not None:
        kernels["cython"] = _compiled
    return kernels


def default_kernel_name() -> str:
    return "cython" if _compiled is not None else "python"


def _kernel(name):
    if name is None:
        name = default_kernel_name()
    try:
        return available_kernels()[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available") from None


def default_threads() -> int:
    env = os.environ.get("CYCLEBENCH_THREADS")
    if env:
        return max(1, int(env))
    return 1


@dataclass
class ShortestPathForest:
    """Lexicographic shortest-path tree grown from one source."""

    source: int
    dist: np.ndarray
    hops: np.ndarray
    parent_edge: np.ndarray
    parent_vertex: np.ndarray

    def path(self, target: int) -> list:
        """Edge ids of the stored source-target path, listed from the target."""
        out = []
        x = int(target)
        pe = self.parent_edge
        pv = self.parent_vertex
        if self.dist[x] < 0:
            raise DisconnectedGraph(f"vertex {target} unreachable from {self.source}")
        while x != self.source:
            out.append(int(pe[x]))
            x = int(pv[x])
        return out


class ConsistentAPSP:
    """Dense ``n x n`` tables of the LexDijkstra forests, one row per source."""

    def __init__(self, graph, dist, hops, parent_edge, parent_vertex):
        self.graph = graph
        self.dist = dist
        self.hops = hops
        self.parent_edge = parent_edge
        self.parent_vertex = parent_vertex

    @property
    def n(self):
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, source) -> ShortestPathForest:
        s = int(source)
        return ShortestPathForest(
            s, self.dist[s], self.hops[s], self.parent_edge[s], self.parent_vertex[s]
        )

    def path(self, u: int, v: int) -> list:
        return self[u].path(v)

    def first_vertex(self, x: int, y: int) -> int:
        """First vertex after ``x`` on the stored x-y path (``-1`` when x == y).

        Stored paths are symmetric, so this is the parent of ``x`` in the tree
        rooted at ``y``.
        """
        return int(self.parent_vertex[y, x])


def _prepare(g: Graph):
    for k, w in enumerate(g.weight):
        if w < 1:
            raise NonPositiveWeight(f"edge {k} has weight {w}")
    indptr, nbr, eid, wt = g.csr()
    return (
        np.ascontiguousarray(indptr),
        np.ascontiguousarray(nbr),
        np.ascontiguousarray(eid),
        np.ascontiguousarray(wt),
    )


def _alloc(rows, n):
    return tuple(np.empty((rows, n), dtype=np.int64) for _ in range(4))


def lex_dijkstra(g: Graph, source: int, kernel: str | None = None) -> ShortestPathForest:
    """Single-source lexicographic shortest paths.

    Among paths of minimum weight, then minimum hop count, the stored path is
    the one whose smallest edge id outside the other path is smaller.
    """
    arrays = _prepare(g)
    n = g.vertex_count
    dist, hops, pe, pv = _alloc(1, n)
    _kernel(kernel).lex_sssp_rows(
        *arrays, np.array([source], dtype=np.int64), dist, hops, pe, pv
    )
    return ShortestPathForest(int(source), dist[0], hops[0], pe[0], pv[0])


def consistent_apsp(
    g: Graph,
    kernel: str | None = None,
    threads: int | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> ConsistentAPSP:
    """Run LexDijkstra from every vertex; rows are indexed by source."""
    n = g.vertex_count
    if n > vertex_cap:
        raise OutOfBudget(
            f"{n} vertices exceed the dense APSP cap of {vertex_cap}"
        )
    arrays = _prepare(g)
    dist, hops, pe, pv = _alloc(n, n)
    kern = _kernel(kernel)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or n < 2 * threads or kern is _lexdijkstra_py:
        kern.lex_sssp_rows(*arrays, np.arange(n, dtype=np.int64), dist, hops, pe, pv)
    else:
        bounds = np.linspace(0, n, threads + 1).astype(np.int64)

        def run(i):
            lo, hi = int(bounds[i]), int(bounds[i + 1])
            kern.lex_sssp_rows(
                *arrays,
                np.arange(lo, hi, dtype=np.int64),
                dist[lo:hi],
                hops[lo:hi],
                pe[lo:hi],
                pv[lo:hi],
            )

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(threads)))
    if n and (dist < 0).any():
        raise DisconnectedGraph("consistent APSP requires a connected graph")
    return ConsistentAPSP(g, dist, hops, pe, pv)
