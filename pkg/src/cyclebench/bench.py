"""Timing of the LexDijkstra kernels on sparse random graphs."""
from __future__ import annotations

import time

import numpy as np

from .graph import Graph
from .mcb import available_kernels, consistent_apsp


def random_sparse_graph(n: int, extra: int, seed=0, max_weight: int = 1) -> Graph:
    """Random spanning tree plus ``extra`` chords with weights in ``1..max_weight``."""
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(v)), v) for v in range(1, n)]
    for _ in range(extra):
        u, v = rng.integers(n, size=2)
        edges.append((int(u), int(v)))
    w = rng.integers(1, max_weight + 1, size=len(edges))
    return Graph(n, [(u, v, int(x)) for (u, v), x in zip(edges, w)])


def bench_kernels(sizes=(100, 200, 400), repeats: int = 3, seed: int = 0, threads=None):
    """Best-of-``repeats`` APSP time per kernel; outputs are checked to agree."""
    rows = []
    for n in sizes:
        g = random_sparse_graph(n, n // 5, seed=[seed, n], max_weight=3)
        results = {}
        for name in available_kernels():
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                apsp = consistent_apsp(g, kernel=name, threads=threads)
                best = min(best, time.perf_counter() - t0)
            results[name] = (best, apsp)
        ref = results["python"][1]
        agree = all(
            np.array_equal(a.parent_edge, ref.parent_edge) and np.array_equal(a.dist, ref.dist)
            for _, a in results.values()
        )
        row = {"vertices": n, "edges": g.edge_count, "agree": agree}
        for name, (t, _) in results.items():
            row[f"{name}_seconds"] = t
        if "cython" in results:
            row["speedup"] = results["python"][0] / results["cython"][0]
        rows.append(row)
    return rows
