"""Minimum cycle basis of sparse positive-integer-weighted multigraphs.

Pipeline: smooth out degree-2 vertices, LexDijkstra consistent APSP on the
reduced graph, isometric circuits, support-vector independence extraction,
then expansion of chain edges back to the original graph.
"""
from __future__ import annotations

import time

from ..graph import Graph, cycle_space_dimension
from .apsp import (
    ConsistentAPSP,
    ShortestPathForest,
    available_kernels,
    consistent_apsp,
    default_kernel_name,
    lex_dijkstra,
)
from .basis import CycleBasis
from .fundamental import fundamental_cycle_basis
from .independence import SupportVectorBasis, extract_mcb
from .isometric import CircuitRepresentation, isometric_set, representation_digraph
from .smoothing import ReducedGraph, reconstruct_mcb, smooth_degree_two

__all__ = [
    "CircuitRepresentation",
    "ConsistentAPSP",
    "CycleBasis",
    "ReducedGraph",
    "ShortestPathForest",
    "SupportVectorBasis",
    "available_kernels",
    "consistent_apsp",
    "default_kernel_name",
    "extract_mcb",
    "fundamental_cycle_basis",
    "isometric_set",
    "lex_dijkstra",
    "minimum_cycle_basis",
    "reconstruct_mcb",
    "representation_digraph",
    "smooth_degree_two",
]


def minimum_cycle_basis(
    g: Graph,
    kernel: str | None = None,
    threads: int | None = None,
    vertex_cap: int | None = None,
) -> CycleBasis:
    """Minimum-weight cycle basis of a connected graph.

    Phase timings in seconds and reduced-graph sizes are stored in
    ``basis.meta``.
    """
    clock = time.perf_counter
    timings = {}
    nu = cycle_space_dimension(g)
    if nu == 0:
        return CycleBasis([], 0, "MCB", {"timings": timings, "nu": 0})

    t0 = clock()
    reduced = smooth_degree_two(g)
    t1 = clock()
    kwargs = {} if vertex_cap is None else {"vertex_cap": vertex_cap}
    apsp = consistent_apsp(reduced.graph, kernel=kernel, threads=threads, **kwargs)
    t2 = clock()
    circuits = isometric_set(reduced.graph, apsp)
    t3 = clock()
    reduced_basis = extract_mcb(circuits, nu, reduced.graph, apsp)
    t4 = clock()
    basis = reconstruct_mcb(reduced_basis, reduced)
    t5 = clock()

    timings.update(
        smoothing=t1 - t0,
        apsp=t2 - t1,
        isometric=t3 - t2,
        independence=t4 - t3,
        reconstruct=t5 - t4,
    )
    basis.meta.update(
        timings=timings,
        nu=nu,
        reduced_vertices=reduced.graph.vertex_count,
        reduced_edges=reduced.graph.edge_count,
        isometric_circuits=len(circuits),
        support_scans=reduced_basis.meta.get("support_scans", 0),
        kernel=kernel or default_kernel_name(),
    )
    return basis
