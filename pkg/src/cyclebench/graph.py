"""Undirected multigraphs and GF(2) cycle-space algebra.

Cycle vectors are sparse GF(2) vectors over edge ids, stored as strictly
ascending tuples of ints.  Vector addition is symmetric difference and the
inner product is the parity of the intersection.

Edge ids are dense and assigned in insertion order.  That order is also the
tie-break order used by the lexicographic shortest paths in
:mod:`cyclebench.mcb`, so it must stay deterministic.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import DisconnectedGraph, NonPositiveWeight

CycleVector = tuple  # strictly ascending tuple of edge ids


class Graph:
    """Undirected multigraph with positive integer edge weights.

    Self-loops and parallel edges are allowed.  The graph is not meant to be
    mutated once it has been handed to an algorithm.

    Parameters
    ----------
    vertex_count : int
        Vertices are ``0 .. vertex_count - 1``.
    edges : iterable of (u, v) or (u, v, weight)
        Edge ``k`` of the iterable gets id ``k``.  Missing weights default to 1.
    """

    __slots__ = ("vertex_count", "eu", "ev", "weight", "adjacency")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]] = ()):
        self.vertex_count = int(vertex_count)
        self.eu: list[int] = []
        self.ev: list[int] = []
        self.weight: list[int] = []
        self.adjacency: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for edge in edges:
            self.add_edge(*edge)

    def add_edge(self, u: int, v: int, weight: int = 1) -> int:
        if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
            raise ValueError(f"edge ({u}, {v}) references a missing vertex")
        if int(weight) != weight or weight < 1:
            raise NonPositiveWeight(f"edge ({u}, {v}) has weight {weight}")
        eid = len(self.eu)
        self.eu.append(int(u))
        self.ev.append(int(v))
        self.weight.append(int(weight))
        self.adjacency[u].append(eid)
        if v != u:
            self.adjacency[v].append(eid)
        else:
            # a self-loop contributes two to the degree
            self.adjacency[u].append(eid)
        return eid

    @property
    def edge_count(self) -> int:
        return len(self.eu)

    def edges(self):
        """Yield ``(edge_id, u, v, weight)`` in id order."""
        for k in range(len(self.eu)):
            yield k, self.eu[k], self.ev[k], self.weight[k]

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self.eu[eid], self.ev[eid]

    def other(self, eid: int, vertex: int) -> int:
        u, v = self.eu[eid], self.ev[eid]
        return v if vertex == u else u

    def degree(self, vertex: int) -> int:
        return len(self.adjacency[vertex])

    def cycle_weight(self, cycle: Iterable[int]) -> int:
        return sum(self.weight[e] for e in cycle)

    def component_count(self) -> int:
        seen = [False] * self.vertex_count
        count = 0
        for start in range(self.vertex_count):
            if seen[start]:
                continue
            count += 1
            seen[start] = True
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for e in self.adjacency[x]:
                    y = self.other(e, x)
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
        return count

    def is_connected(self) -> bool:
        return self.vertex_count > 0 and self.component_count() == 1

    def csr(self):
        """Compressed adjacency arrays ``(indptr, neighbor, edge_id, weight)``.

        Self-loops are dropped; they never take part in a shortest path.
        """
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        nbr: list[int] = []
        eids: list[int] = []
        for x in range(self.vertex_count):
            for e in self.adjacency[x]:
                y = self.other(e, x)
                if y == x:
                    continue
                nbr.append(y)
                eids.append(e)
            indptr[x + 1] = len(nbr)
        eids_arr = np.asarray(eids, dtype=np.int64)
        w = np.asarray(self.weight, dtype=np.int64)
        return (
            indptr,
            np.asarray(nbr, dtype=np.int64),
            eids_arr,
            w[eids_arr] if len(eids_arr) else np.zeros(0, dtype=np.int64),
        )

    def __repr__(self):
        return f"Graph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"


def symmetric_difference(a: Sequence[int], b: Sequence[int]) -> CycleVector:
    """GF(2) sum of two sparse vectors given as ascending sequences."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            j += 1
        else:
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def inner_product(a: Sequence[int], b: Sequence[int]) -> int:
    """GF(2) inner product: 1 iff the two supports share an odd number of edges."""
    parity = 0
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            parity ^= 1
            i += 1
            j += 1
    return parity


def cycle_space_dimension(g: Graph) -> int:
    """Return ``|E| - |V| + 1`` for a connected graph."""
    if not g.is_connected():
        raise DisconnectedGraph(
            f"graph has {g.component_count()} connected components, expected 1"
        )
    return g.edge_count - g.vertex_count + 1


def gf2_rank(vectors: Iterable[Sequence[int]], dimension: int | None = None) -> int:
    """Rank over GF(2) of a set of sparse vectors.

    Rows are packed into Python ints and reduced against a pivot table keyed
    by leading bit.
    """
    pivots: dict[int, int] = {}
    rank = 0
    for vec in vectors:
        row = 0
        for e in vec:
            if dimension is not None and not 0 <= e < dimension:
                raise ValueError(f"edge id {e} outside dimension {dimension}")
            row ^= 1 << e
        while row:
            lead = row.bit_length() - 1
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = row
                rank += 1
                break
            row ^= p
    return rank


def vertex_degrees(g: Graph, edge_set: Iterable[int]) -> dict[int, int]:
    """Degree of every vertex in the subgraph induced by ``edge_set``."""
    deg: dict[int, int] = {}
    for e in edge_set:
        u, v = g.eu[e], g.ev[e]
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return deg


def is_even_subgraph(g: Graph, edge_set: Iterable[int]) -> bool:
    return all(d % 2 == 0 for d in vertex_degrees(g, edge_set).values())


def is_circuit(g: Graph, edge_set: Sequence[int]) -> bool:
    """True iff the edges form one connected subgraph with every degree equal to 2."""
    edges = list(edge_set)
    if not edges:
        return False
    deg = vertex_degrees(g, edges)
    if any(d != 2 for d in deg.values()):
        return False
    # connectivity over the touched vertices
    incident: dict[int, list[int]] = {}
    for e in edges:
        incident.setdefault(g.eu[e], []).append(e)
        if g.ev[e] != g.eu[e]:
            incident.setdefault(g.ev[e], []).append(e)
    start = g.eu[edges[0]]
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e in incident[x]:
            y = g.other(e, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(deg)
