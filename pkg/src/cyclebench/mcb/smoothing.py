"""Degree-two smoothing and the inverse expansion of a reduced basis."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import DisconnectedGraph
from ..graph import Graph
from .basis import CycleBasis


@dataclass
class ReducedGraph:
    """A graph with every maximal chain of degree-2 vertices collapsed.

    Attributes
    ----------
    graph : Graph
        The reduced graph.  Its edge weight is the summed weight of the chain.
    chain_map : list of tuple of (int, bool)
        For reduced edge ``k``, the original edges it replaces in traversal
        order from ``graph.eu[k]`` to ``graph.ev[k]``; the flag is True when
        the original edge is walked from its first to its second endpoint.
    vertex_map : list of int
        Original vertex id of each reduced vertex.
    original : Graph
    """

    graph: Graph
    chain_map: list
    vertex_map: list
    original: Graph

    def expand(self, reduced_cycle) -> tuple:
        out = []
        for k in reduced_cycle:
            out.extend(e for e, _ in self.chain_map[k])
        return tuple(sorted(out))


def smooth_degree_two(g: Graph) -> ReducedGraph:
    """Replace every chain of degree-2 vertices by a single weighted edge.

    Retained vertices are those whose degree is not two, relabelled in
    ascending original order.  If every vertex has degree two the graph is a
    single cycle; vertex 0 is retained and the cycle becomes a self-loop on it.
    """
    if not g.is_connected():
        raise DisconnectedGraph("smoothing requires a connected graph")
    n = g.vertex_count
    anchors = [x for x in range(n) if g.degree(x) != 2]
    if not anchors:
        anchors = [0]
    new_id = {x: i for i, x in enumerate(anchors)}
    reduced = Graph(len(anchors))
    chain_map = []
    used = [False] * g.edge_count

    for a in anchors:
        for e0 in g.adjacency[a]:
            if used[e0]:
                continue
            chain = []
            total = 0
            cur = a
            e = e0
            while True:
                used[e] = True
                nxt = g.other(e, cur)
                chain.append((e, g.eu[e] == cur))
                total += g.weight[e]
                cur = nxt
                if cur in new_id:
                    break
                # cur has degree exactly two; leave through the other edge
                e1, e2 = g.adjacency[cur]
                e = e2 if e1 == e else e1
            reduced.add_edge(new_id[a], new_id[cur], total)
            chain_map.append(tuple(chain))

    return ReducedGraph(reduced, chain_map, anchors, g)


def reconstruct_mcb(reduced_basis: CycleBasis, reduced: ReducedGraph) -> CycleBasis:
    """Expand chain edges of a reduced-graph basis back to original edges."""
    g = reduced.original
    cycles = [reduced.expand(c) for c in reduced_basis.cycles]
    total = sum(g.cycle_weight(c) for c in cycles)
    return CycleBasis(cycles, total, reduced_basis.kind)
