from __future__ import annotations

from ..graph import Graph, cycle_space_dimension
from .basis import CycleBasis


def dfs_tree(g: Graph, root: int = 0):
    """Iterative DFS visiting incident edges in ascending id order.

    Returns ``(parent_edge, parent_vertex, depth, tree_mask)``.
    """
    n = g.vertex_count
    parent_edge = [-1] * n
    parent_vertex = [-1] * n
    depth = [-1] * n
    tree = [False] * g.edge_count
    depth[root] = 0
    stack = [(root, iter(sorted(g.adjacency[root])))]
    while stack:
        x, it = stack[-1]
        for e in it:
            y = g.other(e, x)
            if depth[y] < 0:
                depth[y] = depth[x] + 1
                parent_edge[y] = e
                parent_vertex[y] = x
                tree[e] = True
                stack.append((y, iter(sorted(g.adjacency[y]))))
                break
        else:
            stack.pop()
    return parent_edge, parent_vertex, depth, tree


def fundamental_cycle_basis(g: Graph, root: int = 0) -> CycleBasis:
    """One cycle per chord of a DFS spanning tree: the chord plus its tree path."""
    nu = cycle_space_dimension(g)
    pe, pv, depth, tree = dfs_tree(g, root)
    cycles = []
    for k, u, v, _ in g.edges():
        if tree[k]:
            continue
        edges = [k]
        a, b = u, v
        while a != b:
            if depth[a] >= depth[b]:
                edges.append(pe[a])
                a = pv[a]
            else:
                edges.append(pe[b])
                b = pv[b]
        cycles.append(tuple(sorted(edges)))
    assert len(cycles) == nu
    total = sum(g.cycle_weight(c) for c in cycles)
    return CycleBasis(cycles, total, "FCB")
