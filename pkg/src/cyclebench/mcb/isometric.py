"""Isometric circuits from a consistent APSP.

A candidate circuit is a vertex-edge pair ``(x, e_uv)`` standing for
``P_xu + P_xv + e_uv``.  Each non-degenerate pair is linked to the two
equivalent representations obtained by sliding the apex one step along the
cycle in either direction.  For an isometric circuit those links close into
a double-linked ring with one representation per edge of the circuit, so a
component is found by walking the ring until it returns to its start.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph
from .apsp import ConsistentAPSP


@dataclass(frozen=True, order=True)
class CircuitRepresentation:
    weight: int
    apex: int
    edge: int
    length: int

    def expand(self, g: Graph, apsp: ConsistentAPSP) -> tuple:
        u, v = g.eu[self.edge], g.ev[self.edge]
        if u == v:
            return (self.edge,)
        edges = apsp.path(self.apex, u) + apsp.path(self.apex, v)
        edges.append(self.edge)
        return tuple(sorted(edges))


@dataclass
class RepresentationDigraph:
    """Links between vertex-edge representations, indexed ``apex * m + edge``.

    ``candidate`` marks pairs that are non-degenerate and never hit the
    non-isometric case; only those carry meaningful ``succ`` entries.
    """

    m: int
    candidate: np.ndarray  # bool, n*m
    succ: np.ndarray  # int64, (n*m, 2)
    weight: np.ndarray  # int64, n*m
    length: np.ndarray  # int64, n*m

    def split(self, rep: int) -> tuple:
        return divmod(int(rep), self.m)


def representation_digraph(g: Graph, apsp: ConsistentAPSP) -> RepresentationDigraph:
    n, m = g.vertex_count, g.edge_count
    PE, PV, D, H = apsp.parent_edge, apsp.parent_vertex, apsp.dist, apsp.hops
    eu = np.asarray(g.eu, dtype=np.int64)
    ev = np.asarray(g.ev, dtype=np.int64)
    w = np.asarray(g.weight, dtype=np.int64)

    X = np.repeat(np.arange(n, dtype=np.int64)[:, None], m, axis=1)
    E = np.broadcast_to(np.arange(m, dtype=np.int64), (n, m))
    U = np.broadcast_to(eu, (n, m))
    V = np.broadcast_to(ev, (n, m))

    not_loop = U != V
    sxu = PV[U, X]  # first vertex after x on P_xu, -1 when x == u
    sxv = PV[V, X]
    valid = (
        not_loop
        & (PE[X, U] != E)
        & (PE[X, V] != E)
        & (sxu != sxv)
    )
    weight = D[X, U] + D[X, V] + w[E]
    length = H[X, U] + H[X, V] + 1

    succ = np.full((n, m, 2), -1, dtype=np.int64)
    ok = valid.copy()
    for slot, (P, Q) in enumerate(((U, V), (V, U))):
        at_end = X == P
        xp = PV[P, X]  # x' = s_x(p)
        xs = np.where(xp < 0, 0, xp)
        case_a = ~at_end & (PV[Q, xs] == X)
        case_b = ~at_end & ~case_a & (PV[xs, Q] == P)
        nb = np.full((n, m), -1, dtype=np.int64)
        nb = np.where(at_end, Q * m + E, nb)
        nb = np.where(case_a, xs * m + E, nb)
        nb = np.where(case_b, Q * m + PE[P, X], nb)
        ok &= nb >= 0
        succ[:, :, slot] = nb

    return RepresentationDigraph(
        m,
        ok.reshape(-1),
        succ.reshape(-1, 2),
        weight.reshape(-1),
        length.reshape(-1),
    )


def ring_components(dg: RepresentationDigraph):
    """Yield ``(ring, closed)`` for every component reached from a candidate.

    ``closed`` is True when the walk returned to its start after exactly
    ``length`` steps through mutually linked candidates only.
    """
    cand = dg.candidate
    succ = dg.succ
    state = np.zeros(cand.shape[0], dtype=bool)
    for r in np.flatnonzero(cand).tolist():
        if state[r]:
            continue
        expected = int(dg.length[r])
        ring = [r]
        state[r] = True
        prev, cur = -1, r
        closed = False
        while True:
            a, b = succ[cur]
            nxt = int(a) if a != prev else int(b)
            if nxt == r:
                closed = len(ring) == expected and cur in (succ[r, 0], succ[r, 1])
                break
            if nxt < 0 or not cand[nxt] or state[nxt] or len(ring) >= expected:
                break
            # ring links are mutual; a one-way link leaves the component
            if succ[nxt, 0] != cur and succ[nxt, 1] != cur:
                break
            state[nxt] = True
            ring.append(nxt)
            prev, cur = cur, nxt
        yield ring, closed


def isometric_set(g: Graph, apsp: ConsistentAPSP) -> list:
    """One representation per isometric circuit, sorted by (weight, apex, edge)."""
    out = []
    for k, u, v, wk in g.edges():
        if u == v:
            out.append(CircuitRepresentation(wk, u, k, 1))
    if g.vertex_count and g.edge_count:
        dg = representation_digraph(g, apsp)
        for ring, closed in ring_components(dg):
            if not closed:
                continue
            r = ring[0]
            x, e = dg.split(r)
            out.append(CircuitRepresentation(int(dg.weight[r]), x, e, int(dg.length[r])))
    out.sort()
    return out
