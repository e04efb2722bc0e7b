"""Greedy extraction of independent circuits with support vectors.

Circuits are scanned in nondecreasing weight.  A forest ``T`` is grown from
the edges of accepted circuits; incidence vectors are only ever compared on
off-tree edges that some support vector still uses.

* A circuit with edges no accepted circuit has used is independent outright.
  Its new off-tree edges ``e1..ek`` give the implicit witness ``{e1}``, which
  is folded into every existing support vector the circuit hits, and the
  fresh support vectors ``{e_j, e_j+1}``.
* Otherwise the circuit is independent iff it has odd inner product with
  some support vector ``S``; ``S`` is retired and added to every other
  support vector the circuit hits.
"""
from __future__ import annotations

import numpy as np

from ..errors import InsufficientIndependentCircuits
from ..graph import Graph, inner_product, symmetric_difference
from .basis import CycleBasis
from .isometric import CircuitRepresentation


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class SupportVectorBasis:
    """Incremental independence oracle over the cycle space of ``g``."""

    def __init__(self, g: Graph | None = None, edge_count: int | None = None):
        self.g = g
        m = g.edge_count if g is not None else int(edge_count)
        self.known = np.zeros(m, dtype=bool)
        self.tree = np.zeros(m, dtype=bool)
        self.use_count = np.zeros(m, dtype=np.int64)
        # without endpoints every edge is treated as off-tree
        self.forest = _DisjointSet(g.vertex_count) if g is not None else None
        self.support: list = []
        self.accepted = 0
        self.scans = 0  # inner products evaluated against support vectors

    def _replace(self, idx, vec):
        old = self.support[idx]
        if old:
            self.use_count[list(old)] -= 1
        if vec:
            self.use_count[list(vec)] += 1
        self.support[idx] = vec

    def _restrict(self, cycle):
        uc = self.use_count
        return tuple(e for e in cycle if uc[e] > 0)

    def offer(self, cycle) -> bool:
        """Accept ``cycle`` if it is independent of everything accepted so far."""
        g = self.g
        known = self.known
        new = [e for e in cycle if not known[e]]
        if new:
            off_tree = []
            for e in new:
                known[e] = True
                if self.forest is not None and self.forest.union(g.eu[e], g.ev[e]):
                    self.tree[e] = True
                else:
                    off_tree.append(e)
            # the circuit cannot lie entirely in the grown forest
            assert off_tree, "accepted circuit produced no off-tree edge"
            restricted = self._restrict(cycle)
            witness = (off_tree[0],)
            for j, s in enumerate(self.support):
                self.scans += 1
                if inner_product(restricted, s):
                    self._replace(j, symmetric_difference(s, witness))
            for a, b in zip(off_tree, off_tree[1:]):
                self.support.append(())
                self._replace(len(self.support) - 1, (a, b))
            self.accepted += 1
            return True

        restricted = self._restrict(cycle)
        hits = []
        for j, s in enumerate(self.support):
            self.scans += 1
            if inner_product(restricted, s):
                hits.append(j)
        if not hits:
            return False
        pivot = hits[0]
        witness = self.support[pivot]
        for j in hits[1:]:
            self._replace(j, symmetric_difference(self.support[j], witness))
        self._replace(pivot, ())
        del self.support[pivot]
        self.accepted += 1
        return True


def extract_mcb(
    circuits, nu: int, g: Graph | None = None, apsp=None, kind: str = "MCB"
) -> CycleBasis:
    """Pick ``nu`` independent circuits greedily by weight.

    ``circuits`` holds :class:`CircuitRepresentation` items (expanded lazily
    through ``apsp``) or plain edge-id tuples.  Without ``g`` only tuples are
    accepted and every edge has unit weight.
    """
    items = []
    for c in circuits:
        if isinstance(c, CircuitRepresentation):
            items.append((c.weight, c))
        else:
            c = tuple(sorted(c))
            items.append((g.cycle_weight(c) if g is not None else len(c), c))
    items.sort(key=lambda t: t[0])

    if g is not None:
        oracle = SupportVectorBasis(g)
    else:
        m = 1 + max((e for _, c in items for e in c), default=-1)
        oracle = SupportVectorBasis(edge_count=m)
    chosen = []
    total = 0
    if nu > 0:
        for w, c in items:
            vec = c.expand(g, apsp) if isinstance(c, CircuitRepresentation) else c
            if oracle.offer(vec):
                chosen.append(vec)
                total += w
                if len(chosen) == nu:
                    break
    if len(chosen) < nu:
        raise InsufficientIndependentCircuits(
            f"only {len(chosen)} independent circuits among {len(items)}, need {nu}"
        )
    return CycleBasis(chosen, total, kind, {"support_scans": oracle.scans})
