import itertools

import numpy as np
import pytest

from conftest import TOY_C1, TOY_C2, TOY_EDGES
from cyclebench.errors import InsufficientIndependentCircuits, NonPositiveWeight, OutOfBudget
from cyclebench.graph import Graph, cycle_space_dimension, gf2_rank, is_circuit
from cyclebench.mcb import (
    CycleBasis,
    available_kernels,
    consistent_apsp,
    extract_mcb,
    fundamental_cycle_basis,
    isometric_set,
    lex_dijkstra,
    minimum_cycle_basis,
    reconstruct_mcb,
    representation_digraph,
    smooth_degree_two,
)
from cyclebench.mcb.isometric import ring_components
from oracles import brute_force_mcb_weight, lexicographic_path, random_connected_edges

KERNELS = sorted(available_kernels())


def path_vertices(g, apsp, u, v):
    """Vertex sequence u .. v of the stored path."""
    seq = [v]
    x = v
    while x != u:
        x = int(apsp.parent_vertex[u, x])
        seq.append(x)
    return seq[::-1]


def random_graph(seed, n_max=9, extra_max=5, weight=3, loops=False, parallel=False):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max))
    edges = random_connected_edges(rng, n, int(rng.integers(0, extra_max + 1)), weight, loops, parallel)
    return n, edges


class TestSmoothing:
    def test_chain_reduction(self, chain):
        red = smooth_degree_two(chain)
        h = red.graph
        assert (h.vertex_count, h.edge_count) == (3, 4)
        assert sorted(h.weight) == [1, 1, 3, 4]
        loops = [k for k, u, v, _ in h.edges() if u == v]
        assert len(loops) == 1 and h.weight[loops[0]] == 4
        pairs = [tuple(sorted((u, v))) for _, u, v, _ in h.edges() if u != v]
        assert len(pairs) - len(set(pairs)) == 1  # one parallel pair
        assert cycle_space_dimension(h) == cycle_space_dimension(chain) == 2

    def test_chain_loop_expands_to_square(self, chain):
        red = smooth_degree_two(chain)
        loop = next(k for k, u, v, _ in red.graph.edges() if u == v)
        # e34, e45, e56, e63
        assert red.expand((loop,)) == (2, 3, 4, 5)

    def test_chain_reconstruct(self, chain):
        basis = minimum_cycle_basis(chain)
        assert basis.nu == 2
        assert gf2_rank(basis.cycles, chain.edge_count) == 2
        assert sorted(len(c) for c in basis.cycles) == [4, 4]

    def test_no_degree_two_is_identity(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)])
        red = smooth_degree_two(g)
        assert red.graph.edge_count == g.edge_count
        assert [c for c in red.chain_map] == [((k, True),) for k in range(6)] or all(
            len(c) == 1 for c in red.chain_map
        )
        assert sorted(e for c in red.chain_map for e, _ in c) == list(range(6))
        basis = CycleBasis([(0, 1, 3)], 3)
        assert reconstruct_mcb(basis, red).cycles[0] == tuple(
            sorted(red.chain_map[k][0][0] for k in (0, 1, 3))
        )

    def test_ring_with_chords_keeps_nu(self):
        rng = np.random.default_rng(3)
        n = 200
        edges = [(i, (i + 1) % n) for i in range(n)]
        for _ in range(15):
            u, v = rng.integers(n, size=2)
            if u != v:
                edges.append((int(u), int(v)))
        g = Graph(n, edges)
        red = smooth_degree_two(g)
        assert cycle_space_dimension(red.graph) == cycle_space_dimension(g)
        assert sum(red.graph.weight) == g.edge_count

    def test_whole_graph_cycle(self):
        g = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
        red = smooth_degree_two(g)
        assert red.graph.vertex_count == 1
        assert red.graph.weight == [5]
        b = minimum_cycle_basis(g)
        assert b.cycles == [(0, 1, 2, 3, 4)] and b.total_weight == 5


@pytest.mark.parametrize("kernel", KERNELS)
class TestLexDijkstra:
    def test_toy_tie_break(self, toy, kernel):
        f = lex_dijkstra(toy, 4, kernel)  # source v5
        assert sorted(f.path(0)) == [0, 6]  # {e12, e25}
        assert f.dist[0] == 2 and f.hops[0] == 2

    def test_single_edge(self, kernel):
        f = lex_dijkstra(Graph(2, [(0, 1, 7)]), 0, kernel)
        assert f.path(1) == [0] and f.dist[1] == 7

    def test_matches_exhaustive_enumeration(self, kernel):
        for seed in range(100):
            n, edges = random_graph(seed, n_max=9, extra_max=6, weight=2, parallel=True)
            g = Graph(n, edges)
            apsp = consistent_apsp(g, kernel=kernel)
            for s in range(n):
                for t in range(n):
                    if s == t:
                        continue
                    assert sorted(apsp.path(s, t)) == lexicographic_path(n, edges, s, t), (seed, s, t)

    def test_parent_invariant(self, kernel):
        n, edges = random_graph(11, n_max=30, extra_max=20, weight=5)
        g = Graph(n, edges)
        apsp = consistent_apsp(g, kernel=kernel)
        for s in range(n):
            for v in range(n):
                if v == s:
                    continue
                p, e = apsp.parent_vertex[s, v], apsp.parent_edge[s, v]
                assert apsp.dist[s, v] == apsp.dist[s, p] + g.weight[e]
                assert apsp.hops[s, v] == apsp.hops[s, p] + 1

    def test_rejects_nonpositive(self, kernel):
        g = Graph(2, [(0, 1)])
        g.weight[0] = 0
        with pytest.raises(NonPositiveWeight):
            lex_dijkstra(g, 0, kernel)


class TestConsistentAPSP:
    @pytest.mark.parametrize("seed", range(50))
    def test_subpath_consistency(self, seed):
        n, edges = random_graph(seed, n_max=14, extra_max=10, weight=3, parallel=True)
        g = Graph(n, edges)
        apsp = consistent_apsp(g)
        for u in range(n):
            for v in range(n):
                seq = path_vertices(g, apsp, u, v)
                pos = {x: i for i, x in enumerate(seq)}
                for s, t in itertools.combinations(seq, 2):
                    a, b = sorted((pos[s], pos[t]))
                    sub = path_vertices(g, apsp, seq[a], seq[b])
                    assert sub == seq[a:b + 1]

    def test_symmetric_paths(self):
        n, edges = random_graph(5, n_max=20, extra_max=15, weight=2, parallel=True)
        g = Graph(n, edges)
        apsp = consistent_apsp(g)
        for u in range(n):
            for v in range(n):
                assert sorted(apsp.path(u, v)) == sorted(apsp.path(v, u))

    def test_tree_paths(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (1, 4)])
        apsp = consistent_apsp(g)
        assert sorted(apsp.path(3, 4)) == [1, 2, 3]

    def test_toy_contains_subpath(self, toy):
        apsp = consistent_apsp(toy)
        p14 = path_vertices(toy, apsp, 0, 3)
        assert p14 == [0, 1, 2, 3]
        assert apsp.path(1, 2) == [1]

    def test_threads_agree(self):
        n, edges = random_graph(9, n_max=60, extra_max=40, weight=4)
        g = Graph(n, edges)
        a = consistent_apsp(g, threads=1)
        b = consistent_apsp(g, threads=3)
        assert np.array_equal(a.parent_edge, b.parent_edge)

    def test_kernels_agree(self):
        if len(KERNELS) < 2:
            pytest.skip("compiled kernel not built")
        n, edges = random_graph(4, n_max=80, extra_max=60, weight=4, parallel=True)
        g = Graph(n, edges)
        a = consistent_apsp(g, kernel="python")
        b = consistent_apsp(g, kernel="cython")
        for name in ("dist", "hops", "parent_edge", "parent_vertex"):
            assert np.array_equal(getattr(a, name), getattr(b, name))

    def test_vertex_cap(self, toy):
        with pytest.raises(OutOfBudget):
            consistent_apsp(toy, vertex_cap=3)


def representations_of(g, apsp, dg, cycle):
    reps = []
    for r in np.flatnonzero(dg.candidate):
        x, e = dg.split(r)
        u, v = g.eu[e], g.ev[e]
        expanded = tuple(sorted(apsp.path(x, u) + apsp.path(x, v) + [e]))
        if expanded == cycle:
            reps.append(int(r))
    return reps


class TestIsometricSet:
    def test_toy(self, toy):
        apsp = consistent_apsp(toy)
        circuits = isometric_set(toy, apsp)
        cycles = sorted(c.expand(toy, apsp) for c in circuits)
        assert cycles == sorted([TOY_C1, TOY_C2])
        # the 6-cycle is not isometric: the stored v2-v5 path is e25
        assert apsp.path(1, 4) == [6]
        dg = representation_digraph(toy, apsp)
        for c in cycles:
            assert len(representations_of(toy, apsp, dg, c)) == 4

    def test_triangle(self, triangle):
        apsp = consistent_apsp(triangle)
        circuits = isometric_set(triangle, apsp)
        assert len(circuits) == 1
        dg = representation_digraph(triangle, apsp)
        rings = [r for r, closed in ring_components(dg) if closed]
        assert len(rings) == 1 and len(rings[0]) == 3

    @pytest.mark.parametrize("seed", range(20))
    def test_double_linked_rings(self, seed):
        n, edges = random_graph(100 + seed, n_max=10, extra_max=7, weight=2, parallel=True)
        g = Graph(n, edges)
        apsp = consistent_apsp(g)
        dg = representation_digraph(g, apsp)
        for c in isometric_set(g, apsp):
            cycle = c.expand(g, apsp)
            assert is_circuit(g, cycle)
            if len(cycle) == 1:
                continue
            reps = representations_of(g, apsp, dg, cycle)
            assert len(reps) == len(cycle)
            members = set(reps)
            for r in reps:
                a, b = dg.succ[r]
                assert {int(a), int(b)} <= members
                assert a != b or len(cycle) == 2
                for s in (a, b):
                    assert r in dg.succ[s]

    @pytest.mark.parametrize("seed", range(50))
    def test_contains_an_mcb(self, seed):
        n, edges = random_graph(200 + seed, n_max=9, extra_max=8, weight=3, loops=True, parallel=True)
        g = Graph(n, edges)
        apsp = consistent_apsp(g)
        nu = cycle_space_dimension(g)
        basis = extract_mcb(isometric_set(g, apsp), nu, g, apsp)
        assert basis.total_weight == brute_force_mcb_weight(n, edges)[0]


class TestExtract:
    def test_toy(self, toy):
        apsp = consistent_apsp(toy)
        basis = extract_mcb(isometric_set(toy, apsp), 2, toy, apsp)
        assert sorted(basis.cycles) == sorted([TOY_C1, TOY_C2])
        assert basis.total_weight == 8

    def test_triangle(self, triangle):
        basis = extract_mcb([(0, 1, 2)], 1, triangle)
        assert basis.cycles == [(0, 1, 2)] and basis.total_weight == 3

    def test_plain_tuples_without_graph(self):
        c3 = (0, 1, 2, 3, 4, 7)
        basis = extract_mcb([c3, TOY_C1, TOY_C2], 2)
        assert basis.total_weight == 8

    def test_insufficient(self, toy):
        with pytest.raises(InsufficientIndependentCircuits):
            extract_mcb([TOY_C1, TOY_C1], 2, toy)

    def test_order_invariant_weight(self):
        rng = np.random.default_rng(0)
        for seed in range(20):
            n, edges = random_graph(300 + seed, n_max=10, extra_max=8, weight=1)
            g = Graph(n, edges)
            apsp = consistent_apsp(g)
            nu = cycle_space_dimension(g)
            cycles = [c.expand(g, apsp) for c in isometric_set(g, apsp)]
            ref = extract_mcb(cycles, nu, g).total_weight
            for _ in range(3):
                perm = [cycles[i] for i in rng.permutation(len(cycles))]
                assert extract_mcb(perm, nu, g).total_weight == ref


class TestFundamentalBasis:
    def test_triangle(self, triangle):
        assert fundamental_cycle_basis(triangle).cycles == [(0, 1, 2)]

    def test_toy_dfs_tree(self, toy):
        basis = fundamental_cycle_basis(toy)
        assert basis.kind == "FCB"
        assert basis.cycles == [(1, 2, 3, 6), (0, 1, 2, 3, 4, 7)]

    @pytest.mark.parametrize("seed", range(20))
    def test_rank(self, seed):
        n, edges = random_graph(400 + seed, n_max=15, extra_max=12, loops=True, parallel=True)
        g = Graph(n, edges)
        basis = fundamental_cycle_basis(g)
        assert gf2_rank(basis.cycles, g.edge_count) == cycle_space_dimension(g)
        assert all(is_circuit(g, c) for c in basis.cycles)


class TestMinimumCycleBasis:
    def test_toy(self, toy):
        basis = minimum_cycle_basis(toy)
        assert basis.nu == 2 and basis.total_weight == 8
        assert sorted(basis.cycles) == sorted([TOY_C1, TOY_C2])
        assert set(basis.meta["timings"]) >= {"smoothing", "apsp", "isometric", "independence"}

    def test_tree(self):
        basis = minimum_cycle_basis(Graph(3, [(0, 1), (1, 2)]))
        assert basis.nu == 0 and basis.cycles == []

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_oracle_weights(self, kernel):
        for seed in range(40):
            n, edges = random_graph(500 + seed, n_max=10, extra_max=8, weight=4, loops=True, parallel=True)
            g = Graph(n, edges)
            basis = minimum_cycle_basis(g, kernel=kernel)
            assert basis.total_weight == brute_force_mcb_weight(n, edges)[0]
            assert gf2_rank(basis.cycles, g.edge_count) == basis.nu == cycle_space_dimension(g)
            assert all(is_circuit(g, c) for c in basis.cycles)

    def test_networkx_cross_check(self):
        nx = pytest.importorskip("networkx")
        rng = np.random.default_rng(1)
        for seed in range(30):
            G = nx.gnm_random_graph(25, 45, seed=seed)
            if not nx.is_connected(G):
                continue
            edges = [(u, v, int(rng.integers(1, 6))) for u, v in G.edges()]
            H = nx.Graph()
            H.add_weighted_edges_from(edges)
            ref = sum(
                sum(H[c[i]][c[(i + 1) % len(c)]]["weight"] for i in range(len(c)))
                for c in nx.minimum_cycle_basis(H, weight="weight")
            )
            assert minimum_cycle_basis(Graph(25, edges)).total_weight == ref

    def test_not_heavier_than_fcb(self):
        for seed in range(20):
            n, edges = random_graph(600 + seed, n_max=30, extra_max=25, weight=3)
            g = Graph(n, edges)
            assert minimum_cycle_basis(g).total_weight <= fundamental_cycle_basis(g).total_weight

    def test_basis_arcs_are_shortest(self):
        rng = np.random.default_rng(5)
        n, edges = random_graph(700, n_max=25, extra_max=20, weight=3)
        g = Graph(n, edges)
        apsp = consistent_apsp(g)
        for c in minimum_cycle_basis(g).cycles:
            verts = sorted({g.eu[e] for e in c} | {g.ev[e] for e in c})
            if len(verts) < 2:
                continue
            u, v = rng.choice(verts, size=2, replace=False)
            # walk the circuit from u; the shorter arc to v must be a shortest path
            arc, total, x, prev = 0, g.cycle_weight(c), int(u), None
            while x != v:
                e = next(e for e in c if e != prev and x in (g.eu[e], g.ev[e]))
                arc += g.weight[e]
                x, prev = g.other(e, x), e
            assert min(arc, total - arc) == apsp.dist[u, v]

    def test_dump_roundtrip(self, toy):
        basis = minimum_cycle_basis(toy)
        text = basis.dumps()
        assert text.splitlines()[0] == "nu 2 weight 8"
        again = CycleBasis.loads(text)
        assert again.cycles == basis.cycles and again.total_weight == 8


def test_toy_edge_list_layout():
    assert len(TOY_EDGES) == 8
