import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TOY_C1, TOY_C2
from cyclebench.errors import DisconnectedGraph, NonPositiveWeight
from cyclebench.graph import (
    Graph,
    cycle_space_dimension,
    gf2_rank,
    inner_product,
    is_circuit,
    is_even_subgraph,
    symmetric_difference,
)
from oracles import all_circuits, dense_gf2_rank, random_connected_edges

vectors = st.lists(st.integers(0, 63), max_size=20, unique=True).map(lambda v: tuple(sorted(v)))


def dense(v, n=64):
    x = np.zeros(n, dtype=bool)
    x[list(v)] = True
    return x


class TestGraph:
    def test_edge_ids_follow_insertion(self):
        g = Graph(3)
        assert g.add_edge(0, 1) == 0
        assert g.add_edge(1, 2, 5) == 1
        assert list(g.edges()) == [(0, 0, 1, 1), (1, 1, 2, 5)]

    def test_loops_and_parallel_edges(self):
        g = Graph(2, [(0, 1), (0, 1), (1, 1)])
        assert g.degree(0) == 2
        assert g.degree(1) == 4

    @pytest.mark.parametrize("w", [0, -1, 1.5])
    def test_rejects_bad_weight(self, w):
        with pytest.raises(NonPositiveWeight):
            Graph(2, [(0, 1, w)])

    def test_rejects_missing_vertex(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 2)])


class TestSymmetricDifference:
    def test_toy_composition(self):
        c3 = symmetric_difference(TOY_C1, TOY_C2)
        assert c3 == (0, 1, 2, 3, 4, 7)

    def test_self_cancels(self):
        assert symmetric_difference(TOY_C1, TOY_C1) == ()

    @given(vectors, vectors)
    def test_matches_dense_xor(self, a, b):
        out = symmetric_difference(a, b)
        assert list(out) == sorted(out)
        assert np.array_equal(dense(out), dense(a) ^ dense(b))

    @given(vectors, vectors, vectors)
    def test_group_laws(self, a, b, c):
        sd = symmetric_difference
        assert sd(sd(a, b), c) == sd(a, sd(b, c))
        assert sd(a, b) == sd(b, a)
        assert sd(a, ()) == a


class TestInnerProduct:
    def test_toy_share_one_edge(self):
        assert inner_product(TOY_C1, TOY_C2) == 1

    def test_empty(self):
        assert inner_product(TOY_C1, ()) == 0

    @given(vectors, vectors)
    def test_matches_intersection_parity(self, a, b):
        assert inner_product(a, b) == len(set(a) & set(b)) % 2

    @given(vectors, vectors, vectors)
    def test_bilinear(self, a, b, c):
        lhs = inner_product(symmetric_difference(a, b), c)
        assert lhs == inner_product(a, c) ^ inner_product(b, c)


class TestCycleSpaceDimension:
    def test_toy(self, toy):
        assert cycle_space_dimension(toy) == 2

    def test_tree(self):
        assert cycle_space_dimension(Graph(4, [(0, 1), (1, 2), (1, 3)])) == 0

    def test_counts_only(self):
        # |E| = 827, |V| = 808: a path plus 20 chords
        edges = [(i, i + 1) for i in range(807)] + [(i, i + 5) for i in range(20)]
        assert cycle_space_dimension(Graph(808, edges)) == 20

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraph):
            cycle_space_dimension(Graph(4, [(0, 1), (2, 3)]))


class TestRank:
    def test_toy(self):
        assert gf2_rank([TOY_C1, TOY_C2], 8) == 2

    def test_dependent(self):
        c3 = symmetric_difference(TOY_C1, TOY_C2)
        assert gf2_rank([TOY_C1, TOY_C2, c3], 8) == 2

    def test_random_sets_match_dense(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            k = int(rng.integers(1, 12))
            dim = int(rng.integers(4, 20))
            vecs = [tuple(sorted(set(rng.integers(dim, size=rng.integers(0, 6)).tolist()))) for _ in range(k)]
            assert gf2_rank(vecs, dim) == dense_gf2_rank(vecs, dim)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            gf2_rank([(0, 9)], 5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_all_circuits_span_cycle_space(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        edges = random_connected_edges(rng, n, int(rng.integers(0, 5)), loops=True, parallel=True)
        g = Graph(n, edges)
        circuits = all_circuits(n, edges)
        assert gf2_rank(circuits, g.edge_count) == cycle_space_dimension(g)
        for a in circuits:
            assert is_circuit(g, a)
            for b in circuits:
                assert is_even_subgraph(g, symmetric_difference(a, b))
