import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gftmpnn.errors import (
    DegenerateFeaturesError,
    DuplicateEdgeError,
    IndexOutOfRangeError,
    LoopEdgeError,
    NonpositiveWeightError,
    NonSquareInputError,
)
from gftmpnn.graph import (
    adjacency_matrix,
    cartesian_product,
    cycle_graph,
    degree_matrix,
    graph_from_json,
    graph_to_json,
    knn_graph,
    kronecker_sum,
    laplacian,
    new_graph,
    path_graph,
)

P2 = new_graph(2, [(0, 1, 1.0)])
C4 = new_graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])


def random_graph(rng, n, p=0.5, dyadic=False):
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            # Multiples of 1/8 add exactly, so matrix identities hold bit for bit.
            w = rng.integers(1, 17) / 8 if dyadic else rng.uniform(0.1, 2.0)
            edges.append((i, j, float(w)))
    return new_graph(n, edges)


def brute_force_product(g1, g2):
    """Weight function of the Cartesian product, evaluated on every vertex pair."""
    w1, w2 = adjacency_matrix(g1), adjacency_matrix(g2)
    n1, n2 = g1.n, g2.n
    edges = []
    for (i1, i2), (j1, j2) in itertools.combinations(itertools.product(range(n1), range(n2)), 2):
        w = w1[i1, j1] * (i2 == j2) + (i1 == j1) * w2[i2, j2]
        if w:
            edges.append((i1 * n2 + i2, j1 * n2 + j2, w))
    return new_graph(n1 * n2, edges)


class TestNewGraph:
    def test_path_and_cycle(self):
        assert P2.n == 2 and P2.edges == ((0, 1, 1.0),)
        assert C4.num_edges == 4
        assert C4 == cycle_graph(4)

    def test_edges_are_canonical(self):
        g = new_graph(3, [(2, 0, 1.5), (1, 0, 2.0)])
        assert g.edges == ((0, 1, 2.0), (0, 2, 1.5))

    @pytest.mark.parametrize("edges, exc", [
        ([(0, 0, 1.0)], LoopEdgeError),
        ([(0, 1, 1.0), (1, 0, 2.0)], DuplicateEdgeError),
        ([(0, 2, 1.0)], IndexOutOfRangeError),
        ([(-1, 0, 1.0)], IndexOutOfRangeError),
        ([(0, 1, 0.0)], NonpositiveWeightError),
        ([(0, 1, -1.0)], NonpositiveWeightError),
        ([(0, 1, float("nan"))], NonpositiveWeightError),
    ])
    def test_rejects(self, edges, exc):
        with pytest.raises(exc):
            new_graph(2, edges)

    def test_json_round_trip(self):
        g = random_graph(np.random.default_rng(3), 7)
        assert graph_from_json(graph_to_json(g)) == g


class TestMatrices:
    def test_adjacency(self):
        np.testing.assert_array_equal(adjacency_matrix(P2), [[0, 1], [1, 0]])
        w = adjacency_matrix(C4)
        np.testing.assert_array_equal(w, w.T)
        np.testing.assert_array_equal(w.sum(axis=1), [2, 2, 2, 2])
        np.testing.assert_array_equal(adjacency_matrix(new_graph(1, [])), [[0]])

    def test_laplacian_by_hand(self):
        np.testing.assert_array_equal(laplacian(P2), [[1, -1], [-1, 1]])
        expected = np.array([[2, -1, 0, -1], [-1, 2, -1, 0], [0, -1, 2, -1], [-1, 0, -1, 2]])
        np.testing.assert_array_equal(laplacian(C4), expected)
        np.testing.assert_array_equal(laplacian(new_graph(3, [])), np.zeros((3, 3)))

    def test_weighted_degrees(self):
        g = new_graph(3, [(0, 1, 0.5), (0, 2, 2.0)])
        np.testing.assert_array_equal(np.diag(degree_matrix(g)), [2.5, 0.5, 2.0])

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 20), seed=st.integers(0, 10_000))
    def test_laplacian_symmetric_zero_row_sums(self, n, seed):
        g = random_graph(np.random.default_rng(seed), n)
        lap = laplacian(g)
        np.testing.assert_array_equal(lap, lap.T)
        max_deg = max(1.0, float(np.max(np.diag(lap))))
        assert np.max(np.abs(lap.sum(axis=1))) <= 1e-12 * max_deg


class TestCartesianProduct:
    def test_p2_p2_is_c4(self):
        prod = cartesian_product(P2, P2)
        assert prod == brute_force_product(P2, P2)
        # 4-cycle 0-1-3-2-0 under lexicographic numbering.
        assert prod == new_graph(4, [(0, 1, 1), (1, 3, 1), (3, 2, 1), (2, 0, 1)])
        eig = np.sort(np.linalg.eigvalsh(laplacian(prod)))
        np.testing.assert_allclose(eig, np.sort(np.linalg.eigvalsh(laplacian(C4))), atol=1e-12)

    def test_single_vertex_factor(self):
        g = random_graph(np.random.default_rng(0), 5)
        assert cartesian_product(g, new_graph(1, [])) == g
        assert cartesian_product(new_graph(1, []), g) == g

    def test_p2_p3_grid(self):
        prod = cartesian_product(P2, path_graph(3))
        assert prod.n == 6 and prod.num_edges == 7
        assert prod == brute_force_product(P2, path_graph(3))

    @settings(max_examples=30, deadline=None)
    @given(n1=st.integers(1, 6), n2=st.integers(1, 6), seed=st.integers(0, 10_000))
    def test_matches_enumeration_and_kronecker_sums(self, n1, n2, seed):
        rng = np.random.default_rng(seed)
        g1, g2 = random_graph(rng, n1, dyadic=True), random_graph(rng, n2, dyadic=True)
        prod = cartesian_product(g1, g2)
        assert prod == brute_force_product(g1, g2)
        assert prod.num_edges == n1 * g2.num_edges + n2 * g1.num_edges
        np.testing.assert_array_equal(adjacency_matrix(prod),
                                      kronecker_sum(adjacency_matrix(g1), adjacency_matrix(g2)))
        np.testing.assert_array_equal(degree_matrix(prod),
                                      kronecker_sum(degree_matrix(g1), degree_matrix(g2)))
        np.testing.assert_array_equal(laplacian(prod), kronecker_sum(laplacian(g1), laplacian(g2)))

    @settings(max_examples=30, deadline=None)
    @given(n1=st.integers(1, 6), n2=st.integers(1, 6), seed=st.integers(0, 10_000))
    def test_kronecker_sums_real_weights(self, n1, n2, seed):
        # Degree sums are accumulated in a different order on each side.
        rng = np.random.default_rng(seed)
        g1, g2 = random_graph(rng, n1), random_graph(rng, n2)
        prod = cartesian_product(g1, g2)
        np.testing.assert_array_equal(adjacency_matrix(prod),
                                      kronecker_sum(adjacency_matrix(g1), adjacency_matrix(g2)))
        np.testing.assert_allclose(laplacian(prod), kronecker_sum(laplacian(g1), laplacian(g2)),
                                   rtol=0, atol=1e-12 * max(1.0, np.abs(laplacian(prod)).max()))


class TestKroneckerSum:
    def test_laplacians_of_p2(self):
        lhs = kronecker_sum(laplacian(P2), laplacian(P2))
        np.testing.assert_array_equal(lhs, laplacian(cartesian_product(P2, P2)))

    def test_zero_scalar_is_identity(self):
        a = np.random.default_rng(1).normal(size=(3, 3))
        np.testing.assert_array_equal(kronecker_sum(a, np.zeros((1, 1))), a)

    def test_scalars_add(self):
        np.testing.assert_array_equal(kronecker_sum([[2.0]], [[3.0]]), [[5.0]])

    def test_non_square(self):
        with pytest.raises(NonSquareInputError):
            kronecker_sum(np.zeros((2, 3)), np.eye(2))


class TestKnnGraph:
    def test_collinear_points(self):
        x = np.array([[0.0], [1.0], [3.0]])
        assert knn_graph(x, k=1, metric="euclidean") == path_graph(3)

    def test_two_points(self):
        assert knn_graph(np.array([[0.0, 1.0], [1.0, 0.0]]), k=1) == P2

    def test_duplicate_rows_tie_break(self):
        # Every point has two candidates at distance 0; the smaller index wins:
        # 0 -> 1, 1 -> 0, 2 -> 0.
        x = np.ones((3, 2))
        g = knn_graph(x, k=1, metric="euclidean")
        assert g.edges == ((0, 1, 1.0), (0, 2, 1.0))

    def test_all_identical_cosine(self):
        with pytest.raises(DegenerateFeaturesError):
            knn_graph(np.ones((4, 3)), k=2, metric="cosine")

    def test_zero_rows_cluster_under_cosine(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [2.0, 0.1]])
        g = knn_graph(x, k=1, metric="cosine")
        assert (0, 2, 1.0) in g.edges and (1, 3, 1.0) in g.edges

    def test_deterministic_and_union_symmetrised(self):
        x = np.random.default_rng(7).normal(size=(30, 4))
        g = knn_graph(x, k=3)
        assert g == knn_graph(x.copy(), k=3)
        degrees = np.count_nonzero(adjacency_matrix(g), axis=1)
        assert degrees.min() >= 3
