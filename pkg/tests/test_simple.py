import numpy as np
import pytest

from planted_bench.core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    PlantedParams,
    SubmatrixParams,
    assignments_equal_up_to_relabeling,
    bicluster_to_matrix,
    flip_graph,
)
from planted_bench.gen import (
    derive_seed,
    sample_assignment,
    sample_bicluster_assignment,
    sample_planted_graph,
    sample_submatrix_instance,
)
from planted_bench.simple import (
    CountingThresholds,
    Inconsistent,
    ThresholdingThresholds,
    common_neighbors,
    counting_algorithm,
    elementwise_thresholding,
    submatrix_thresholding,
)


def test_counting_thresholds_formulas():
    params = PlantedParams(n=8, r=2, K=3, p=1.0, q=0.0)
    th = CountingThresholds.from_params(params)
    assert th.degree_threshold == 1.5
    assert th.common_neighbor_threshold == 1.0
    swapped = CountingThresholds.from_params(params, use_non_neighbors=True)
    assert swapped.degree_threshold == 1.5  # step 1 is unchanged
    assert swapped.common_neighbor_threshold == pytest.approx(1.0 + 0.0 + 1.0 * 2)


def _two_cliques(n, K):
    adj = np.zeros((n, n), dtype=bool)
    for base in (0, K):
        for i in range(base, base + K):
            for j in range(i + 1, base + K):
                adj[i, j] = adj[j, i] = True
    return Graph(n, adj)


def test_counting_boundary_case_is_inconsistent():
    # Two triangles plus 2 isolated nodes: within-triangle common-neighbor
    # counts sit exactly at the threshold, and linking is strictly ">", so
    # no pairs link and the components are too small.
    g = _two_cliques(8, 3)
    params = PlantedParams(n=8, r=2, K=3, p=1.0, q=0.0)
    result = counting_algorithm(g, params)
    assert isinstance(result, Inconsistent)


def test_counting_recovers_two_4cliques():
    g = _two_cliques(8, 4)
    params = PlantedParams(n=8, r=2, K=4, p=1.0, q=0.0)
    result = counting_algorithm(g, params)
    truth = ClusterAssignment((1, 1, 1, 1, 2, 2, 2, 2), r=2, K=4)
    assert assignments_equal_up_to_relabeling(result, truth)


def test_counting_degree_boundary_is_not_isolated():
    # Algorithm step 1 isolates on strict "<": a node exactly at the degree
    # threshold stays non-isolated.
    params = PlantedParams(n=4, r=1, K=2, p=1.0, q=0.0)
    th = CountingThresholds.from_params(params)
    assert th.degree_threshold == 1.0
    g = Graph.from_edges(4, [(0, 1)])  # degrees 1, 1, 0, 0
    result = counting_algorithm(g, params)
    assert isinstance(result, ClusterAssignment)
    assert result.labels == (1, 1, 0, 0)


def test_counting_single_cluster_skips_step_two():
    params = PlantedParams(n=400, r=1, K=80, p=0.9, q=0.1)
    truth = sample_assignment(params, derive_seed(61, 0))
    g = sample_planted_graph(params, truth, derive_seed(61, 1))
    result = counting_algorithm(g, params)
    assert isinstance(result, ClusterAssignment)
    assert assignments_equal_up_to_relabeling(result, truth)


def test_counting_requires_p_above_q():
    params = PlantedParams(n=8, r=2, K=3, p=0.1, q=0.9)
    with pytest.raises(ValueError):
        counting_algorithm(_two_cliques(8, 3), params)


def test_counting_permutation_equivariance():
    # Output depends on the graph only through degrees and pair counts, so
    # relabeling the nodes relabels the output.
    params = PlantedParams(n=12, r=2, K=5, p=0.95, q=0.05)
    truth = sample_assignment(params, derive_seed(62, 0))
    g = sample_planted_graph(params, truth, derive_seed(62, 1))
    result = counting_algorithm(g, params)
    rng = np.random.default_rng(0)
    perm = rng.permutation(12)
    adj_p = g.adjacency[np.ix_(perm, perm)]
    result_p = counting_algorithm(Graph(12, adj_p), params)
    if isinstance(result, Inconsistent):
        assert isinstance(result_p, Inconsistent)
    else:
        permuted = [0] * 12
        for new_i, old_i in enumerate(perm):
            permuted[new_i] = result.labels[old_i]
        expected = ClusterAssignment(tuple(permuted), r=2, K=5)
        assert assignments_equal_up_to_relabeling(result_p, expected)


def test_common_neighbors_examples():
    triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert common_neighbors(triangle, 0, 1) == 1
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert common_neighbors(path, 0, 2) == 1
    assert common_neighbors(path, 0, 1) == 0
    empty = Graph(3, np.zeros((3, 3), dtype=bool))
    assert common_neighbors(empty, 0, 2) == 0
    with pytest.raises(ValueError):
        common_neighbors(path, 1, 1)


def test_non_neighbor_variant_matches_flipped_graph_counts():
    # Linking on common non-neighbors with thresholds at (1-p, 1-q) is the
    # neighbor rule applied to the complement graph.
    params = PlantedParams(n=10, r=2, K=4, p=0.9, q=0.2)
    truth = sample_assignment(params, derive_seed(63, 0))
    g = sample_planted_graph(params, truth, derive_seed(63, 1))
    comp = flip_graph(g).adjacency.astype(int)
    s_comp = comp @ comp
    adj = g.adjacency.astype(int)
    non = 1 - adj
    np.fill_diagonal(non, 0)
    s_non = non @ non
    assert np.array_equal(s_comp, s_non)
    th = CountingThresholds.from_params(params, use_non_neighbors=True)
    th_flip = CountingThresholds.from_params(params.flipped())
    assert th.common_neighbor_threshold == pytest.approx(th_flip.common_neighbor_threshold)


def test_counting_non_neighbor_variant_on_dense_graph():
    # Dense cliques in a dense background: the non-neighbor statistic links
    # reliably (calibrated 20/20 over seeds) where the plain one drowns in
    # the 2Kpq variance (calibrated 0/20).
    params = PlantedParams(n=200, r=2, K=100, p=1.0, q=0.6)
    truth = sample_assignment(params, derive_seed(64, 0))
    g = sample_planted_graph(params, truth, derive_seed(64, 1))
    result = counting_algorithm(g, params, use_non_neighbors=True)
    assert isinstance(result, ClusterAssignment)
    assert assignments_equal_up_to_relabeling(result, truth)
    plain = counting_algorithm(g, params, use_non_neighbors=False)
    assert isinstance(plain, Inconsistent)


def test_thresholding_thresholds_formulas():
    params = SubmatrixParams(n_L=10, n_R=20, K_L=2, K_R=4, r=2, mu=0.5)
    th = ThresholdingThresholds.from_params(params)
    assert th.row_threshold == 0.5 * 4 / 2
    assert th.col_threshold == 0.5 * 2 / 2
    assert th.corr_threshold == 0.25 * 4 / 2
    assert th.block_threshold == 0.5 * 2 * 4 / 2
    assert th.element_threshold == 0.25


def test_submatrix_thresholding_noiseless_single_block():
    params = SubmatrixParams(n_L=4, n_R=4, K_L=2, K_R=2, r=1, mu=1.0, noise="none")
    truth = BiClusterAssignment((1, 0, 1, 0), (0, 1, 1, 0))
    a = sample_submatrix_instance(params, truth, 0)
    result = submatrix_thresholding(a, params)
    assert isinstance(result, BiClusterAssignment)
    assert np.array_equal(bicluster_to_matrix(result), bicluster_to_matrix(truth))


def test_submatrix_thresholding_row_boundary_is_isolated():
    # Step 1 isolates on "<=": a row sum exactly at the threshold is isolated.
    params = SubmatrixParams(n_L=2, n_R=2, K_L=1, K_R=1, r=1, mu=2.0, noise="none")
    a = np.array([[1.0, 0.0], [0.0, 0.0]])  # row sum 1.0 == mu*K_R/2
    result = submatrix_thresholding(a, params)
    assert isinstance(result, Inconsistent)


def test_submatrix_thresholding_swapped_pairing():
    params = SubmatrixParams(n_L=4, n_R=4, K_L=2, K_R=2, r=2, mu=1.0, noise="none")
    truth = BiClusterAssignment((1, 1, 2, 2), (2, 2, 1, 1))
    a = sample_submatrix_instance(params, truth, 0)
    result = submatrix_thresholding(a, params)
    assert isinstance(result, BiClusterAssignment)
    assert np.array_equal(bicluster_to_matrix(result), bicluster_to_matrix(truth))


def test_submatrix_thresholding_noise_dominated_fails():
    params = SubmatrixParams(n_L=40, n_R=40, K_L=4, K_R=4, r=2, mu=0.01)
    truth = sample_bicluster_assignment(params, derive_seed(65, 0))
    a = sample_submatrix_instance(params, truth, derive_seed(65, 1))
    result = submatrix_thresholding(a, params)
    ok = (isinstance(result, BiClusterAssignment)
          and np.array_equal(bicluster_to_matrix(result), bicluster_to_matrix(truth)))
    assert not ok


def test_submatrix_thresholding_deterministic():
    params = SubmatrixParams(n_L=30, n_R=30, K_L=5, K_R=5, r=2, mu=1.5)
    truth = sample_bicluster_assignment(params, derive_seed(66, 0))
    a = sample_submatrix_instance(params, truth, derive_seed(66, 1))
    r1 = submatrix_thresholding(a, params)
    r2 = submatrix_thresholding(a, params)
    assert type(r1) is type(r2)
    if isinstance(r1, BiClusterAssignment):
        assert r1 == r2


def test_elementwise_thresholding():
    params = SubmatrixParams(n_L=5, n_R=6, K_L=2, K_R=2, r=2, mu=0.8, noise="none")
    truth = sample_bicluster_assignment(params, 3)
    a = sample_submatrix_instance(params, truth, 4)
    assert np.array_equal(elementwise_thresholding(a, 0.8), bicluster_to_matrix(truth))
    # boundary: an entry exactly at mu/2 rounds to 1
    assert elementwise_thresholding(np.array([[0.4]]), 0.8)[0, 0] == 1.0
    assert elementwise_thresholding(np.array([[0.3999]]), 0.8)[0, 0] == 0.0
    with pytest.raises(ValueError):
        elementwise_thresholding(a, 0.0)


def test_counting_step_one_speed():
    # Step 1 is linear in the edge count; a sparse n=2000 instance is fast.
    import time

    params = PlantedParams(n=2000, r=2, K=200, p=0.05, q=0.01)
    truth = sample_assignment(params, derive_seed(67, 0))
    g = sample_planted_graph(params, truth, derive_seed(67, 1))
    start = time.perf_counter()
    g.degrees()
    assert time.perf_counter() - start < 0.5
