import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planted_bench.core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    PlantedParams,
    SubmatrixParams,
    assignment_to_cluster_matrix,
    assignments_equal_up_to_relabeling,
    bicluster_to_matrix,
    flip_graph,
    matrix_from_json,
    matrix_to_json,
)


def test_planted_params_accessors():
    p = PlantedParams(n=10, r=2, K=3, p=0.8, q=0.2)
    assert p.n_clustered == 6
    assert p.n_isolated == 4


@pytest.mark.parametrize("kwargs", [
    dict(n=5, r=2, K=3, p=0.5, q=0.1),     # rK > n
    dict(n=10, r=2, K=3, p=1.2, q=0.1),    # p out of range
    dict(n=10, r=2, K=3, p=0.5, q=-0.1),   # q out of range
    dict(n=10, r=2, K=3, p=0.3, q=0.3),    # p == q carries no signal
    dict(n=0, r=1, K=1, p=0.5, q=0.1),
])
def test_planted_params_rejects(kwargs):
    with pytest.raises(ValueError):
        PlantedParams(**kwargs)


def test_cluster_assignment_validation():
    ClusterAssignment((1, 1, 2, 2, 0), r=2, K=2)
    with pytest.raises(ValueError):
        ClusterAssignment((1, 1, 2, 0, 0), r=2, K=2)
    with pytest.raises(ValueError):
        ClusterAssignment((1, 1, 3, 3, 0), r=2, K=2)


def test_cluster_assignment_clusters_and_isolated():
    a = ClusterAssignment((2, 1, 0, 1, 2), r=2, K=2)
    assert a.clusters() == [[1, 3], [0, 4]]
    assert a.isolated_nodes() == [2]
    assert a.canonical().labels == (1, 2, 0, 2, 1)


@pytest.mark.parametrize("labels,diagonal_one,expected", [
    ([1, 1, 0], True, [[1, 1, 0], [1, 1, 0], [0, 0, 0]]),
    ([1, 2], False, [[0, 0], [0, 0]]),
    ([1, 1, 2, 2], True,
     [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]),
])
def test_assignment_to_cluster_matrix(labels, diagonal_one, expected):
    r = max(labels)
    K = labels.count(1)
    a = ClusterAssignment(tuple(labels), r=r, K=K)
    y = assignment_to_cluster_matrix(a, diagonal_one=diagonal_one)
    assert np.array_equal(y, np.asarray(expected, dtype=float))


def test_cluster_matrix_rank_equals_r():
    a = ClusterAssignment((1, 1, 2, 2, 3, 3, 0), r=3, K=2)
    y = assignment_to_cluster_matrix(a, diagonal_one=True)
    assert np.linalg.matrix_rank(y) == 3


@pytest.mark.parametrize("a,b,expected", [
    ((1, 1, 2, 2), (2, 2, 1, 1), True),
    ((1, 1, 2, 2), (1, 2, 1, 2), False),
    ((1, 1, 0), (1, 0, 1), False),
])
def test_equal_up_to_relabeling(a, b, expected):
    r = max(a)
    K = a.count(1)
    aa = ClusterAssignment(a, r=r, K=K)
    bb = ClusterAssignment(b, r=r, K=K)
    assert assignments_equal_up_to_relabeling(aa, bb) is expected


def test_equal_up_to_relabeling_rejects_mismatched_shapes():
    a = ClusterAssignment((1, 1), r=1, K=2)
    b = ClusterAssignment((1, 1, 0), r=1, K=2)
    with pytest.raises(ValueError):
        assignments_equal_up_to_relabeling(a, b)


@st.composite
def _assignments(draw):
    r = draw(st.integers(1, 3))
    K = draw(st.integers(1, 3))
    extra = draw(st.integers(0, 3))
    n = r * K + extra
    labels = [m + 1 for m in range(r) for _ in range(K)] + [0] * extra
    perm = draw(st.permutations(labels))
    return ClusterAssignment(tuple(perm), r=r, K=K)


@settings(max_examples=60)
@given(_assignments(), st.randoms(use_true_random=False))
def test_relabeling_equality_is_an_equivalence(a, rnd):
    assert assignments_equal_up_to_relabeling(a, a)  # reflexive
    perm = list(range(1, a.r + 1))
    rnd.shuffle(perm)
    b = ClusterAssignment(tuple(perm[x - 1] if x > 0 else 0 for x in a.labels),
                          r=a.r, K=a.K)
    perm2 = list(range(1, a.r + 1))
    rnd.shuffle(perm2)
    c = ClusterAssignment(tuple(perm2[x - 1] if x > 0 else 0 for x in b.labels),
                          r=a.r, K=a.K)
    # symmetric and transitive across label permutations
    assert assignments_equal_up_to_relabeling(a, b)
    assert assignments_equal_up_to_relabeling(b, a)
    assert assignments_equal_up_to_relabeling(b, c)
    assert assignments_equal_up_to_relabeling(a, c)


def test_graph_validation():
    adj = np.zeros((3, 3), dtype=bool)
    adj[0, 1] = True
    with pytest.raises(ValueError):
        Graph(3, adj)  # asymmetric
    adj[1, 0] = True
    g = Graph(3, adj)
    assert g.edge_count() == 1
    assert g.edges() == [(0, 1)]
    bad = np.eye(3, dtype=bool)
    with pytest.raises(ValueError):
        Graph(3, bad)  # nonzero diagonal


def test_graph_is_immutable():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.adjacency[0, 2] = True


def test_flip_graph_examples():
    empty = Graph(3, np.zeros((3, 3), dtype=bool))
    triangle = flip_graph(empty)
    assert triangle.edge_count() == 3
    assert flip_graph(triangle).edge_count() == 0


def test_flip_graph_involution_on_random_graph():
    rng = np.random.default_rng(5)
    m = rng.random((10, 10)) < 0.4
    adj = np.triu(m, 1)
    adj = adj | adj.T
    g = Graph(10, adj)
    gg = flip_graph(flip_graph(g))
    assert np.array_equal(gg.adjacency, g.adjacency)
    f = flip_graph(g)
    assert np.array_equal(f.adjacency, f.adjacency.T)
    assert not np.diag(f.adjacency).any()


def test_submatrix_params_validation():
    SubmatrixParams(n_L=6, n_R=8, K_L=2, K_R=3, r=2, mu=0.5)
    with pytest.raises(ValueError):
        SubmatrixParams(n_L=6, n_R=8, K_L=4, K_R=3, r=2, mu=0.5)  # rK_L > n_L
    with pytest.raises(ValueError):
        SubmatrixParams(n_L=6, n_R=8, K_L=2, K_R=3, r=2, mu=0.0)  # mu <= 0
    p = SubmatrixParams(n_L=6, n_R=8, K_L=2, K_R=3, r=2, mu=0.5)
    assert p.n == 8


def test_bicluster_assignment_validation():
    BiClusterAssignment((1, 2, 0), (2, 1))
    with pytest.raises(ValueError):
        BiClusterAssignment((1, 1, 2), (1, 1))  # label 2 missing on the right
    with pytest.raises(ValueError):
        BiClusterAssignment((1, 1, 2), (1, 2))  # unequal left sizes


@pytest.mark.parametrize("left,right,expected", [
    ((1, 0), (1, 0), [[1, 0], [0, 0]]),
    ((1, 2), (2, 1), [[0, 1], [1, 0]]),
    ((0, 0), (0, 0), [[0, 0], [0, 0]]),
])
def test_bicluster_to_matrix(left, right, expected):
    b = BiClusterAssignment(left, right)
    assert np.array_equal(bicluster_to_matrix(b), np.asarray(expected, dtype=float))


def test_bicluster_matrix_ones_count():
    b = BiClusterAssignment((1, 1, 2, 2, 0), (2, 2, 1, 1, 0, 0))
    y = bicluster_to_matrix(b)
    assert y.sum() == b.r * b.K_L * b.K_R == 8


def test_json_round_trips():
    p = PlantedParams(n=10, r=2, K=3, p=0.8, q=0.2)
    assert PlantedParams.from_json(p.to_json()) == p
    a = ClusterAssignment((1, 1, 2, 2, 0), r=2, K=2)
    assert ClusterAssignment.from_json(a.to_json()) == a
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert np.array_equal(Graph.from_json(g.to_json()).adjacency, g.adjacency)
    sp = SubmatrixParams(n_L=6, n_R=8, K_L=2, K_R=3, r=2, mu=0.5, noise="rademacher")
    assert SubmatrixParams.from_json(sp.to_json()) == sp
    b = BiClusterAssignment((1, 2, 0), (2, 1))
    assert BiClusterAssignment.from_json(b.to_json()) == b
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)


def test_matrix_json_rejects_nonfinite():
    with pytest.raises(ValueError):
        matrix_to_json(np.array([[np.nan, 0.0]]))
