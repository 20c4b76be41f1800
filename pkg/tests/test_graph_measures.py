import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netpredict.errors import NumericError
from netpredict.graph_measures import (
    betweenness_centrality,
    distances,
    eigenvector_centrality,
    graph_metrics,
    modularity,
    modularity_q,
    summarize,
)
from oracles import betweenness_bruteforce, eigenvector_dense, modularity_bruteforce


def random_graph(rng, n, density=1.0):
    w = rng.uniform(0.05, 1.0, (n, n)) * (rng.random((n, n)) < density)
    w = np.triu(w, 1)
    return w + w.T


def two_cliques(k=5, inner=1.0, bridge=0.01):
    n = 2 * k
    w = np.zeros((n, n))
    w[:k, :k] = inner
    w[k:, k:] = inner
    np.fill_diagonal(w, 0)
    w[k - 1, k] = w[k, k - 1] = bridge
    return w


def test_star_eigenvector_hub_largest():
    w = np.zeros((5, 5))
    w[0, 1:] = w[1:, 0] = 1.0
    v = eigenvector_centrality(w).values
    assert np.argmax(v) == 0
    np.testing.assert_allclose(v[1:], v[1])
    np.testing.assert_allclose(v, eigenvector_dense(w), atol=1e-6)


def test_uniform_graph_equal_centrality():
    w = np.ones((6, 6)) - np.eye(6)
    v = eigenvector_centrality(w).values
    np.testing.assert_allclose(v, 1 / np.sqrt(6), atol=1e-12)
    assert np.all(betweenness_centrality(w).values == 0)


def test_eigenvector_matches_dense():
    rng = np.random.default_rng(0)
    for _ in range(20):
        w = random_graph(rng, int(rng.integers(3, 50)))
        np.testing.assert_allclose(eigenvector_centrality(w).values, eigenvector_dense(w), atol=1e-6)


def test_eigenvector_scale_invariant():
    w = random_graph(np.random.default_rng(1), 12)
    np.testing.assert_allclose(eigenvector_centrality(7.5 * w).values, eigenvector_centrality(w).values, atol=1e-9)


def test_eigenvector_zero_matrix():
    with pytest.raises(ValueError):
        eigenvector_centrality(np.zeros((3, 3)))


def test_eigenvector_iteration_cap():
    with pytest.raises(NumericError):
        eigenvector_centrality(random_graph(np.random.default_rng(2), 10), max_iter=1)


def test_path_middle_node():
    w = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0.0]])
    np.testing.assert_allclose(betweenness_centrality(w).values, [0, 1, 0])


def test_strong_path_beats_weak_direct_edge():
    # 0-1 and 1-2 are strong (short); 0-2 is weak (long), so the path goes via 1
    w = np.array([[0, 1, 0.1], [1, 0, 1], [0.1, 1, 0.0]])
    np.testing.assert_allclose(betweenness_centrality(w).values, [0, 1, 0])


def test_betweenness_matches_enumeration_and_networkx():
    rng = np.random.default_rng(3)
    for _ in range(15):
        n = int(rng.integers(3, 9))
        w = random_graph(rng, n, density=0.6)
        got = betweenness_centrality(w).values
        np.testing.assert_allclose(got, betweenness_bruteforce(w), atol=1e-9)
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_weighted_edges_from((i, j, 1 / w[i, j]) for i in range(n) for j in range(i + 1, n) if w[i, j] > 0)
        ref = nx.betweenness_centrality(g, weight="weight", normalized=True)
        np.testing.assert_allclose(got, [ref[i] for i in range(n)], atol=1e-9)


def test_betweenness_equal_paths_split():
    # square 0-1-2-3-0: each pair of opposite nodes has two shortest paths
    w = np.zeros((4, 4))
    for i in range(4):
        w[i, (i + 1) % 4] = w[(i + 1) % 4, i] = 1.0
    np.testing.assert_allclose(betweenness_centrality(w).values, [1 / 6] * 4)


def test_complement_transform_positive():
    w = random_graph(np.random.default_rng(4), 6)
    d = distances(w, "complement")
    off = d[~np.eye(6, dtype=bool)]
    assert off.min() == 1.0 and off.max() < 2.0
    with pytest.raises(ValueError):
        distances(w, "nope")


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.integers(0, 10**6))
def test_centrality_permutation_equivariant(n, seed):
    rng = np.random.default_rng(seed)
    w = random_graph(rng, n)
    perm = rng.permutation(n)
    wp = w[np.ix_(perm, perm)]
    np.testing.assert_allclose(eigenvector_centrality(wp).values, eigenvector_centrality(w).values[perm], atol=1e-8)
    np.testing.assert_allclose(betweenness_centrality(wp).values, betweenness_centrality(w).values[perm],
                               atol=1e-12)


def test_single_community_q_zero():
    w = random_graph(np.random.default_rng(5), 10)
    assert abs(modularity_q(w, np.zeros(10, int))) <= 1e-12


def test_two_cliques_split():
    w = two_cliques()
    res = modularity(w, seed=0)
    assert len(set(res.partition[:5])) == 1 and len(set(res.partition[5:])) == 1
    assert res.partition[0] != res.partition[5]
    assert res.q == pytest.approx(modularity_bruteforce(w, res.partition), abs=1e-10)


def test_modularity_q_matches_direct_formula():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(3, 15))
        w = random_graph(rng, n)
        part = rng.integers(0, 3, n)
        assert modularity_q(w, part) == pytest.approx(modularity_bruteforce(w, part), abs=1e-12)


def test_modularity_deterministic_and_at_least_singletons():
    w = random_graph(np.random.default_rng(7), 25)
    a, b = modularity(w, seed=3), modularity(w, seed=3)
    np.testing.assert_array_equal(a.partition, b.partition)
    assert a.q >= modularity_q(w, np.arange(25)) - 1e-12


def test_modularity_zero_graph():
    with pytest.raises(ValueError):
        modularity(np.zeros((3, 3)))


def test_graph_metrics_keys():
    out = graph_metrics(two_cliques())
    assert list(out) == ["eig-mean", "eig-median", "eig-max", "btw-mean", "btw-median", "btw-max", "modularity"]
    assert summarize([1, 2, 6]) == (3.0, 2.0, 6.0)
