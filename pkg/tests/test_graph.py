import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trojanprop.graph import (
    EdgeListError,
    Graph,
    clustering_all,
    clustering_coefficient,
    generate_synthetic,
    graph_stats,
    load_edge_list,
    powerlaw_exponent,
    save_edge_list,
)


def _load(text: str) -> Graph:
    return load_edge_list(io.StringIO(text))


def test_triangle_file():
    g = _load("0 1\n1 2\n0 2\n")
    assert g.node_count == 3
    assert g.edge_count == 3
    assert list(g.degree) == [2, 2, 2]


def test_dedup_and_self_loops():
    g = _load("0 1\n1 0\n2 2\n")
    assert g.node_count == 3
    assert g.edge_count == 1
    assert g.self_loops_dropped == 1
    assert g.duplicates_merged == 1
    assert g.degree[2] == 0


def test_comments_blank_lines_and_bytes():
    g = load_edge_list(io.BytesIO(b"# header\n\n10 20\n20\t30\n"))
    assert g.node_count == 3
    assert list(g.labels) == [10, 20, 30]
    assert g.edge_count == 2


def test_malformed_line_reports_line_number():
    with pytest.raises(EdgeListError, match="line 2"):
        _load("0 1\n1 x\n")
    with pytest.raises(EdgeListError, match="line 1"):
        _load("5\n")


def test_empty_graph_rejected():
    with pytest.raises(EdgeListError):
        _load("# nothing here\n")


def test_neighbors_out_of_range(triangle):
    with pytest.raises(IndexError):
        triangle.neighbors(3)


def test_save_load_roundtrip(tmp_path, small_graph):
    path = tmp_path / "g.txt"
    save_edge_list(small_graph, path)
    g2 = load_edge_list(path)
    assert np.array_equal(small_graph.edges(), g2.edges())
    path2 = tmp_path / "g2.txt"
    save_edge_list(g2, path2)
    assert path.read_bytes() == path2.read_bytes()


# clustering


def test_clustering_triangle(triangle):
    assert all(clustering_coefficient(triangle, v) == 1.0 for v in range(3))


def test_clustering_star_center():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert clustering_coefficient(g, 0) == 0.0


def test_clustering_cycle_with_chord():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    assert clustering_coefficient(g, 0) == pytest.approx(2 * 2 / (3 * 2))


def _clustering_bruteforce(g: Graph, v: int) -> float:
    nb = list(g.neighbors(v))
    k = len(nb)
    if k < 2:
        return 0.0
    es = {tuple(e) for e in g.edges().tolist()}
    f = sum((min(a, b), max(a, b)) in es for a, b in itertools.combinations(nb, 2))
    return 2 * f / (k * (k - 1))


def test_clustering_vectorised_matches_bruteforce(small_graph):
    vec = clustering_all(small_graph)
    for v in range(small_graph.node_count):
        assert vec[v] == pytest.approx(_clustering_bruteforce(small_graph, v), abs=1e-12)
        assert clustering_coefficient(small_graph, v) == pytest.approx(vec[v], abs=1e-12)


# path statistics


def test_stats_triangle(triangle):
    s = graph_stats(triangle)
    assert s.avg_clustering == 1.0
    assert s.avg_shortest_path == 1.0
    assert s.diameter == 1


def test_stats_path_graph():
    s = graph_stats(Graph.from_edges(3, [(0, 1), (1, 2)]))
    assert s.avg_shortest_path == pytest.approx((1 + 1 + 2) / 3)
    assert s.diameter == 2


def _floyd_warshall(g: Graph) -> np.ndarray:
    n = g.node_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in g.edges():
        d[u, v] = d[v, u] = 1
    for k in range(n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_paths_match_floyd_warshall(seed):
    g = generate_synthetic(150 + 20 * seed, 2, 0.3, seed)
    d = _floyd_warshall(g)
    n = g.node_count
    s = graph_stats(g)
    assert s.diameter == int(d.max())
    assert s.avg_shortest_path == pytest.approx(d.sum() / (n * (n - 1)), rel=1e-12)


def test_disconnected_uses_largest_component():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    s = graph_stats(g)
    assert not s.connected
    assert s.component_size == 3
    assert s.diameter == 2
    assert s.avg_shortest_path == pytest.approx(4 / 3)


def test_sampled_paths_close_to_exact(medium_graph):
    exact = graph_stats(medium_graph)
    sampled = graph_stats(medium_graph, exact_cap=100, sample_sources=300, seed=1)
    assert not sampled.path_exact and sampled.path_sources == 300
    assert sampled.avg_shortest_path == pytest.approx(exact.avg_shortest_path, rel=0.03)


def test_stats_json_is_valid(triangle):
    d = json.loads(graph_stats(triangle).to_json())
    assert d["node_count"] == 3
    assert d["powerlaw_alpha"] is None


def test_powerlaw_exponent_recovers_slope():
    # deterministic Pareto quantiles: CCDF ~ (k/5)^-2
    u = (np.arange(200_000) + 0.5) / 200_000
    degree = np.floor(5 * u**-0.5).astype(int)
    assert powerlaw_exponent(degree) == pytest.approx(2.0, abs=0.1)


# generator


def test_generator_triangle():
    g = generate_synthetic(3, 2, 1.0, 1)
    assert g.node_count == 3 and g.edge_count == 3


def test_generator_edge_count_and_determinism():
    v, m = 10, 2
    a = generate_synthetic(v, m, 0.0, 7)
    b = generate_synthetic(v, m, 0.0, 7)
    assert np.array_equal(a.edges(), b.edges())
    assert a.edge_count == m * (v - m) + m * (m - 1) // 2
    assert graph_stats(a).connected


def test_generator_seed_changes_graph():
    a = generate_synthetic(100, 3, 0.5, 1)
    b = generate_synthetic(100, 3, 0.5, 2)
    assert not np.array_equal(a.edges(), b.edges())


def test_generator_clustering_target():
    s = graph_stats(generate_synthetic(2000, 20, 0.9, 42))
    assert s.avg_clustering >= 0.3


@pytest.mark.parametrize("args", [(2, 2, 0.5, 0), (10, 0, 0.5, 0), (10, 2, 1.5, 0)])
def test_generator_validation(args):
    with pytest.raises(ValueError):
        generate_synthetic(*args)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 30),
    edges=st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=80),
)
def test_adjacency_symmetric_and_simple(n, edges):
    edges = [(a % n, b % n) for a, b in edges]
    g = Graph.from_edges(n, edges)
    a = g.adjacency.toarray()
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert a.max(initial=0) <= 1
    assert g.edge_count == len({(min(x, y), max(x, y)) for x, y in edges if x != y})
    assert np.array_equal(g.degree, a.sum(axis=1))
