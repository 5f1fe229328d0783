import numpy as np
import pytest

from intentcite.centrality import (
    betweenness,
    closeness,
    degree,
    full_ranking,
    pagerank,
    top_k,
)
from intentcite.errors import ParameterError
from intentcite.graph import CitationEdge, build_graph

from conftest import single_node_graph
from oracles import (
    betweenness_bruteforce,
    closeness_bruteforce_incoming,
    out_adjacency,
    pagerank_linear_solve,
    random_graph,
)


# --- degree ----------------------------------------------------------------


def test_degree_isolated_node():
    in_vec, out_vec = degree(single_node_graph())
    assert in_vec.values.tolist() == [0.0]
    assert out_vec.values.tolist() == [0.0]


def test_degree_star():
    g = build_graph(
        [CitationEdge("a", "x"), CitationEdge("b", "x"), CitationEdge("c", "x")]
    )
    in_vec, out_vec = degree(g)
    x = g.index_of("x")
    assert in_vec.values[x] == 3
    assert out_vec.values[x] == 0


def test_degree_conservation_and_equivariance():
    rng = np.random.default_rng(0)
    edges = [
        CitationEdge(f"n{rng.integers(10)}", f"n{(rng.integers(10) + 1) % 11}")
        for _ in range(30)
    ]
    edges = [e for e in edges if e.citing_id != e.cited_id]
    g = build_graph(edges)
    in_vec, out_vec = degree(g)
    assert in_vec.values.sum() == out_vec.values.sum() == g.n_edges

    shuffled = build_graph([edges[i] for i in rng.permutation(len(edges))])
    in2, _ = degree(shuffled)
    for node in g.node_ids:
        assert in_vec.values[g.index_of(node)] == in2.values[shuffled.index_of(node)]


# --- betweenness -------------------------------------------------------------


def test_betweenness_directed_path(path_graph):
    vec = betweenness(path_graph)
    assert vec.values[path_graph.index_of("b")] == 1.0
    assert vec.values[path_graph.index_of("a")] == 0.0
    assert vec.values[path_graph.index_of("c")] == 0.0


def test_betweenness_diamond_splits_paths():
    g = build_graph(
        [
            CitationEdge("a", "b"),
            CitationEdge("b", "d"),
            CitationEdge("a", "c"),
            CitationEdge("c", "d"),
        ]
    )
    vec = betweenness(g)
    assert vec.values[g.index_of("b")] == pytest.approx(0.5, abs=1e-15)
    assert vec.values[g.index_of("c")] == pytest.approx(0.5, abs=1e-15)


def test_betweenness_matches_bruteforce():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(2, 40))
        g = random_graph(rng, n, int(rng.integers(1, 3 * n)))
        oracle = betweenness_bruteforce(out_adjacency(g))
        vec = betweenness(g)
        for i in range(g.n_nodes):
            assert abs(vec.values[i] - float(oracle[i])) <= 1e-12 * max(
                1.0, float(oracle[i])
            )


def test_betweenness_thread_count_invariant():
    rng = np.random.default_rng(123)
    g = random_graph(rng, 150, 400)
    serial = betweenness(g, threads=1)
    parallel = betweenness(g, threads=2)
    assert serial.values.tobytes() == parallel.values.tobytes()


def test_betweenness_undirected_path(path_graph):
    vec = betweenness(path_graph, undirected=True)
    # both ordered pairs (a,c) and (c,a) route through b
    assert vec.values[path_graph.index_of("b")] == 2.0


# --- closeness ---------------------------------------------------------------


def test_closeness_standard_path(path_graph):
    vec = closeness(path_graph, variant="standard", direction="incoming")
    assert vec.values[path_graph.index_of("c")] == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_closeness_isolated_node_zero():
    vec = closeness(single_node_graph())
    assert vec.values.tolist() == [0.0]


def test_closeness_paper_literal_path(path_graph):
    vec = closeness(path_graph, variant="paper_literal", direction="incoming")
    assert vec.values[path_graph.index_of("c")] == pytest.approx(1.0, abs=1e-15)


def test_closeness_outgoing_mirrors_incoming(path_graph):
    vec = closeness(path_graph, direction="outgoing")
    assert vec.values[path_graph.index_of("a")] == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_closeness_matches_bruteforce_and_threads():
    rng = np.random.default_rng(21)
    for variant in ("standard", "paper_literal"):
        g = random_graph(rng, 60, 150)
        vec = closeness(g, variant=variant, direction="incoming")
        oracle = closeness_bruteforce_incoming(g, variant)
        np.testing.assert_allclose(vec.values, oracle, rtol=0, atol=1e-12)
        two = closeness(g, variant=variant, direction="incoming", threads=2)
        assert vec.values.tobytes() == two.values.tobytes()


def test_closeness_monotone_under_edge_addition_dag_fixtures():
    # spot-checks: growing a DAG never lowered standard closeness here
    base = [
        CitationEdge("a", "b"),
        CitationEdge("b", "d"),
        CitationEdge("a", "c"),
        CitationEdge("c", "d"),
        CitationEdge("d", "e"),
    ]
    additions = [CitationEdge("a", "d"), CitationEdge("b", "c"), CitationEdge("c", "e")]
    g = build_graph(base)
    before = closeness(g, variant="standard", direction="incoming")
    for extra in additions:
        g2 = build_graph(base + [extra])
        after = closeness(g2, variant="standard", direction="incoming")
        for node in g.node_ids:
            assert (
                after.values[g2.index_of(node)]
                >= before.values[g.index_of(node)] - 1e-15
            )


# --- pagerank ----------------------------------------------------------------


def test_pagerank_three_cycle_symmetry(three_cycle):
    vec = pagerank(three_cycle, damping=0.85, tol=1e-10)
    np.testing.assert_allclose(vec.values, 1.0, atol=1e-10)
    assert vec.params["converged"] is True


def test_pagerank_two_node_drop_fixed_point():
    g = build_graph([CitationEdge("a", "b")])
    vec = pagerank(g, damping=0.85, tol=1e-12, max_iter=200, dangling="drop")
    assert vec.values[g.index_of("a")] == pytest.approx(0.15, abs=1e-10)
    assert vec.values[g.index_of("b")] == pytest.approx(0.2775, abs=1e-10)


def test_pagerank_matches_linear_solve():
    rng = np.random.default_rng(31)
    for dangling in ("redistribute", "drop"):
        for _ in range(5):
            n = int(rng.integers(2, 100))
            g = random_graph(rng, n, int(rng.integers(1, 4 * n)))
            vec = pagerank(g, damping=0.85, tol=1e-10, max_iter=300, dangling=dangling)
            assert vec.params["converged"]
            oracle = pagerank_linear_solve(g, 0.85, dangling)
            assert np.abs(vec.values - oracle).max() < 1e-8


def test_pagerank_mass_conservation_redistribute():
    rng = np.random.default_rng(41)
    g = random_graph(rng, 50, 120)
    vec = pagerank(g, tol=1e-12, max_iter=400)
    assert abs(vec.values.sum() - g.n_nodes) < 1e-12 * g.n_nodes * 10


def test_pagerank_isolated_node_does_not_reorder_drop_mode():
    from intentcite.graph import CitationGraph

    edges = [CitationEdge("a", "b"), CitationEdge("b", "c"), CitationEdge("a", "c")]
    g1 = build_graph(edges)
    g2 = CitationGraph(  # same edges plus a genuinely isolated node z
        list(g1.node_ids) + ["z"],
        g1.edge_src,
        g1.edge_dst,
        g1.edge_intent,
        g1.edge_confidence,
        g1.edge_multiplicity,
    )
    v1 = pagerank(g1, dangling="drop", max_iter=300, tol=1e-12)
    v2 = pagerank(g2, dangling="drop", max_iter=300, tol=1e-12)
    rank1 = [nid for _, nid, _ in top_k(v1, 3)]
    rank2 = [nid for _, nid, _ in top_k(v2, 4) if nid != "z"]
    assert rank1 == rank2
    for node in g1.node_ids:
        assert v2.values[g2.index_of(node)] == pytest.approx(
            v1.values[g1.index_of(node)], abs=1e-12
        )


def test_pagerank_flags_non_convergence():
    g = build_graph([CitationEdge("a", "b")])
    vec = pagerank(g, tol=1e-10, max_iter=1)
    assert vec.params["converged"] is False
    assert vec.params["iterations"] == 1


# --- ranking -----------------------------------------------------------------


def _vec(metric="in_degree", values=(3.0, 1.0, 2.0), ids=("a", "b", "c")):
    from intentcite.centrality import CentralityVector

    return CentralityVector(metric, np.array(values), {}, tuple(ids))


def test_top_k_basic():
    assert top_k(_vec(), 2) == [(1, "a", 3.0), (2, "c", 2.0)]


def test_top_k_ties_lexicographic():
    vec = _vec(values=(1.0, 1.0, 1.0), ids=("c", "a", "b"))
    assert [nid for _, nid, _ in top_k(vec, 3)] == ["a", "b", "c"]


def test_top_k_bounds():
    assert len(top_k(_vec(), 10)) == 3
    with pytest.raises(ParameterError):
        top_k(_vec(), 0)


def test_full_ranking_dense():
    ranking = full_ranking(_vec())
    assert ranking == {"a": (1, 3.0), "c": (2, 2.0), "b": (3, 1.0)}
