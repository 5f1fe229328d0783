import numpy as np
import pytest

from intentcite.errors import ParameterError, ValidationError
from intentcite.filtering import (
    FilterSpec,
    export_bump_data,
    filter_graph,
    format_impact_table,
    impact_report,
    rank_shift,
    read_bump_data,
    write_impact_csv,
)
from intentcite.graph import CitationEdge, build_graph, weakly_connected_components

from oracles import naive_filter_counts, random_citation_edges

BG, METHOD, RESULT = 0, 1, 2


def tagged(src, dst, intent, confidence=0.9):
    return CitationEdge(src, dst, intent=intent, confidence=confidence)


@pytest.fixture
def triangle():
    return build_graph(
        [
            tagged("a", "b", BG),
            tagged("b", "c", METHOD),
            tagged("c", "a", RESULT),
        ]
    )


def test_empty_spec_is_identity(triangle):
    out = filter_graph(triangle, FilterSpec())
    assert out is triangle


def test_triangle_background_removal(triangle):
    out = filter_graph(triangle, FilterSpec({BG}, drop_isolated_nodes=True))
    # removing one edge of a triangle isolates nobody
    assert out.n_nodes == 3
    assert out.n_edges == 2


def test_isolated_nodes_dropped():
    g = build_graph([tagged("a", "b", BG), tagged("c", "d", METHOD)])
    out = filter_graph(g, FilterSpec({BG}))
    assert set(out.node_ids) == {"c", "d"}
    assert out.n_edges == 1
    kept = filter_graph(g, FilterSpec({BG}, drop_isolated_nodes=False))
    assert set(kept.node_ids) == {"a", "b", "c", "d"}


def test_min_confidence_protects_uncertain_edges():
    g = build_graph([tagged("a", "b", BG, 0.95), tagged("c", "d", BG, 0.5)])
    out = filter_graph(g, FilterSpec({BG}, min_confidence=0.9, drop_isolated_nodes=False))
    assert out.n_edges == 1
    assert out.edges()[0].citing_id == "c"


def test_untagged_edges_cause_validation_error():
    g = build_graph([CitationEdge("a", "b"), tagged("b", "c", BG)])
    with pytest.raises(ValidationError, match="carry no intent"):
        filter_graph(g, FilterSpec({BG}))


def test_filtering_is_monotone_and_composes():
    rng = np.random.default_rng(17)
    for _ in range(10):
        g = build_graph(random_citation_edges(rng, 30, 80))
        spec_bg = FilterSpec({BG})
        spec_m = FilterSpec({METHOD})
        both = FilterSpec({BG, METHOD})
        f1 = filter_graph(filter_graph(g, spec_bg), spec_m)
        f2 = filter_graph(g, both)
        assert f1.structure_signature() == f2.structure_signature()
        assert f2.n_edges <= g.n_edges
        assert f2.n_nodes <= g.n_nodes


def test_impact_identity_all_zero(triangle):
    report = impact_report(triangle, triangle)
    assert report.node_delta == report.edge_delta == report.component_delta == 0.0
    table = format_impact_table(report)
    assert "+0.0%" in table


def test_impact_matches_naive_oracle():
    rng = np.random.default_rng(29)
    for _ in range(10):
        n = int(rng.integers(5, 120))
        g = build_graph(random_citation_edges(rng, n, int(rng.integers(4, 4 * n))))
        for drop in (True, False):
            spec = FilterSpec({BG}, drop_isolated_nodes=drop)
            filtered = filter_graph(g, spec)
            report = impact_report(g, filtered)
            nodes, edges, comps = naive_filter_counts(g, spec)
            assert report.nodes_after == nodes
            assert report.edges_after == edges
            assert report.components_after == comps


def test_impact_percentages_display():
    g_before = build_graph(random_citation_edges(np.random.default_rng(5), 40, 120))
    filtered = filter_graph(g_before, FilterSpec({BG}))
    report = impact_report(g_before, filtered)
    table = format_impact_table(report)
    expected = f"{100 * report.node_delta:+.1f}%"
    assert expected in table


@pytest.mark.parametrize(
    "metric", ["in_degree", "betweenness", "closeness", "pagerank"]
)
def test_rank_shift_noop_zero_displacement(metric):
    rng = np.random.default_rng(37)
    g = build_graph(random_citation_edges(rng, 25, 70))
    same = filter_graph(g, FilterSpec())
    report = rank_shift(g, same, metric, 10)
    assert len(report.rows) == 10
    for row in report.rows:
        assert row.rank_after == row.rank_before
        assert row.value_after == row.value_before
        assert not row.dropped


def test_rank_shift_marks_vanished_and_beyond_horizon():
    # star into x, a mid-rank survivor s0, and a background-only pair
    edges = [tagged(f"s{i}", "x", METHOD) for i in range(5)]
    edges += [tagged("t1", "s0", METHOD), tagged("t2", "s0", METHOD)]
    edges += [tagged("p", "q", BG)]
    g = build_graph(edges)
    filtered = filter_graph(g, FilterSpec({BG}))
    report = rank_shift(g, filtered, "in_degree", k=3, horizon=1)
    by_node = {row.node_id: row for row in report.rows}
    assert by_node["q"].rank_after is None
    assert by_node["q"].dropped
    ranked_second = [r for r in report.rows if r.rank_before == 2][0]
    assert ranked_second.dropped  # horizon 1 flags everything past rank 1
    assert ranked_second.rank_after is not None


def test_rank_shift_parameter_errors(triangle):
    with pytest.raises(ParameterError):
        rank_shift(triangle, triangle, "in_degree", 0)
    with pytest.raises(ParameterError):
        rank_shift(triangle, triangle, "in_degree", 5, horizon=0)


def test_bump_export_empty(tmp_path):
    from intentcite.filtering import RankShiftReport

    path = tmp_path / "bump.csv"
    assert export_bump_data(RankShiftReport("in_degree", 0, 100), path) == 0
    assert path.read_text(encoding="utf-8") == (
        "node_id,rank_before,rank_after,value_before,value_after,dropped\n"
    )


def test_bump_export_sorted_and_round_trips(tmp_path):
    rng = np.random.default_rng(41)
    g = build_graph(random_citation_edges(rng, 40, 120))
    filtered = filter_graph(g, FilterSpec({BG}))
    report = rank_shift(g, filtered, "pagerank", 20, horizon=30)
    path = tmp_path / "bump.csv"
    count = export_bump_data(report, path)
    assert count == len(report.rows)
    rows = read_bump_data(path)
    assert [r.rank_before for r in rows] == sorted(r.rank_before for r in rows)
    assert rows == sorted(report.rows, key=lambda r: r.rank_before)


def test_impact_csv(tmp_path, triangle):
    filtered = filter_graph(triangle, FilterSpec({BG}))
    report = impact_report(triangle, filtered)
    path = tmp_path / "impact.csv"
    write_impact_csv(report, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "metric,before,after,delta_percent"
    assert lines[1].startswith("nodes,3,3,")
    assert lines[2].startswith("edges,3,2,")


def test_table5_shape_direction():
    """Removing the dominant intent hurts the network far more than the
    rare one, and fragments it (the ordering the full corpus shows)."""
    rng = np.random.default_rng(53)
    edges = random_citation_edges(
        rng, 400, 1200, intent_weights=(0.57, 0.40, 0.03)
    )
    g = build_graph(edges)
    reports = {}
    for intent in (BG, METHOD, RESULT):
        filtered = filter_graph(g, FilterSpec({intent}))
        reports[intent] = impact_report(g, filtered)
    assert reports[BG].edge_delta < reports[METHOD].edge_delta < reports[RESULT].edge_delta
    assert reports[BG].components_after > reports[BG].components_before