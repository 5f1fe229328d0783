"""Intent-based citation filtering and before/after rank-shift analysis."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .centrality import compute_metric, full_ranking, top_k
from .errors import ParameterError, ValidationError
from .floatfmt import fmt_float
from .graph import INTENT_ABSENT, CitationGraph, weakly_connected_components

BUMP_CSV_HEADER = [
    "node_id",
    "rank_before",
    "rank_after",
    "value_before",
    "value_after",
    "dropped",
]


@dataclass(frozen=True)
class FilterSpec:
    removed_intents: frozenset[int] = frozenset()
    min_confidence: Optional[float] = None
    drop_isolated_nodes: bool = True

    def __post_init__(self):
        object.__setattr__(self, "removed_intents", frozenset(self.removed_intents))
        if any(i < 0 for i in self.removed_intents):
            raise ParameterError("removed intent indices must be >= 0")
        if self.min_confidence is not None and not 0.0 <= self.min_confidence <= 1.0:
            raise ParameterError("min_confidence must lie in [0, 1]")


def filter_graph(g: CitationGraph, spec: FilterSpec) -> CitationGraph:
    """Remove edges whose intent is filtered out.

    With ``min_confidence`` set, only edges at or above the threshold are
    removed (uncertain classifications survive). ``drop_isolated_nodes``
    then discards nodes left without any edge. An empty intent set is the
    identity.
    """
    if not spec.removed_intents:
        return g
    if g.n_edges and (g.edge_intent == INTENT_ABSENT).any():
        n_missing = int((g.edge_intent == INTENT_ABSENT).sum())
        raise ValidationError(
            f"{n_missing} edges carry no intent; classify them before filtering"
        )

    remove = np.isin(g.edge_intent, sorted(spec.removed_intents))
    if spec.min_confidence is not None:
        confident = g.edge_confidence >= spec.min_confidence  # NaN compares False
        remove &= confident
    keep_edge = ~remove

    if spec.drop_isolated_nodes:
        keep_node = np.zeros(g.n_nodes, dtype=bool)
        keep_node[g.edge_src[keep_edge]] = True
        keep_node[g.edge_dst[keep_edge]] = True
    else:
        keep_node = np.ones(g.n_nodes, dtype=bool)

    new_index = np.full(g.n_nodes, -1, dtype=np.int64)
    kept_nodes = np.flatnonzero(keep_node)
    new_index[kept_nodes] = np.arange(len(kept_nodes))
    return CitationGraph(
        [g.node_ids[i] for i in kept_nodes],
        new_index[g.edge_src[keep_edge]].astype(np.uint32),
        new_index[g.edge_dst[keep_edge]].astype(np.uint32),
        g.edge_intent[keep_edge],
        g.edge_confidence[keep_edge],
        g.edge_multiplicity[keep_edge],
    )


@dataclass(frozen=True)
class ImpactReport:
    nodes_before: int
    nodes_after: int
    edges_before: int
    edges_after: int
    components_before: int
    components_after: int

    @staticmethod
    def _delta(before: int, after: int) -> float:
        return (after - before) / before if before else 0.0

    @property
    def node_delta(self) -> float:
        return self._delta(self.nodes_before, self.nodes_after)

    @property
    def edge_delta(self) -> float:
        return self._delta(self.edges_before, self.edges_after)

    @property
    def component_delta(self) -> float:
        return self._delta(self.components_before, self.components_after)

    def rows(self):
        return [
            ("Nodes", self.nodes_before, self.nodes_after, self.node_delta),
            ("Edges", self.edges_before, self.edges_after, self.edge_delta),
            (
                "Components",
                self.components_before,
                self.components_after,
                self.component_delta,
            ),
        ]


def impact_report(g_before: CitationGraph, g_after: CitationGraph) -> ImpactReport:
    """Structural before/after comparison (weak components recounted)."""
    _, comps_before = weakly_connected_components(g_before)
    _, comps_after = weakly_connected_components(g_after)
    return ImpactReport(
        nodes_before=g_before.n_nodes,
        nodes_after=g_after.n_nodes,
        edges_before=g_before.n_edges,
        edges_after=g_after.n_edges,
        components_before=comps_before,
        components_after=comps_after,
    )


def format_impact_table(report: ImpactReport) -> str:
    """Aligned text table with percentage deltas at one decimal."""
    lines = [f"{'Metric':<12} {'Before':>10} {'After':>10} {'Change':>10}"]
    for name, before, after, delta in report.rows():
        lines.append(
            f"{name:<12} {before:>10,} {after:>10,} {100 * delta:>+9.1f}%"
        )
    return "\n".join(lines)


def write_impact_csv(report: ImpactReport, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "before", "after", "delta_percent"])
        for name, before, after, delta in report.rows():
            writer.writerow([name.lower(), before, after, f"{100 * delta:+.1f}"])


@dataclass(frozen=True)
class RankShiftRow:
    node_id: str
    rank_before: int
    rank_after: Optional[int]  # None when the node vanished entirely
    value_before: float
    value_after: Optional[float]
    dropped: bool  # vanished or pushed past the horizon


@dataclass
class RankShiftReport:
    metric: str
    k: int
    horizon: int
    rows: list[RankShiftRow] = field(default_factory=list)


def rank_shift(
    g_before: CitationGraph,
    g_after: CitationGraph,
    metric: str,
    k: int,
    *,
    horizon: int = 100,
    **metric_kwargs,
) -> RankShiftReport:
    """Track the before-top-k nodes through the filtered ranking.

    ``rank_after`` comes from the filtered graph's full ranking; nodes
    falling past ``horizon`` (or out of the graph) are flagged dropped.
    """
    if k < 1:
        raise ParameterError(f"rank_shift needs k >= 1, got {k}")
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    vec_before = compute_metric(g_before, metric, **metric_kwargs)
    vec_after = compute_metric(g_after, metric, **metric_kwargs)
    after_ranks = full_ranking(vec_after)

    report = RankShiftReport(metric=metric, k=k, horizon=horizon)
    for rank_before, node_id, value_before in top_k(vec_before, k):
        entry = after_ranks.get(node_id)
        if entry is None:
            row = RankShiftRow(node_id, rank_before, None, value_before, None, True)
        else:
            rank_after, value_after = entry
            row = RankShiftRow(
                node_id,
                rank_before,
                rank_after,
                value_before,
                value_after,
                rank_after > horizon,
            )
        report.rows.append(row)
    return report


def export_bump_data(report: RankShiftReport, path) -> int:
    """Bump-chart CSV sorted by rank_before; returns the row count."""
    rows = sorted(report.rows, key=lambda r: r.rank_before)
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(BUMP_CSV_HEADER)
            for row in rows:
                writer.writerow(
                    [
                        row.node_id,
                        row.rank_before,
                        "" if row.rank_after is None else row.rank_after,
                        fmt_float(row.value_before),
                        "" if row.value_after is None else fmt_float(row.value_after),
                        "true" if row.dropped else "false",
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write bump data to {path}: {exc}") from exc
    return len(rows)


def read_bump_data(path) -> list[RankShiftRow]:
    """Inverse of export_bump_data (used by round-trip checks)."""
    rows = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != BUMP_CSV_HEADER:
            raise ValidationError(f"{path}: unexpected bump header {header!r}")
        for raw in reader:
            node_id, rb, ra, vb, va, dropped = raw
            rows.append(
                RankShiftRow(
                    node_id=node_id,
                    rank_before=int(rb),
                    rank_after=int(ra) if ra else None,
                    value_before=float(vb),
                    value_after=float(va) if va else None,
                    dropped=dropped == "true",
                )
            )
    return rows
