"""Immutable directed citation graphs in compressed adjacency form.

Nodes are string paper ids mapped to dense indices by first appearance.
Parallel duplicate edges are collapsed to one edge whose multiplicity is
retained for reporting; self-citations are dropped and counted. Once
built, a graph never mutates, so it can be shared freely across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .floatfmt import fmt_float
from .schema import LabelSchema

EDGE_CSV_HEADER = ["citing_id", "cited_id", "intent", "confidence"]
NODE_CSV_HEADER = ["node_id", "component_label"]

INTENT_ABSENT = -1


@dataclass(frozen=True)
class CitationEdge:
    citing_id: str
    cited_id: str
    intent: Optional[int] = None
    confidence: Optional[float] = None

    def __post_init__(self):
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(
                f"confidence must lie in [0, 1], got {self.confidence!r}"
            )
        if self.intent is not None and self.intent < 0:
            raise ValidationError(f"intent index must be >= 0, got {self.intent!r}")


class CitationGraph:
    """Directed graph over string node ids with per-edge intent metadata.

    Edge arrays are sorted by (source index, target index); ``out_offsets``
    and ``in_offsets`` are CSR-style offset arrays into them.
    """

    def __init__(
        self,
        node_ids: Sequence[str],
        edge_src: np.ndarray,
        edge_dst: np.ndarray,
        edge_intent: np.ndarray,
        edge_confidence: np.ndarray,
        edge_multiplicity: np.ndarray,
        *,
        self_loops_dropped: int = 0,
        raw_edge_count: int | None = None,
    ):
        self.node_ids: tuple[str, ...] = tuple(node_ids)
        self._index: dict[str, int] = {v: i for i, v in enumerate(self.node_ids)}
        if len(self._index) != len(self.node_ids):
            raise ValidationError("node ids must be unique")

        n, e = len(self.node_ids), len(edge_src)
        order = np.lexsort((edge_dst, edge_src))
        self.edge_src = np.asarray(edge_src, dtype=np.uint32)[order]
        self.edge_dst = np.asarray(edge_dst, dtype=np.uint32)[order]
        self.edge_intent = np.asarray(edge_intent, dtype=np.int32)[order]
        self.edge_confidence = np.asarray(edge_confidence, dtype=np.float64)[order]
        self.edge_multiplicity = np.asarray(edge_multiplicity, dtype=np.int64)[order]

        self.out_offsets = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.out_offsets, self.edge_src + 1, 1)
        np.cumsum(self.out_offsets, out=self.out_offsets)

        in_order = np.lexsort((self.edge_src, self.edge_dst))
        self.in_edge_index = in_order.astype(np.int64)  # into the edge arrays
        self.in_offsets = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.in_offsets, self.edge_dst + 1, 1)
        np.cumsum(self.in_offsets, out=self.in_offsets)

        self.self_loops_dropped = self_loops_dropped
        self.raw_edge_count = raw_edge_count if raw_edge_count is not None else e

        for arr in (
            self.edge_src,
            self.edge_dst,
            self.edge_intent,
            self.edge_confidence,
            self.edge_multiplicity,
            self.out_offsets,
            self.in_offsets,
            self.in_edge_index,
        ):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    def index_of(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValidationError(f"unknown node id {node_id!r}") from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._index

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.edge_dst[self.out_offsets[i] : self.out_offsets[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        idx = self.in_edge_index[self.in_offsets[i] : self.in_offsets[i + 1]]
        return self.edge_src[idx]

    def edge_position(self, citing_id: str, cited_id: str) -> int:
        """Index into the edge arrays, or -1 when the edge is absent."""
        s = self.index_of(citing_id)
        t = self.index_of(cited_id)
        lo, hi = self.out_offsets[s], self.out_offsets[s + 1]
        pos = lo + np.searchsorted(self.edge_dst[lo:hi], t)
        if pos < hi and self.edge_dst[pos] == t:
            return int(pos)
        return -1

    def multiplicity(self, citing_id: str, cited_id: str) -> int:
        pos = self.edge_position(citing_id, cited_id)
        return int(self.edge_multiplicity[pos]) if pos >= 0 else 0

    def edges(self) -> list[CitationEdge]:
        out = []
        for i in range(self.n_edges):
            intent = int(self.edge_intent[i])
            conf = self.edge_confidence[i]
            out.append(
                CitationEdge(
                    citing_id=self.node_ids[self.edge_src[i]],
                    cited_id=self.node_ids[self.edge_dst[i]],
                    intent=None if intent == INTENT_ABSENT else intent,
                    confidence=None if np.isnan(conf) else float(conf),
                )
            )
        return out

    def structure_signature(self):
        """Order-independent identity: node id set plus edge attribute set."""
        edges = set()
        for i in range(self.n_edges):
            conf = self.edge_confidence[i]
            edges.add(
                (
                    self.node_ids[self.edge_src[i]],
                    self.node_ids[self.edge_dst[i]],
                    int(self.edge_intent[i]),
                    None if np.isnan(conf) else float(conf),
                    int(self.edge_multiplicity[i]),
                )
            )
        return frozenset(self.node_ids), frozenset(edges)


def build_graph(edges: Iterable[CitationEdge]) -> CitationGraph:
    """Build a graph from classified edges.

    Node indices follow first appearance in the edge list (citing end
    first). Among parallel duplicates the intent with the highest
    confidence wins; ties prefer an edge that has an intent at all, then
    the smallest intent index, so the result does not depend on input
    order.
    """
    index: dict[str, int] = {}
    node_ids: list[str] = []

    def intern(node_id: str) -> int:
        if node_id not in index:
            index[node_id] = len(node_ids)
            node_ids.append(node_id)
        return index[node_id]

    # (src, dst) -> [best_rank_tuple, intent, confidence, multiplicity]
    dedup: dict[tuple[int, int], list] = {}
    self_loops = 0
    raw_count = 0
    for edge in edges:
        raw_count += 1
        if edge.citing_id == edge.cited_id:
            self_loops += 1
            continue
        s = intern(edge.citing_id)
        t = intern(edge.cited_id)
        has_intent = edge.intent is not None
        rank = (
            1 if has_intent else 0,
            edge.confidence if edge.confidence is not None else 0.0,
            -(edge.intent if has_intent else 0),
        )
        entry = dedup.get((s, t))
        if entry is None:
            dedup[(s, t)] = [rank, edge.intent, edge.confidence, 1]
        else:
            entry[3] += 1
            if rank > entry[0]:
                entry[0], entry[1], entry[2] = rank, edge.intent, edge.confidence

    e = len(dedup)
    src = np.empty(e, dtype=np.uint32)
    dst = np.empty(e, dtype=np.uint32)
    intent = np.empty(e, dtype=np.int32)
    confidence = np.empty(e, dtype=np.float64)
    multiplicity = np.empty(e, dtype=np.int64)
    for i, ((s, t), (_, int_val, conf_val, mult)) in enumerate(dedup.items()):
        src[i] = s
        dst[i] = t
        intent[i] = INTENT_ABSENT if int_val is None else int_val
        confidence[i] = np.nan if conf_val is None else conf_val
        multiplicity[i] = mult

    return CitationGraph(
        node_ids,
        src,
        dst,
        intent,
        confidence,
        multiplicity,
        self_loops_dropped=self_loops,
        raw_edge_count=raw_count,
    )


def subgraph(g: CitationGraph, keep: np.ndarray) -> CitationGraph:
    """Induced subgraph on the boolean node mask ``keep``.

    Original string ids and their relative order are preserved; isolated
    nodes inside the mask are kept.
    """
    keep = np.asarray(keep, dtype=bool)
    if keep.shape[0] != g.n_nodes:
        raise ValidationError("node mask length must equal node count")
    new_index = np.full(g.n_nodes, -1, dtype=np.int64)
    kept_nodes = np.flatnonzero(keep)
    new_index[kept_nodes] = np.arange(len(kept_nodes))

    mask = keep[g.edge_src] & keep[g.edge_dst]
    return CitationGraph(
        [g.node_ids[i] for i in kept_nodes],
        new_index[g.edge_src[mask]].astype(np.uint32),
        new_index[g.edge_dst[mask]].astype(np.uint32),
        g.edge_intent[mask],
        g.edge_confidence[mask],
        g.edge_multiplicity[mask],
    )


def weakly_connected_components(g: CitationGraph) -> tuple[np.ndarray, int]:
    """Label nodes by weak component.

    Labels run 0..C-1 ordered by decreasing component size; equal sizes
    tie-break on the smallest member index.
    """
    n = g.n_nodes
    raw = np.full(n, -1, dtype=np.int64)
    n_components = 0
    for start in range(n):
        if raw[start] != -1:
            continue
        stack = [start]
        raw[start] = n_components
        while stack:
            v = stack.pop()
            for w in g.out_neighbors(v):
                if raw[w] == -1:
                    raw[w] = n_components
                    stack.append(int(w))
            for w in g.in_neighbors(v):
                if raw[w] == -1:
                    raw[w] = n_components
                    stack.append(int(w))
        n_components += 1

    if n == 0:
        return raw, 0
    sizes = np.bincount(raw, minlength=n_components)
    # raw labels already increase with the smallest member index, and
    # np.argsort is stable, so sorting by -size keeps that tie order.
    by_size = np.argsort(-sizes, kind="stable")
    relabel = np.empty(n_components, dtype=np.int64)
    relabel[by_size] = np.arange(n_components)
    return relabel[raw], n_components


def largest_component(g: CitationGraph) -> CitationGraph:
    """Induced subgraph on the largest weak component."""
    if g.n_nodes == 0:
        raise ValidationError("empty graph has no components")
    labels, _ = weakly_connected_components(g)
    return subgraph(g, labels == 0)


def write_edge_csv(g: CitationGraph, schema: LabelSchema | None, path) -> int:
    """Export edges as ``citing_id,cited_id,intent,confidence`` rows.

    Intent cells carry schema label names (empty when untagged), so a
    schema is required as soon as any edge is tagged.
    """
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_CSV_HEADER)
        for i in range(g.n_edges):
            intent = int(g.edge_intent[i])
            if intent == INTENT_ABSENT:
                name = ""
            else:
                if schema is None:
                    raise ValidationError("edges carry intents but no schema given")
                name = schema.name_of(intent)
            conf = g.edge_confidence[i]
            writer.writerow(
                [
                    g.node_ids[g.edge_src[i]],
                    g.node_ids[g.edge_dst[i]],
                    name,
                    "" if np.isnan(conf) else fmt_float(conf),
                ]
            )
            count += 1
    return count


def read_edge_csv(path, schema: LabelSchema | None = None) -> list[CitationEdge]:
    path = Path(path)
    edges = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EDGE_CSV_HEADER:
            raise ValidationError(
                f"{path}: unexpected header {header!r}, want {EDGE_CSV_HEADER!r}"
            )
        for row in reader:
            if len(row) != 4:
                raise ValidationError(f"{path}: malformed edge row {row!r}")
            citing, cited, name, conf = row
            if name and schema is None:
                raise ValidationError(
                    f"{path}: edge carries intent {name!r} but no schema given"
                )
            edges.append(
                CitationEdge(
                    citing_id=citing,
                    cited_id=cited,
                    intent=schema.index_of(name) if name else None,
                    confidence=float(conf) if conf else None,
                )
            )
    return edges


def write_node_csv(g: CitationGraph, path) -> int:
    """Export ``node_id,component_label`` rows."""
    labels, _ = weakly_connected_components(g)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NODE_CSV_HEADER)
        for i, node_id in enumerate(g.node_ids):
            writer.writerow([node_id, int(labels[i])])
    return g.n_nodes
