"""Centrality metrics over citation graphs.

All metrics are exact and deterministic. Betweenness and closeness
parallelize over source nodes in fixed-size chunks merged in chunk order,
so results are bit-identical for any worker count.
"""

from __future__ import annotations

import csv
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, ValidationError
from .floatfmt import fmt_float
from .graph import CitationGraph

METRICS = ("in_degree", "out_degree", "betweenness", "closeness", "pagerank")

# Sources per work unit; fixed so chunk boundaries (and therefore float
# summation order) never depend on the worker count.
_CHUNK_SOURCES = 64

_worker_adj: list[list[int]] | None = None


@dataclass
class CentralityVector:
    metric: str
    values: np.ndarray
    params: dict = field(default_factory=dict)
    node_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.node_ids and len(self.node_ids) != len(self.values):
            raise ValidationError("node_ids and values lengths differ")
        if self.values.size and not np.isfinite(self.values).all():
            raise ValidationError(f"{self.metric} produced non-finite values")


def _out_lists(g: CitationGraph) -> list[list[int]]:
    return [g.out_neighbors(i).tolist() for i in range(g.n_nodes)]


def _in_lists(g: CitationGraph) -> list[list[int]]:
    return [sorted(g.in_neighbors(i).tolist()) for i in range(g.n_nodes)]


def _undirected_lists(g: CitationGraph) -> list[list[int]]:
    return [
        sorted(set(g.out_neighbors(i).tolist()) | set(g.in_neighbors(i).tolist()))
        for i in range(g.n_nodes)
    ]


def degree(g: CitationGraph) -> tuple[CentralityVector, CentralityVector]:
    """In-degree (citations received) and out-degree per node."""
    in_vals = np.diff(g.in_offsets).astype(np.float64)
    out_vals = np.diff(g.out_offsets).astype(np.float64)
    return (
        CentralityVector("in_degree", in_vals, {}, g.node_ids),
        CentralityVector("out_degree", out_vals, {}, g.node_ids),
    )


def _brandes_accumulate(adj: list[list[int]], s: int, acc: np.ndarray) -> None:
    n = len(adj)
    dist = [-1] * n
    sigma = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    dist[s] = 0
    sigma[s] = 1
    order: list[int] = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv1 = dist[v] + 1
        sv = sigma[v]
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv1
                queue.append(w)
            if dist[w] == dv1:
                sigma[w] += sv
                preds[w].append(v)
    delta = [0.0] * n
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
        if w != s:
            acc[w] += delta[w]


def _init_worker(adj):
    global _worker_adj
    _worker_adj = adj


def _betweenness_chunk(bounds: tuple[int, int]) -> np.ndarray:
    lo, hi = bounds
    adj = _worker_adj
    acc = np.zeros(len(adj), dtype=np.float64)
    for s in range(lo, hi):
        _brandes_accumulate(adj, s, acc)
    return acc


def _bfs_reach(adj: list[list[int]], s: int) -> tuple[int, int]:
    """(number of reached nodes including s, sum of their distances)."""
    n = len(adj)
    dist = [-1] * n
    dist[s] = 0
    queue = deque([s])
    reached = 1
    total = 0
    while queue:
        v = queue.popleft()
        dv1 = dist[v] + 1
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv1
                total += dv1
                reached += 1
                queue.append(w)
    return reached, total


def _closeness_chunk(args) -> tuple[int, np.ndarray]:
    bounds, variant, n_total = args
    lo, hi = bounds
    adj = _worker_adj
    vals = np.zeros(hi - lo, dtype=np.float64)
    for s in range(lo, hi):
        reached, total = _bfs_reach(adj, s)
        if variant == "paper_literal":
            vals[s - lo] = total / n_total
        else:
            if reached > 1 and n_total > 1:
                frac_reached = (reached - 1) / (n_total - 1)
                vals[s - lo] = ((reached - 1) / total) * frac_reached
    return lo, vals


def _resolve_threads(threads: int | None) -> int:
    if threads is None or threads == 0:  # 0 = use available parallelism
        return max(1, os.cpu_count() or 1)
    if threads < 1:
        raise ParameterError(f"threads must be >= 1 (or 0 for auto), got {threads}")
    return threads


def _chunks(n: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + _CHUNK_SOURCES, n)) for lo in range(0, n, _CHUNK_SOURCES)]


def _map_chunks(fn, items, adj, threads: int):
    if threads <= 1 or len(items) <= 1:
        _init_worker(adj)
        return [fn(item) for item in items]
    with ProcessPoolExecutor(
        max_workers=threads, initializer=_init_worker, initargs=(adj,)
    ) as pool:
        return list(pool.map(fn, items))


def betweenness(
    g: CitationGraph, *, undirected: bool = False, threads: int | None = 1
) -> CentralityVector:
    """Exact unnormalized betweenness by Brandes' accumulation.

    Shortest paths follow edge direction unless ``undirected``; pairs with
    no connecting path contribute nothing.
    """
    threads = _resolve_threads(threads)
    adj = _undirected_lists(g) if undirected else _out_lists(g)
    total = np.zeros(g.n_nodes, dtype=np.float64)
    for acc in _map_chunks(_betweenness_chunk, _chunks(g.n_nodes), adj, threads):
        total += acc
    return CentralityVector(
        "betweenness", total, {"undirected": undirected}, g.node_ids
    )


def closeness(
    g: CitationGraph,
    *,
    variant: str = "standard",
    direction: str = "incoming",
    undirected: bool = False,
    threads: int | None = 1,
) -> CentralityVector:
    """Closeness centrality.

    ``standard`` is reachable-set closeness scaled by the reached fraction:
    ``C(v) = ((r-1)/sum_d) * ((r-1)/(N-1))`` over the ``r`` nodes that can
    reach v (``direction="incoming"``) or that v can reach (``outgoing``).
    ``paper_literal`` is the plain farness sum divided by N.
    """
    if variant not in ("standard", "paper_literal"):
        raise ParameterError(f"unknown closeness variant {variant!r}")
    if direction not in ("incoming", "outgoing"):
        raise ParameterError(f"unknown direction {direction!r}")
    threads = _resolve_threads(threads)
    if undirected:
        adj = _undirected_lists(g)
    elif direction == "incoming":
        adj = _in_lists(g)
    else:
        adj = _out_lists(g)

    values = np.zeros(g.n_nodes, dtype=np.float64)
    items = [(b, variant, g.n_nodes) for b in _chunks(g.n_nodes)]
    for lo, vals in _map_chunks(_closeness_chunk, items, adj, threads):
        values[lo : lo + len(vals)] = vals
    params = {"variant": variant, "direction": direction, "undirected": undirected}
    return CentralityVector("closeness", values, params, g.node_ids)


def pagerank(
    g: CitationGraph,
    *,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 100,
    dangling: str = "redistribute",
) -> CentralityVector:
    """Unnormalized PageRank by power iteration from PR = 1.

    ``redistribute`` spreads the rank of nodes without outgoing citations
    evenly over the graph each sweep; ``drop`` lets that mass vanish.
    Non-convergence within ``max_iter`` is flagged in ``params``, never
    raised.
    """
    if g.n_nodes == 0:
        raise ValidationError("pagerank requires at least one node")
    if not 0.0 < damping < 1.0:
        raise ParameterError(f"damping must lie in (0, 1), got {damping}")
    if dangling not in ("redistribute", "drop"):
        raise ParameterError(f"unknown dangling mode {dangling!r}")

    n = g.n_nodes
    out_deg = np.diff(g.out_offsets).astype(np.float64)
    dangling_mask = out_deg == 0
    safe_deg = np.where(dangling_mask, 1.0, out_deg)
    src, dst = g.edge_src, g.edge_dst

    pr = np.ones(n, dtype=np.float64)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        share = pr / safe_deg
        new = (1.0 - damping) + damping * np.bincount(
            dst, weights=share[src], minlength=n
        )
        if dangling == "redistribute":
            new += damping * pr[dangling_mask].sum() / n
        delta = np.abs(new - pr).sum()
        pr = new
        if delta < tol:
            converged = True
            break
    params = {
        "damping": damping,
        "tol": tol,
        "max_iter": max_iter,
        "dangling": dangling,
        "iterations": iterations,
        "converged": converged,
    }
    return CentralityVector("pagerank", pr, params, g.node_ids)


def compute_metric(g: CitationGraph, metric: str, **kwargs) -> CentralityVector:
    """Dispatch by metric name (CLI entry point)."""
    if metric == "in_degree":
        return degree(g)[0]
    if metric == "out_degree":
        return degree(g)[1]
    if metric == "betweenness":
        return betweenness(
            g,
            undirected=kwargs.get("undirected", False),
            threads=kwargs.get("threads", 1),
        )
    if metric == "closeness":
        return closeness(
            g,
            variant=kwargs.get("variant", "standard"),
            direction=kwargs.get("direction", "incoming"),
            undirected=kwargs.get("undirected", False),
            threads=kwargs.get("threads", 1),
        )
    if metric == "pagerank":
        return pagerank(
            g,
            damping=kwargs.get("damping", 0.85),
            tol=kwargs.get("tol", 1e-10),
            max_iter=kwargs.get("max_iter", 100),
            dangling=kwargs.get("dangling", "redistribute"),
        )
    raise ParameterError(f"unknown metric {metric!r}; choose from {METRICS}")


def ranked_indices(vector: CentralityVector) -> list[int]:
    """Node indices in rank order: descending value, ties by ascending id."""
    ids = vector.node_ids
    return sorted(range(len(ids)), key=lambda i: (-vector.values[i], ids[i]))


def top_k(vector: CentralityVector, k: int) -> list[tuple[int, str, float]]:
    """The top ``k`` nodes as (1-based rank, node id, value) tuples."""
    if k < 1:
        raise ParameterError(f"top_k needs k >= 1, got {k}")
    order = ranked_indices(vector)[:k]
    return [
        (rank, vector.node_ids[i], float(vector.values[i]))
        for rank, i in enumerate(order, start=1)
    ]


def full_ranking(vector: CentralityVector) -> dict[str, tuple[int, float]]:
    """node id -> (1-based rank, value) over every node."""
    return {
        vector.node_ids[i]: (rank, float(vector.values[i]))
        for rank, i in enumerate(ranked_indices(vector), start=1)
    }


def write_centrality_csv(vector: CentralityVector, k: int, path) -> int:
    """Export ``node_id,metric,value,rank`` for the top ``k`` nodes, plus a
    ``<path>.meta`` sidecar echoing the metric parameters."""
    rows = top_k(vector, k)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "metric", "value", "rank"])
        for rank, node_id, value in rows:
            writer.writerow([node_id, vector.metric, fmt_float(value), rank])
    meta = Path(str(path) + ".meta")
    lines = [f"metric={vector.metric}"]
    for key in sorted(vector.params):
        lines.append(f"{key}={vector.params[key]}")
    meta.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(rows)
