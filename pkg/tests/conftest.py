import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from intentcite.embeddings import EmbeddingSet
from intentcite.graph import CitationEdge, CitationGraph, build_graph
from intentcite.schema import LabelSchema

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def scicite_schema() -> LabelSchema:
    return LabelSchema(["background", "method", "result"])


@pytest.fixture
def three_cycle() -> CitationGraph:
    return build_graph(
        [CitationEdge("a", "b"), CitationEdge("b", "c"), CitationEdge("c", "a")]
    )


@pytest.fixture
def path_graph() -> CitationGraph:
    return build_graph([CitationEdge("a", "b"), CitationEdge("b", "c")])


def single_node_graph(node_id: str = "a") -> CitationGraph:
    return CitationGraph(
        [node_id],
        np.zeros(0, dtype=np.uint32),
        np.zeros(0, dtype=np.uint32),
        np.zeros(0, dtype=np.int32),
        np.zeros(0, dtype=np.float64),
        np.zeros(0, dtype=np.int64),
    )


def random_embedding_set(rng: np.random.Generator, count: int, dim: int) -> EmbeddingSet:
    es = EmbeddingSet(dim=dim)
    for i in range(count):
        es.add(f"r{i}", rng.standard_normal(dim).astype(np.float32))
    return es
