"""Citation intent classification and intent-filtered network analysis.

The package splits into ingestion (records, embeddings, splits), the
semi-supervised GAN classifier (:mod:`intentcite.gan`), graph building,
centrality metrics and intent filtering, all wired together by the
``intentcite`` command-line tool.
"""

from .embeddings import EmbeddingSet, read_embeddings, write_embeddings
from .errors import (
    CorruptionError,
    FormatError,
    IntentCiteError,
    ParameterError,
    ValidationError,
)
from .filtering import (
    FilterSpec,
    ImpactReport,
    RankShiftReport,
    export_bump_data,
    filter_graph,
    impact_report,
    rank_shift,
)
from .gan import GanIntentClassifier, GanModel, TrainConfig, classify, evaluate, train
from .graph import (
    CitationEdge,
    CitationGraph,
    build_graph,
    largest_component,
    weakly_connected_components,
)
from .centrality import (
    CentralityVector,
    betweenness,
    closeness,
    degree,
    pagerank,
    top_k,
)
from .records import CitationRecord, parse_jsonl, read_csv, write_csv
from .schema import LabelSchema, load_schema, save_schema
from .splits import DatasetSplit, make_split, official_split

__version__ = "0.1.0"

__all__ = [
    "CentralityVector",
    "CitationEdge",
    "CitationGraph",
    "CitationRecord",
    "CorruptionError",
    "DatasetSplit",
    "EmbeddingSet",
    "FilterSpec",
    "FormatError",
    "GanIntentClassifier",
    "GanModel",
    "ImpactReport",
    "IntentCiteError",
    "LabelSchema",
    "ParameterError",
    "RankShiftReport",
    "TrainConfig",
    "ValidationError",
    "betweenness",
    "build_graph",
    "classify",
    "closeness",
    "degree",
    "evaluate",
    "export_bump_data",
    "filter_graph",
    "impact_report",
    "largest_component",
    "load_schema",
    "make_split",
    "official_split",
    "pagerank",
    "parse_jsonl",
    "rank_shift",
    "read_csv",
    "read_embeddings",
    "save_schema",
    "top_k",
    "train",
    "weakly_connected_components",
    "write_csv",
    "write_embeddings",
]
