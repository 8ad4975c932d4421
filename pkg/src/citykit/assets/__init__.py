"""Asset catalog, pseudo-embeddings, and weighted-similarity retrieval."""
from __future__ import annotations

from .catalog import (
    AssetRecord,
    EmptyCatalogError,
    HeaderMismatchError,
    NormViolationError,
    UnknownEnumError,
    load_catalog,
    write_catalog,
)
from .embedder import pseudo_embed, unit_f32
from .retrieval import (
    QueryEmbedding,
    RankedRetrieval,
    RetrievalWeights,
    SlotMismatchError,
    query_from_plan,
    retrieve,
    similarity,
    tree_filter,
)
from .synth import synth_catalog

__all__ = [
    "AssetRecord",
    "EmptyCatalogError",
    "HeaderMismatchError",
    "NormViolationError",
    "QueryEmbedding",
    "RankedRetrieval",
    "RetrievalWeights",
    "SlotMismatchError",
    "UnknownEnumError",
    "load_catalog",
    "pseudo_embed",
    "query_from_plan",
    "retrieve",
    "similarity",
    "synth_catalog",
    "tree_filter",
    "unit_f32",
    "write_catalog",
]
