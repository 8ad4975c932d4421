"""Tree-filtered, convex-weighted cosine retrieval over the asset catalog.

The total score of an asset against a plan query is the weighted sum of
per-slot cosine similarities: slot 0 is the image slot (max cosine over the
asset's views against the query view vector), the remaining slots pair the
asset's text annotations with the query's aspect vectors one-to-one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..planner.plans import InstancePlan
from .catalog import AssetRecord, EmptyCatalogError
from .embedder import IMAGE_SPACE, TEXT_SPACE, plan_aspects, plan_view_text, pseudo_embed


class SlotMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RetrievalWeights:
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("weights must be a non-empty vector")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @staticmethod
    def uniform(n_slots: int) -> "RetrievalWeights":
        return RetrievalWeights(np.full(n_slots, 1.0 / n_slots))

    @staticmethod
    def normalized(raw: Sequence[float]) -> "RetrievalWeights":
        w = np.asarray(raw, dtype=np.float64)
        total = float(w.sum())
        if total <= 0:
            raise ValueError("weights must have positive sum")
        return RetrievalWeights(w / total)


@dataclass(frozen=True)
class QueryEmbedding:
    """Per-modality unit query vectors derived from a plan's fields."""

    image: np.ndarray  # (d_img,)
    texts: np.ndarray  # (n_aspects, d_txt)

    @property
    def n_slots(self) -> int:
        return 1 + len(self.texts)


def query_from_plan(plan: InstancePlan, d_img: int, d_txt: int) -> QueryEmbedding:
    aspects = plan_aspects(plan.primary_function, plan.size_class, plan.style)
    return QueryEmbedding(
        image=pseudo_embed(
            plan_view_text(plan.primary_function, plan.size_class, plan.style), d_img, IMAGE_SPACE
        ),
        texts=np.stack([pseudo_embed(a, d_txt, TEXT_SPACE) for a in aspects]),
    )


def similarity(asset: AssetRecord, query: QueryEmbedding, weights: RetrievalWeights) -> float:
    """Convex-weighted sum of per-slot cosines; in [-1, 1] on unit vectors."""
    if len(weights.weights) != query.n_slots:
        raise SlotMismatchError(
            f"{len(weights.weights)} weights for {query.n_slots} query slots"
        )
    if len(asset.text_embeddings) != len(query.texts):
        raise SlotMismatchError(
            f"asset {asset.asset_id} has {len(asset.text_embeddings)} text slots, "
            f"query has {len(query.texts)}"
        )
    if asset.view_embeddings.shape[1] != len(query.image) or (
        asset.text_embeddings.shape[1] != query.texts.shape[1]
    ):
        raise SlotMismatchError(f"embedding dimensions disagree for asset {asset.asset_id}")
    view_cos = asset.view_embeddings.astype(np.float64) @ query.image.astype(np.float64)
    score = float(weights.weights[0]) * float(view_cos.max())
    text_cos = np.einsum(
        "ij,ij->i", asset.text_embeddings.astype(np.float64), query.texts.astype(np.float64)
    )
    score += float(np.dot(weights.weights[1:], text_cos))
    return float(score)


def tree_filter(
    catalog: Sequence[AssetRecord], plan: InstancePlan
) -> Tuple[List[AssetRecord], Tuple[str, ...]]:
    """Hierarchical hard-predicate narrowing: function, then size class.

    A level is skipped (relaxed) when applying it would empty the candidate
    set; the relaxed level names are reported alongside the candidates.
    """
    if not catalog:
        raise EmptyCatalogError("catalog is empty")
    relaxed: List[str] = []
    candidates = list(catalog)
    by_function = [a for a in candidates if a.function == plan.primary_function]
    if by_function:
        candidates = by_function
    else:
        relaxed.append("function")
    by_size = [a for a in candidates if a.size_class == plan.size_class]
    if by_size:
        candidates = by_size
    else:
        relaxed.append("size_class")
    return candidates, tuple(relaxed)


@dataclass(frozen=True)
class RankedRetrieval:
    items: Tuple[Tuple[str, float], ...]  # (asset_id, score), best first
    relaxed: Tuple[str, ...]


def retrieve(
    catalog: Sequence[AssetRecord],
    plan: InstancePlan,
    weights: RetrievalWeights | None = None,
    k: int = 1,
) -> RankedRetrieval:
    """Top-k assets for a plan: filter, score, sort by (-score, asset_id)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates, relaxed = tree_filter(catalog, plan)
    query = query_from_plan(
        plan, candidates[0].view_embeddings.shape[1], candidates[0].text_embeddings.shape[1]
    )
    if weights is None:
        weights = RetrievalWeights.uniform(query.n_slots)
    scored = [(asset.asset_id, similarity(asset, query, weights)) for asset in candidates]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return RankedRetrieval(tuple(scored[:k]), relaxed)
