"""Synthetic asset catalogs for tests and offline pipeline runs.

Assets carry hash-embedder vectors of their own aspect strings mixed with
per-asset noise, so retrieval has real structure (matching function/style
scores higher) while staying fully deterministic in the seed.
"""
from __future__ import annotations

from typing import List

import numpy as np

from ..planner.config import STYLES
from .catalog import AssetRecord
from .embedder import IMAGE_SPACE, TEXT_SPACE, plan_aspects, plan_view_text, pseudo_embed, unit_f32

DEFAULT_D_IMG = 32
DEFAULT_D_TXT = 24
N_VIEWS = 12

_FUNCTION_WEIGHTS = (
    ("residential", 0.40),
    ("commercial", 0.22),
    ("public_service", 0.14),
    ("healthcare", 0.08),
    ("education", 0.07),
    ("industrial", 0.06),
    ("other", 0.03),
)

_FOOTPRINTS_BY_SIZE = {
    "low_rise": (8.0, 26.0),
    "mid_rise": (18.0, 52.0),
    "high_rise": (30.0, 80.0),
}
_FLOORS_BY_SIZE = {"low_rise": (1, 3), "mid_rise": (4, 12), "high_rise": (13, 40)}


def _pick_weighted(u: float, table) -> str:
    cum = 0.0
    for name, weight in table:
        cum += weight
        if u < cum:
            return name
    return table[-1][0]


def synth_catalog(
    n: int, seed: int, d_img: int = DEFAULT_D_IMG, d_txt: int = DEFAULT_D_TXT
) -> List[AssetRecord]:
    rng = np.random.default_rng(seed)
    records: List[AssetRecord] = []
    for i in range(n):
        function = _pick_weighted(float(rng.random()), _FUNCTION_WEIGHTS)
        size_class = ("low_rise", "mid_rise", "high_rise")[int(rng.integers(0, 3))]
        style = STYLES[int(rng.integers(0, len(STYLES)))]
        lo, hi = _FOOTPRINTS_BY_SIZE[size_class]
        width = float(np.round(rng.uniform(lo, hi), 1))
        depth = float(np.round(rng.uniform(lo, hi), 1))
        floors = int(rng.integers(*_FLOORS_BY_SIZE[size_class]))

        annotations = plan_aspects(function, size_class, style)
        text_vecs = np.stack(
            [
                unit_f32(
                    0.75 * pseudo_embed(a, d_txt, TEXT_SPACE).astype(np.float64)
                    + 0.25 * rng.standard_normal(d_txt) / np.sqrt(d_txt)
                )
                for a in annotations
            ]
        )
        view_anchor = pseudo_embed(plan_view_text(function, size_class, style), d_img, IMAGE_SPACE)
        view_vecs = np.stack(
            [
                unit_f32(
                    0.8 * view_anchor.astype(np.float64)
                    + 0.2 * rng.standard_normal(d_img) / np.sqrt(d_img)
                )
                for _ in range(N_VIEWS)
            ]
        )
        records.append(
            AssetRecord(
                asset_id=f"asset_{i:05d}",
                function=function,
                size_class=size_class,
                floors=floors,
                footprint_dims_m=(width, depth),
                style=style,
                annotations=tuple(annotations),
                view_embeddings=view_vecs,
                text_embeddings=text_vecs,
            )
        )
    return records
