"""Infinite expansion: tile a large canvas from a partial-capable backend.

Tiles are placed row-major with a fixed overlap. Committed pixels outside
the blend band are preserved bit-exactly (enforced here, never trusted to
the backend). Inside the band, each committed pixel keeps its label when it
is at least as close to the deep committed interior as to the fresh
territory, measured by exact Euclidean distance; otherwise it takes the new
tile's label.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .. import _kernels
from ..layout import GenerationCondition, SemanticLayout
from .backend import GeneratorBackend, KnownRegion, UnsupportedConditionError, generate


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class ExpansionSpec:
    target_width: int
    target_height: int
    tile_size: int = 768
    overlap: int = 128
    blend_band: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.overlap < self.tile_size:
            raise ValueError("overlap must satisfy 0 < overlap < tile_size")
        if self.target_width < self.tile_size or self.target_height < self.tile_size:
            raise ValueError("target dimensions must be at least one tile")
        band = self.overlap if self.blend_band is None else self.blend_band
        if not 0 < band <= self.overlap:
            raise ValueError("blend_band must satisfy 0 < blend_band <= overlap")
        object.__setattr__(self, "blend_band", band)


def tile_positions(target: int, tile: int, overlap: int) -> List[int]:
    """Start offsets of tiles covering [0, target) with the given overlap."""
    positions = [0]
    while positions[-1] + tile < target:
        positions.append(min(positions[-1] + tile - overlap, target - tile))
    return positions


def expansion_seams(spec: ExpansionSpec) -> List[Tuple[str, int]]:
    """Frontier lines where fresh territory met committed canvas."""
    seams: List[Tuple[str, int]] = []
    for x0 in tile_positions(spec.target_width, spec.tile_size, spec.overlap)[1:]:
        seams.append(("v", x0 + spec.overlap))
    for y0 in tile_positions(spec.target_height, spec.tile_size, spec.overlap)[1:]:
        seams.append(("h", y0 + spec.overlap))
    return seams


def seam_discontinuity(layout: SemanticLayout, seams: Sequence[Tuple[str, int]]) -> float:
    """Fraction of cross-seam pixel pairs with differing classes, averaged over seams.

    A seam ("v", x) is the boundary between columns x-1 and x; ("h", y)
    between rows y-1 and y.
    """
    labels = layout.labels
    fractions = []
    for axis, index in seams:
        if axis == "v":
            if not 1 <= index <= layout.width - 1:
                raise OutOfRangeError(f"vertical seam {index} outside [1, {layout.width - 1}]")
            pairs = labels[:, index - 1] != labels[:, index]
        elif axis == "h":
            if not 1 <= index <= layout.height - 1:
                raise OutOfRangeError(f"horizontal seam {index} outside [1, {layout.height - 1}]")
            pairs = labels[index - 1, :] != labels[index, :]
        else:
            raise OutOfRangeError(f"seam axis must be 'v' or 'h', got {axis!r}")
        fractions.append(float(pairs.mean()))
    if not fractions:
        return 0.0
    return float(np.mean(fractions))


def _merge_tile(
    canvas: np.ndarray,
    committed: np.ndarray,
    tile_labels: np.ndarray,
    x0: int,
    y0: int,
    band: int,
) -> None:
    tile = tile_labels.shape[0]
    win_rows = slice(y0, y0 + tile)
    win_cols = slice(x0, x0 + tile)
    committed_win = committed[win_rows, win_cols]
    if not committed_win.any():
        canvas[win_rows, win_cols] = tile_labels
        committed[win_rows, win_cols] = True
        return

    # Pad the working window with canvas context so distances see committed
    # interior beyond the tile edge.
    h, w = canvas.shape
    py0 = max(0, y0 - band - 1)
    px0 = max(0, x0 - band - 1)
    py1 = min(h, y0 + tile + band + 1)
    px1 = min(w, x0 + tile + band + 1)
    ctx_committed = committed[py0:py1, px0:px1]
    fresh = np.zeros_like(ctx_committed)
    fresh[y0 - py0 : y0 - py0 + tile, x0 - px0 : x0 - px0 + tile] = ~committed_win

    d_fresh = _kernels.edt_sq(fresh)
    band_sq = float(band) * float(band)
    band_mask = ctx_committed & (d_fresh <= band_sq)
    deep = ctx_committed & ~band_mask
    d_deep = _kernels.edt_sq(deep)
    keep_committed = d_deep <= d_fresh  # ties keep the committed label

    sub = (slice(y0 - py0, y0 - py0 + tile), slice(x0 - px0, x0 - px0 + tile))
    in_band = band_mask[sub]
    keep = keep_committed[sub]
    window = canvas[win_rows, win_cols]
    take_old = committed_win & (~in_band | keep)
    canvas[win_rows, win_cols] = np.where(take_old, window, tile_labels)
    committed[win_rows, win_cols] = True


def expand(
    backend: GeneratorBackend, condition: GenerationCondition, spec: ExpansionSpec
) -> SemanticLayout:
    """Grow a (target_height, target_width) canvas tile by tile."""
    if not backend.supports_partial:
        raise UnsupportedConditionError(
            f"backend {backend.name!r} cannot outpaint (supports_partial is False)"
        )
    xs = tile_positions(spec.target_width, spec.tile_size, spec.overlap)
    ys = tile_positions(spec.target_height, spec.tile_size, spec.overlap)
    if len(xs) == 1 and len(ys) == 1:
        return generate(backend, condition, spec.tile_size)

    canvas = np.zeros((spec.target_height, spec.target_width), dtype=np.uint8)
    committed = np.zeros(canvas.shape, dtype=bool)
    mpp = None
    tile = spec.tile_size
    for y0 in ys:
        for x0 in xs:
            window = canvas[y0 : y0 + tile, x0 : x0 + tile]
            window_mask = committed[y0 : y0 + tile, x0 : x0 + tile]
            known = KnownRegion(window.copy(), window_mask.copy(), origin=(x0, y0))
            out = backend.generate_tile(condition, tile, tile, known)
            mpp = out.meters_per_pixel
            _merge_tile(canvas, committed, np.asarray(out.labels), x0, y0, spec.blend_band)
    return SemanticLayout(canvas, mpp)


def independent_tiling(
    backend: GeneratorBackend, condition: GenerationCondition, spec: ExpansionSpec
) -> Tuple[SemanticLayout, List[Tuple[str, int]]]:
    """Baseline stitching with no continuity: abutting tiles, derived seeds.

    Returns the stitched canvas and its seam lines, for comparison against
    :func:`expand`.
    """
    from .procedural import derive_seed

    canvas = np.zeros((spec.target_height, spec.target_width), dtype=np.uint8)
    tile = spec.tile_size
    xs = list(range(0, spec.target_width, tile))
    ys = list(range(0, spec.target_height, tile))
    mpp = None
    for j, y0 in enumerate(ys):
        for i, x0 in enumerate(xs):
            sub = GenerationCondition(
                seed=derive_seed(condition.seed, f"tile:{i},{j}"),
                ratios=condition.ratios,
                text=condition.text,
            )
            out = backend.generate_tile(condition=sub, width=tile, height=tile)
            mpp = out.meters_per_pixel
            h = min(tile, spec.target_height - y0)
            w = min(tile, spec.target_width - x0)
            canvas[y0 : y0 + h, x0 : x0 + w] = np.asarray(out.labels)[:h, :w]
    seams: List[Tuple[str, int]] = [("v", x) for x in xs[1:]] + [("h", y) for y in ys[1:]]
    return SemanticLayout(canvas, mpp), seams
