"""Paint classified features onto a semantic layout raster.

Pixel ownership is decided by the pixel-center rule: a polygon owns the
centers inside it (even-odd), a polyline owns centers within half its
stroke width. Features paint in ascending (priority, document order), so
later and higher-priority features overwrite.
"""
from __future__ import annotations

from typing import Iterable, Tuple, Union

import numpy as np

from .. import _kernels
from ..layout import SemanticLayout
from ..palette import GROUND
from .geometry import POLYGON, ClassifiedFeature


class SelfIntersectingRingError(ValueError):
    def __init__(self, way_id: int):
        self.way_id = way_id
        super().__init__(f"polygon ring of way {way_id} self-intersects")


def _orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax: float, ay: float, bx: float, by: float, px: float, py: float) -> bool:
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _orient(*p3, *p4, *p1)
    d2 = _orient(*p3, *p4, *p2)
    d3 = _orient(*p1, *p2, *p3)
    d4 = _orient(*p1, *p2, *p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(*p3, *p4, *p1):
        return True
    if d2 == 0 and _on_segment(*p3, *p4, *p2):
        return True
    if d3 == 0 and _on_segment(*p1, *p2, *p3):
        return True
    if d4 == 0 and _on_segment(*p1, *p2, *p4):
        return True
    return False


def ring_self_intersects(coords: np.ndarray) -> bool:
    """True when any two non-adjacent ring edges touch or cross."""
    n = len(coords)
    edges = [(tuple(coords[i]), tuple(coords[(i + 1) % n])) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if _segments_intersect(*edges[i], *edges[j]):
                return True
    return False


def rasterize(
    features: Iterable[ClassifiedFeature],
    origin: Tuple[float, float],
    size: Union[int, Tuple[int, int]],
    meters_per_pixel: float,
) -> SemanticLayout:
    """Rasterize features over a ground background.

    ``origin`` is the metric coordinate (x east, y north) of the layout's
    top-left (north-west) outer corner; rows run southward from it.
    """
    if meters_per_pixel <= 0:
        raise ValueError("meters_per_pixel must be positive")
    if isinstance(size, int):
        width = height = size
    else:
        width, height = size
    if width < 1 or height < 1:
        raise ValueError("size must be at least 1x1")

    ox, oy = origin
    labels = np.full((height, width), GROUND, dtype=np.uint8)
    ordered = sorted(enumerate(features), key=lambda kv: (kv[1].priority, kv[0]))
    for _, feature in ordered:
        xs = (feature.coords[:, 0] - ox) / meters_per_pixel
        ys = (oy - feature.coords[:, 1]) / meters_per_pixel
        if feature.kind == POLYGON:
            if ring_self_intersects(feature.coords):
                raise SelfIntersectingRingError(feature.way_id)
            _kernels.fill_polygon(labels, feature.class_id, xs, ys)
        else:
            half_width_px = feature.width_m / 2.0 / meters_per_pixel
            _kernels.stroke_polyline(labels, feature.class_id, xs, ys, half_width_px)
    return SemanticLayout(labels, meters_per_pixel)
