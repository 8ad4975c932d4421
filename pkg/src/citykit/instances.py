"""Instance isolation and per-instance dossiers.

Instances are maximal 4-connected same-class regions (ground is background
and never instanced). Every dossier field is derived from pixel geometry:
exact Euclidean road distances, Chebyshev-2 neighbor adjacency, bbox
compactness. Dossiers serialize to JSON Lines, one record per instance, in
a documented field order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Tuple

import numpy as np

from . import _kernels
from .layout import SemanticLayout
from .palette import BUILDING, GROUND, TRAFFIC_ROAD, class_name


class InstanceId(NamedTuple):
    class_id: int
    index: int


@dataclass(frozen=True)
class Instance:
    """One isolated region: id plus its sorted flat pixel indices."""

    id: InstanceId
    flat_pixels: np.ndarray  # int64, ascending (row-major order)
    layout_width: int

    @property
    def pixel_count(self) -> int:
        return int(len(self.flat_pixels))

    def rows_cols(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.flat_pixels // self.layout_width, self.flat_pixels % self.layout_width


@dataclass(frozen=True)
class InstanceDossier:
    id: InstanceId
    pixel_count: int
    area_m2: float
    bbox: Tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open pixel bounds
    centroid: Tuple[float, float]  # (x, y) pixel coordinates of the mass center
    distance_to_road_m: float  # math.inf when the layout has no traffic roads
    neighbors: Tuple[Tuple[InstanceId, int], ...]  # (neighbor, shared-boundary pixel pairs)
    compactness: float

    @property
    def size_px(self) -> Tuple[int, int]:
        x0, y0, x1, y1 = self.bbox
        return x1 - x0, y1 - y0


def isolate_instances(layout: SemanticLayout) -> List[Instance]:
    """Connected components per class (4-connectivity), ground excluded.

    Ordered by (class_id, top-left-most pixel in row-major order); the
    per-class index in each InstanceId follows that order.
    """
    comp, n = _kernels.label_components(np.asarray(layout.labels), GROUND)
    if n == 0:
        return []
    flat_comp = comp.ravel()
    order = np.argsort(flat_comp, kind="stable")
    order = order[flat_comp[order] >= 0]
    boundaries = np.searchsorted(flat_comp[order], np.arange(n + 1))
    labels_flat = layout.labels.ravel()

    by_topleft: List[Tuple[int, int, np.ndarray]] = []
    for comp_id in range(n):
        pixels = np.sort(order[boundaries[comp_id] : boundaries[comp_id + 1]])
        by_topleft.append((int(labels_flat[pixels[0]]), int(pixels[0]), pixels))
    by_topleft.sort(key=lambda t: (t[0], t[1]))

    instances: List[Instance] = []
    counters = [0] * 7
    for class_id, _, pixels in by_topleft:
        instances.append(Instance(InstanceId(class_id, counters[class_id]), pixels, layout.width))
        counters[class_id] += 1
    return instances


def distance_transform(layout: SemanticLayout, target_class: int) -> np.ndarray:
    """Exact Euclidean distance in meters from each pixel center to the
    nearest target-class pixel center (+inf everywhere when absent)."""
    mask = np.asarray(layout.labels) == target_class
    return np.sqrt(_kernels.edt_sq(mask)) * layout.meters_per_pixel


# Chebyshev-2 neighborhood, one offset per unordered pixel pair.
_NEIGHBOR_OFFSETS = [
    (dy, dx)
    for dy in range(0, 3)
    for dx in range(-2, 3)
    if (dy > 0 or dx > 0) and max(abs(dy), abs(dx)) <= 2
]


def _adjacency_counts(comp: np.ndarray) -> Dict[Tuple[int, int], int]:
    """Count unordered pixel pairs between distinct components, one count per
    (pixel, offset-neighbor) pair within the Chebyshev-2 neighborhood."""
    h, w = comp.shape
    n = int(comp.max()) + 1
    counts: Dict[Tuple[int, int], int] = {}
    if n <= 1:
        return counts
    for dy, dx in _NEIGHBOR_OFFSETS:
        if dy >= h or abs(dx) >= w:
            continue
        a_cols = slice(0, w - dx) if dx >= 0 else slice(-dx, w)
        b_cols = slice(dx, w) if dx >= 0 else slice(0, w + dx)
        a = comp[0 : h - dy, a_cols]
        b = comp[dy:h, b_cols]
        sel = (a >= 0) & (b >= 0) & (a != b)
        if not sel.any():
            continue
        pa = a[sel].astype(np.int64)
        pb = b[sel].astype(np.int64)
        lo = np.minimum(pa, pb)
        hi = np.maximum(pa, pb)
        keys, cnts = np.unique(lo * n + hi, return_counts=True)
        for key, cnt in zip(keys.tolist(), cnts.tolist()):
            pair = (int(key // n), int(key % n))
            counts[pair] = counts.get(pair, 0) + int(cnt)
    return counts


def build_dossiers(
    layout: SemanticLayout, instances: Iterable[Instance]
) -> Dict[InstanceId, InstanceDossier]:
    instances = list(instances)
    mpp = layout.meters_per_pixel
    road_dist = distance_transform(layout, TRAFFIC_ROAD).ravel()

    comp, _ = _kernels.label_components(np.asarray(layout.labels), GROUND)
    comp_to_id: Dict[int, InstanceId] = {}
    for inst in instances:
        comp_to_id[int(comp.ravel()[inst.flat_pixels[0]])] = inst.id
    pair_counts = _adjacency_counts(comp) if len(instances) > 1 else {}
    neighbor_map: Dict[InstanceId, List[Tuple[InstanceId, int]]] = {inst.id: [] for inst in instances}
    for (ca, cb), cnt in pair_counts.items():
        ia, ib = comp_to_id[int(ca)], comp_to_id[int(cb)]
        neighbor_map[ia].append((ib, cnt))
        neighbor_map[ib].append((ia, cnt))

    dossiers: Dict[InstanceId, InstanceDossier] = {}
    for inst in instances:
        rows, cols = inst.rows_cols()
        x0, x1 = int(cols.min()), int(cols.max()) + 1
        y0, y1 = int(rows.min()), int(rows.max()) + 1
        centroid = (float(cols.mean()) + 0.5, float(rows.mean()) + 0.5)
        d_road = float(road_dist[inst.flat_pixels].min())
        dossiers[inst.id] = InstanceDossier(
            id=inst.id,
            pixel_count=inst.pixel_count,
            area_m2=inst.pixel_count * mpp * mpp,
            bbox=(x0, y0, x1, y1),
            centroid=centroid,
            distance_to_road_m=d_road if math.isfinite(d_road) else math.inf,
            neighbors=tuple(sorted(neighbor_map[inst.id])),
            compactness=inst.pixel_count / float((x1 - x0) * (y1 - y0)),
        )
    return dossiers


# -- JSONL export (field order is the documented record schema) --------------

def dossier_to_record(d: InstanceDossier) -> dict:
    return {
        "class_id": d.id.class_id,
        "class_name": class_name(d.id.class_id),
        "index": d.id.index,
        "pixel_count": d.pixel_count,
        "area_m2": d.area_m2,
        "bbox": list(d.bbox),
        "centroid": list(d.centroid),
        "distance_to_road_m": None if math.isinf(d.distance_to_road_m) else d.distance_to_road_m,
        "neighbors": [[n.class_id, n.index, cnt] for n, cnt in d.neighbors],
        "compactness": d.compactness,
        "size_px": list(d.size_px),
    }


def dossier_from_record(record: dict) -> InstanceDossier:
    dist = record["distance_to_road_m"]
    return InstanceDossier(
        id=InstanceId(record["class_id"], record["index"]),
        pixel_count=record["pixel_count"],
        area_m2=record["area_m2"],
        bbox=tuple(record["bbox"]),
        centroid=tuple(record["centroid"]),
        distance_to_road_m=math.inf if dist is None else float(dist),
        neighbors=tuple(
            (InstanceId(c, i), cnt) for c, i, cnt in record["neighbors"]
        ),
        compactness=record["compactness"],
    )


def write_dossiers(dossiers: Dict[InstanceId, InstanceDossier]) -> str:
    lines = [
        json.dumps(dossier_to_record(dossiers[key]), separators=(",", ":"))
        for key in sorted(dossiers)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def read_dossiers(text: str) -> Dict[InstanceId, InstanceDossier]:
    dossiers: Dict[InstanceId, InstanceDossier] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        d = dossier_from_record(json.loads(line))
        dossiers[d.id] = d
    return dossiers


def building_ids(dossiers: Dict[InstanceId, InstanceDossier]) -> List[InstanceId]:
    return sorted(key for key in dossiers if key.class_id == BUILDING)
