"""Assemble layout + plans + placements + props into a scene manifest.

World frame: x east, y north, meters; the layout's south-west corner is
(0, 0), so row 0 (the northernmost row) sits at y = height * mpp. Trees
scatter over vegetation pixels (never within 2 m of a building),
streetlights pack along road centerlines at the requested spacing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence

import numpy as np

from .. import _kernels
from ..generate.procedural import derive_seed
from ..instances import InstanceDossier, InstanceId, building_ids
from ..layout import SemanticLayout
from ..palette import BUILDING, TRAFFIC_ROAD, VEGETATION, class_name
from ..placement.fit import Placement
from ..planner.plans import InstancePlan
from .manifest import (
    MANIFEST_VERSION,
    BuildingEntry,
    PropEntry,
    SceneManifest,
    SurfaceEntry,
)
from .textures import texture_tag


class MissingPlacementError(ValueError):
    def __init__(self, instance: InstanceId):
        self.instance = instance
        super().__init__(f"no placement for building instance {instance.class_id}/{instance.index}")


class AssetNotInCatalogError(ValueError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"placement references unknown asset {asset_id!r}")


@dataclass(frozen=True)
class PropScatterSpec:
    seed: int
    tree_density: float = 1.0  # trees per 100 m^2 of vegetation
    lamp_spacing: float = 25.0  # meters along road centerlines

    def __post_init__(self) -> None:
        if self.tree_density < 0:
            raise ValueError("tree_density must be >= 0")
        if self.lamp_spacing <= 0:
            raise ValueError("lamp_spacing must be positive")


def world_xy(col_px: float, row_px: float, height: int, mpp: float) -> tuple[float, float]:
    """Pixel coordinates (x=col, y=row, in pixel units) to world meters."""
    return col_px * mpp, (height - row_px) * mpp


def _scatter_trees(layout: SemanticLayout, spec: PropScatterSpec) -> List[PropEntry]:
    labels = np.asarray(layout.labels)
    veg_flat = np.flatnonzero(labels.ravel() == VEGETATION)
    if veg_flat.size == 0 or spec.tree_density == 0.0:
        return []
    mpp = layout.meters_per_pixel
    veg_area_m2 = veg_flat.size * mpp * mpp
    count = int(round(veg_area_m2 * spec.tree_density / 100.0))
    if count == 0:
        return []

    # Keep trees 2 m clear of building pixels.
    building_dist = np.sqrt(_kernels.edt_sq(labels == BUILDING)) * mpp
    clear = veg_flat[building_dist.ravel()[veg_flat] >= 2.0]
    if clear.size == 0:
        return []
    rng = np.random.default_rng(derive_seed(spec.seed, "trees"))
    chosen = rng.choice(clear, size=min(count, clear.size), replace=False)

    props: List[PropEntry] = []
    width = layout.width
    for flat in np.sort(chosen):
        row, col = divmod(int(flat), width)
        jx, jy = (rng.random() - 0.5) * 0.9, (rng.random() - 0.5) * 0.9
        x, y = world_xy(col + 0.5 + jx, row + 0.5 + jy, layout.height, mpp)
        props.append(
            PropEntry(
                kind="tree",
                position=(x, y),
                rotation=float((rng.random() * 2.0 - 1.0) * math.pi),
                scale=float(0.8 + 0.4 * rng.random()),
            )
        )
    return props


def _road_centerline(labels: np.ndarray) -> np.ndarray:
    """Road pixels on the ridge of the distance-to-edge field (skeleton proxy)."""
    road = labels == TRAFFIC_ROAD
    if not road.any():
        return np.zeros((0, 2), dtype=np.int64)
    dist = _kernels.edt_sq(~road)
    h, w = road.shape
    padded = np.full((h + 2, w + 2), -1.0)
    padded[1:-1, 1:-1] = dist
    neighborhood_max = dist.copy()
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            neighborhood_max = np.maximum(
                neighborhood_max, padded[1 + dy : h + 1 + dy, 1 + dx : w + 1 + dx]
            )
    ridge = road & (dist >= neighborhood_max)
    rows, cols = np.nonzero(ridge)
    return np.stack([rows, cols], axis=1)


def _place_streetlights(layout: SemanticLayout, spec: PropScatterSpec) -> List[PropEntry]:
    centerline = _road_centerline(np.asarray(layout.labels))
    if len(centerline) == 0:
        return []
    mpp = layout.meters_per_pixel
    spacing_px2 = (spec.lamp_spacing / mpp) ** 2
    accepted: List[tuple[int, int]] = []
    for row, col in centerline:  # row-major scan: deterministic greedy packing
        ok = True
        for ar, ac in accepted:
            if (row - ar) ** 2 + (col - ac) ** 2 < spacing_px2:
                ok = False
                break
        if ok:
            accepted.append((int(row), int(col)))
    props = []
    for row, col in accepted:
        x, y = world_xy(col + 0.5, row + 0.5, layout.height, mpp)
        props.append(PropEntry(kind="streetlight", position=(x, y), rotation=0.0, scale=1.0))
    return props


def build_manifest(
    layout: SemanticLayout,
    dossiers: Mapping[InstanceId, InstanceDossier],
    plans: Mapping[InstanceId, InstancePlan],
    placements: Sequence[Placement],
    catalog_ids: Iterable[str],
    scatter: PropScatterSpec,
    layout_ref: str = "",
) -> SceneManifest:
    known_assets = set(catalog_ids)
    by_instance: Dict[InstanceId, Placement] = {p.instance: p for p in placements}
    mpp = layout.meters_per_pixel

    buildings: List[BuildingEntry] = []
    for instance_id in building_ids(dict(dossiers)):
        placement = by_instance.get(instance_id)
        if placement is None:
            raise MissingPlacementError(instance_id)
        if placement.asset_id not in known_assets:
            raise AssetNotInCatalogError(placement.asset_id)
        dossier = dossiers[instance_id]
        cx, cy = dossier.centroid
        x, y = world_xy(cx, cy, layout.height, mpp)
        plan = plans.get(instance_id)
        plan_summary = (
            {
                "primary_function": plan.primary_function,
                "secondary_function": plan.secondary_function,
                "size_class": plan.size_class,
                "style": plan.style,
            }
            if plan
            else {}
        )
        buildings.append(
            BuildingEntry(
                instance=instance_id,
                asset_id=placement.asset_id,
                position=(x + placement.params.tx, y + placement.params.ty),
                rotation=placement.params.rotation,
                scale=placement.params.scale,
                plan=plan_summary,
            )
        )

    surfaces = [
        SurfaceEntry(
            instance=instance_id,
            class_name=class_name(instance_id.class_id),
            texture_tag=texture_tag(dossiers[instance_id]),
        )
        for instance_id in sorted(dossiers)
        if instance_id.class_id != BUILDING
    ]

    props = _scatter_trees(layout, scatter) + _place_streetlights(layout, scatter)
    return SceneManifest(
        version=MANIFEST_VERSION,
        meters_per_pixel=mpp,
        layout_ref=layout_ref,
        extent_m=(layout.width * mpp, layout.height * mpp),
        buildings=buildings,
        surfaces=surfaces,
        props=props,
    )
