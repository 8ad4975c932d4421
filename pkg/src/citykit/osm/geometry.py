"""Tag classification and geographic-to-local projection for OSM ways."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..palette import BUILDING, FOOTPATH, RAIL, TRAFFIC_ROAD, VEGETATION, WATER
from . import tags as T
from .parse import OsmDocument, OsmWay

EARTH_RADIUS_M = 6378137.0

POLYGON = "polygon"
POLYLINE = "polyline"


@dataclass(frozen=True)
class LocalProjector:
    """Equirectangular projection about a reference point: meters east/north."""

    lat0: float
    lon0: float

    def project(self, lat: float, lon: float) -> tuple[float, float]:
        x = math.radians(lon - self.lon0) * math.cos(math.radians(self.lat0)) * EARTH_RADIUS_M
        y = math.radians(lat - self.lat0) * EARTH_RADIUS_M
        return x, y

    @staticmethod
    def for_document(doc: OsmDocument) -> "LocalProjector":
        if not doc.nodes:
            return LocalProjector(0.0, 0.0)
        lats = [lat for lat, _ in doc.nodes.values()]
        lons = [lon for _, lon in doc.nodes.values()]
        return LocalProjector((min(lats) + max(lats)) / 2.0, (min(lons) + max(lons)) / 2.0)


@dataclass(frozen=True)
class ClassifiedFeature:
    """A way mapped to a layout class, in local metric coordinates.

    ``coords`` is (n, 2) float64 with columns (x east, y north). Polygons
    are closed rings (first vertex not repeated); polylines carry a stroke
    width in meters.
    """

    way_id: int
    class_id: int
    priority: int
    kind: str
    coords: np.ndarray
    width_m: float = 0.0


def _tag_class(way: OsmWay) -> Optional[tuple[int, str, float]]:
    """Resolve tags to (class_id, kind, width_m); None means skip."""
    tags = way.tags
    if "building" in tags:
        if not way.is_closed:
            return None
        return BUILDING, POLYGON, 0.0
    railway = tags.get("railway")
    if railway in T.RAIL_VALUES:
        if way.is_closed:
            return RAIL, POLYGON, 0.0
        return RAIL, POLYLINE, T.RAIL_WIDTH_M
    highway = tags.get("highway")
    if highway is not None:
        if highway in T.FOOTPATH_HIGHWAY_VALUES:
            return FOOTPATH, POLYLINE, T.FOOTPATH_WIDTH_M
        return TRAFFIC_ROAD, POLYLINE, T.road_width_m(highway)
    if tags.get("natural") == "water" or "water" in tags:
        if not way.is_closed:
            return None
        return WATER, POLYGON, 0.0
    if "waterway" in tags:
        return WATER, POLYLINE, T.WATERWAY_WIDTH_M
    for key in ("landuse", "natural", "leisure"):
        value = tags.get(key)
        if value is not None and (key, value) in T.VEGETATION_MATCHES:
            if not way.is_closed:
                return None
            return VEGETATION, POLYGON, 0.0
    return None


def classify(way: OsmWay, doc: OsmDocument, projector: LocalProjector) -> Optional[ClassifiedFeature]:
    """Map one resolved way to a ClassifiedFeature, or None (skip)."""
    resolved = _tag_class(way)
    if resolved is None:
        return None
    class_id, kind, width = resolved
    node_ids = way.node_ids
    if kind == POLYGON:
        node_ids = node_ids[:-1]  # drop the closing duplicate
        if len(node_ids) < 3:
            return None
    elif len(node_ids) < 2:
        return None
    coords = np.array(
        [projector.project(*doc.nodes[n]) for n in node_ids], dtype=np.float64
    )
    return ClassifiedFeature(
        way_id=way.id,
        class_id=class_id,
        priority=T.PAINT_PRIORITY[class_id],
        kind=kind,
        coords=coords,
        width_m=width,
    )


def classify_document(doc: OsmDocument, projector: Optional[LocalProjector] = None) -> list:
    """Classify every way in document order; unmatched ways are skipped."""
    projector = projector or LocalProjector.for_document(doc)
    features = []
    for way in doc.ways.values():
        feature = classify(way, doc, projector)
        if feature is not None:
            features.append(feature)
    return features
