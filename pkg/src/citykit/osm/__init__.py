"""OSM ingestion: parse XML, classify ways to layout classes, rasterize."""
from __future__ import annotations

from .geometry import ClassifiedFeature, LocalProjector, classify, classify_document
from .parse import DanglingNodeRefError, MalformedXmlError, OsmDocument, OsmWay, parse_osm
from .rasterize import SelfIntersectingRingError, rasterize

__all__ = [
    "ClassifiedFeature",
    "DanglingNodeRefError",
    "LocalProjector",
    "MalformedXmlError",
    "OsmDocument",
    "OsmWay",
    "SelfIntersectingRingError",
    "classify",
    "classify_document",
    "parse_osm",
    "rasterize",
]
