"""Tag-to-class mapping and paint priorities for OSM ingestion.

This table is the single place that defines how raw OSM tags become the 7
layout classes and how wide linear features are stroked. Revise here, not
in the classifier.
"""
from __future__ import annotations

from ..palette import BUILDING, FOOTPATH, GROUND, RAIL, TRAFFIC_ROAD, VEGETATION, WATER

# Stroke widths for open (linear) ways, meters.
RAIL_WIDTH_M = 3.0
FOOTPATH_WIDTH_M = 2.0
WATERWAY_WIDTH_M = 4.0
DEFAULT_ROAD_WIDTH_M = 6.0
ROAD_WIDTHS_M = {
    "motorway": 12.0,
    "trunk": 12.0,
    "primary": 10.0,
    "secondary": 8.0,
}

RAIL_VALUES = {"rail", "tram", "subway"}
FOOTPATH_HIGHWAY_VALUES = {"footway", "path", "pedestrian", "steps", "cycleway"}

VEGETATION_MATCHES = {
    ("landuse", "forest"),
    ("landuse", "grass"),
    ("landuse", "meadow"),
    ("landuse", "recreation_ground"),
    ("natural", "wood"),
    ("natural", "scrub"),
    ("leisure", "park"),
    ("leisure", "garden"),
}

# Painted in ascending priority; equal priority resolved by document order
# (later way wins). Buildings dominate everything.
PAINT_PRIORITY = {
    GROUND: 0,
    VEGETATION: 1,
    WATER: 2,
    FOOTPATH: 3,
    TRAFFIC_ROAD: 4,
    RAIL: 4,
    BUILDING: 5,
}


def road_width_m(highway_value: str) -> float:
    return ROAD_WIDTHS_M.get(highway_value, DEFAULT_ROAD_WIDTH_M)
