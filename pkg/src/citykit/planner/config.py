"""Every tunable constant of the rule-based planner, in one place.

The rule backend assigns functions from instance geometry (area, road
distance), the district prompt, neighbor plans, and a deterministic hash
jitter. These constants were calibrated against the procedural generator's
parcel-size distribution so that district-level function mixes land in
realistic bands (residential districts ~60% residential; commercial
districts dominated by public service + commercial).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass(frozen=True)
class RuleTable:
    # Commercial-district prompt.
    commercial_min_area_m2: float = 600.0
    commercial_max_road_dist_m: float = 6.0
    commercial_ps_min_area_m2: float = 450.0
    commercial_jitter_healthcare: float = 0.10

    # Residential-district prompt.
    residential_ps_min_area_m2: float = 1500.0
    residential_ps_max_road_dist_m: float = 6.0
    residential_jitter: Tuple[Tuple[str, float], ...] = (
        ("commercial", 0.11),
        ("healthcare", 0.08),
        ("education", 0.05),
    )

    # Size classes from footprint area.
    size_low_max_m2: float = 800.0
    size_mid_max_m2: float = 3000.0

    # Neighbor conformity: residential flips to a clustered non-residential
    # function when enough planned neighbors share it.
    neighbor_adopt_min_count: int = 2
    neighbor_adopt_conformity: float = 0.5


DEFAULT_RULES = RuleTable()

SECONDARY_BY_FUNCTION: Dict[str, Tuple[str, ...]] = {
    "residential": ("apartments", "row_houses", "condominiums"),
    "commercial": ("store", "office", "shopping_mall"),
    "public_service": ("city_hall", "library", "community_center"),
    "healthcare": ("hospital", "clinic"),
    "education": ("school", "kindergarten"),
    "industrial": ("workshop", "warehouse"),
    "other": ("mixed_use",),
}

STYLES: Tuple[str, ...] = ("modern", "brick", "classical", "glass", "industrial")
