"""Symbolic texture tags for non-building surfaces.

Tags are consumer-facing names; the actual texture files live with the 3-D
host. Variants are picked deterministically from instance identity and
area so large parks and small lawns don't all look identical.
"""
from __future__ import annotations

import hashlib

from ..instances import InstanceDossier
from ..palette import FOOTPATH, RAIL, TRAFFIC_ROAD, VEGETATION, WATER

_VARIANTS = {
    VEGETATION: ("grass_park", "grass_meadow", "shrubland"),
    WATER: ("water_calm", "water_deep"),
    TRAFFIC_ROAD: ("asphalt_worn", "asphalt_fresh"),
    FOOTPATH: ("paving_stone", "gravel_path"),
    RAIL: ("rail_ballast",),
}


def texture_tag(dossier: InstanceDossier) -> str:
    options = _VARIANTS.get(dossier.id.class_id)
    if options is None:
        return "untextured"
    if dossier.id.class_id == WATER:
        # Big water bodies read as deep water.
        return options[1] if dossier.area_m2 > 5000.0 else options[0]
    digest = hashlib.sha256(
        f"{dossier.id.class_id}/{dossier.id.index}/{dossier.pixel_count}".encode()
    ).digest()
    return options[digest[0] % len(options)]
