"""Asset placement: Powell minimizer, footprint IoU, collision resolution."""
from __future__ import annotations

from .fit import (
    SCALE_BOUNDS,
    CollisionEvent,
    DegenerateFootprintError,
    InstanceMask,
    Placement,
    PlacementConfig,
    PlacementParams,
    canonical_rotation,
    footprint_iou,
    place_asset,
    resolve_collisions,
    wrap_rotation,
)
from .powell import NonFiniteObjectiveError, PowellResult, powell_minimize

__all__ = [
    "CollisionEvent",
    "DegenerateFootprintError",
    "InstanceMask",
    "NonFiniteObjectiveError",
    "Placement",
    "PlacementConfig",
    "PlacementParams",
    "PowellResult",
    "SCALE_BOUNDS",
    "canonical_rotation",
    "footprint_iou",
    "place_asset",
    "powell_minimize",
    "resolve_collisions",
    "wrap_rotation",
]
