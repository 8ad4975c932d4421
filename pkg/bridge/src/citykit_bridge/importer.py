"""Instantiate a scene manifest in a host: one object per building and prop.

Buildings load their mesh file when the asset directory provides one;
otherwise a placeholder box sized by a nominal footprint and a
size-class height stands in. Manifest positions are (x east, y north)
meters; hosts are z-up, so entries land at z=0 with yaw = rotation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .hosts import make_host
from .manifest import load_manifest

PLACEHOLDER_HEIGHTS_M = {"low_rise": 8.0, "mid_rise": 40.0, "high_rise": 100.0}
PLACEHOLDER_FOOTPRINT_M = (10.0, 10.0)
PROP_DIMENSIONS_M = {"tree": (2.0, 2.0, 6.0), "streetlight": (0.3, 0.3, 8.0)}

TEXTURE_COLORS = {
    "grass_park": (0.20, 0.55, 0.20, 1.0),
    "grass_meadow": (0.35, 0.60, 0.25, 1.0),
    "shrubland": (0.30, 0.45, 0.20, 1.0),
    "water_calm": (0.05, 0.45, 0.75, 1.0),
    "water_deep": (0.02, 0.25, 0.55, 1.0),
    "asphalt_worn": (0.25, 0.25, 0.25, 1.0),
    "asphalt_fresh": (0.15, 0.15, 0.15, 1.0),
    "paving_stone": (0.55, 0.52, 0.45, 1.0),
    "gravel_path": (0.60, 0.55, 0.45, 1.0),
    "rail_ballast": (0.40, 0.35, 0.30, 1.0),
}


class AssetFileMissingError(FileNotFoundError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"no mesh file for asset {asset_id!r} in the asset directory")


@dataclass(frozen=True)
class BridgeConfig:
    manifest_path: Path
    asset_dir: Optional[Path] = None
    placeholder_mode: bool = True  # substitute boxes when meshes are absent
    ground_plane: bool = False
    host: str = "stub"


@dataclass
class SceneSummary:
    counts: Dict[str, int] = field(default_factory=dict)
    total_objects: int = 0
    bounds_min: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    bounds_max: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    substituted_assets: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "counts": self.counts,
                "total_objects": self.total_objects,
                "bounds_min": list(self.bounds_min),
                "bounds_max": list(self.bounds_max),
                "substituted_assets": self.substituted_assets,
            },
            indent=2,
        ) + "\n"


def _mesh_path(asset_dir: Optional[Path], asset_id: str) -> Optional[Path]:
    if asset_dir is None:
        return None
    for suffix in (".obj", ".glb", ".gltf", ".fbx"):
        candidate = Path(asset_dir) / f"{asset_id}{suffix}"
        if candidate.exists():
            return candidate
    return None


def import_scene(config: BridgeConfig, host=None) -> SceneSummary:
    """Create one host object per manifest entry; returns the scene summary."""
    manifest = load_manifest(config.manifest_path)
    host = host if host is not None else make_host(config.host)
    summary = SceneSummary()

    def bump(kind: str) -> None:
        summary.counts[kind] = summary.counts.get(kind, 0) + 1

    for entry in manifest.buildings:
        name = f"building_{entry.instance[0]}_{entry.instance[1]}"
        mesh = _mesh_path(config.asset_dir, entry.asset_id)
        if mesh is None and not config.placeholder_mode:
            raise AssetFileMissingError(entry.asset_id)
        if mesh is None and config.asset_dir is not None:
            summary.substituted_assets.append(entry.asset_id)
        height = PLACEHOLDER_HEIGHTS_M.get(entry.size_class, PLACEHOLDER_HEIGHTS_M["low_rise"])
        host.add_object(
            name,
            "building",
            (entry.position[0], entry.position[1], 0.0),
            entry.rotation,
            entry.scale,
            mesh_file=str(mesh) if mesh else None,
            dimensions=None if mesh else (*PLACEHOLDER_FOOTPRINT_M, height),
        )
        bump("building")

    for i, prop in enumerate(manifest.props):
        name = f"{prop.kind}_{i}"
        host.add_object(
            name,
            prop.kind,
            (prop.position[0], prop.position[1], 0.0),
            prop.rotation,
            prop.scale,
            dimensions=PROP_DIMENSIONS_M.get(prop.kind, (1.0, 1.0, 1.0)),
        )
        bump(prop.kind)

    if config.ground_plane:
        host.add_object(
            "ground_plane",
            "ground",
            (manifest.extent_m[0] / 2.0, manifest.extent_m[1] / 2.0, 0.0),
            0.0,
            1.0,
            dimensions=(manifest.extent_m[0], manifest.extent_m[1], 0.01),
        )
        bump("ground")

    summary.total_objects = host.object_count()
    summary.bounds_min, summary.bounds_max = host.scene_bounds()
    return summary
