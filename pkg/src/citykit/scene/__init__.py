"""Scene manifest assembly and serialization."""
from __future__ import annotations

from .export import (
    AssetNotInCatalogError,
    MissingPlacementError,
    PropScatterSpec,
    build_manifest,
    world_xy,
)
from .manifest import (
    MANIFEST_VERSION,
    BuildingEntry,
    PropEntry,
    SceneManifest,
    SchemaViolationError,
    SurfaceEntry,
    read_manifest,
    write_manifest,
)
from .textures import texture_tag

__all__ = [
    "AssetNotInCatalogError",
    "BuildingEntry",
    "MANIFEST_VERSION",
    "MissingPlacementError",
    "PropEntry",
    "PropScatterSpec",
    "SceneManifest",
    "SchemaViolationError",
    "SurfaceEntry",
    "build_manifest",
    "read_manifest",
    "texture_tag",
    "world_xy",
    "write_manifest",
]
