"""citykit-bridge: instantiate scene manifests inside Blender or a stub host."""
from __future__ import annotations

from .importer import AssetFileMissingError, BridgeConfig, SceneSummary, import_scene
from .manifest import ManifestFormatError, UnsupportedVersionError, load_manifest

__version__ = "0.1.0"

__all__ = [
    "AssetFileMissingError",
    "BridgeConfig",
    "ManifestFormatError",
    "SceneSummary",
    "UnsupportedVersionError",
    "import_scene",
    "load_manifest",
]
