"""Reader for the scene-manifest file format (version 1).

The bridge consumes the manifest file only; it never imports the producing
toolkit. Schema: a JSON object with version, meters_per_pixel, layout_ref,
extent_m, buildings[], surfaces[], props[].
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

SUPPORTED_VERSIONS = (1,)


class UnsupportedVersionError(ValueError):
    def __init__(self, version):
        self.version = version
        super().__init__(f"manifest version {version!r} is not supported (know {SUPPORTED_VERSIONS})")


class ManifestFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Building:
    instance: Tuple[int, int]
    asset_id: str
    position: Tuple[float, float]
    rotation: float
    scale: float
    size_class: str


@dataclass(frozen=True)
class Prop:
    kind: str
    position: Tuple[float, float]
    rotation: float
    scale: float


@dataclass
class Manifest:
    version: int
    extent_m: Tuple[float, float]
    buildings: List[Building] = field(default_factory=list)
    props: List[Prop] = field(default_factory=list)
    surfaces: List[Dict] = field(default_factory=list)


def load_manifest(path: Path) -> Manifest:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestFormatError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise ManifestFormatError("manifest must be a JSON object with a version field")
    if doc["version"] not in SUPPORTED_VERSIONS:
        raise UnsupportedVersionError(doc["version"])
    try:
        extent = (float(doc["extent_m"][0]), float(doc["extent_m"][1]))
        buildings = [
            Building(
                instance=(int(b["instance"][0]), int(b["instance"][1])),
                asset_id=str(b["asset_id"]),
                position=(float(b["position"][0]), float(b["position"][1])),
                rotation=float(b["rotation"]),
                scale=float(b["scale"]),
                size_class=str(b.get("plan", {}).get("size_class", "low_rise")),
            )
            for b in doc["buildings"]
        ]
        props = [
            Prop(
                kind=str(p["kind"]),
                position=(float(p["position"][0]), float(p["position"][1])),
                rotation=float(p["rotation"]),
                scale=float(p["scale"]),
            )
            for p in doc["props"]
        ]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ManifestFormatError(f"malformed manifest entry: {exc}") from exc
    return Manifest(
        version=int(doc["version"]),
        extent_m=extent,
        buildings=buildings,
        props=props,
        surfaces=list(doc.get("surfaces", [])),
    )
