"""Versioned scene manifest: the hand-off file for 3-D construction.

A human-diffable JSON document binding layout, building placements,
surface texture tags, and scattered props. Unknown top-level fields are
preserved through a read/write round trip (forward compatibility).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..instances import InstanceId

MANIFEST_VERSION = 1

_KNOWN_FIELDS = {
    "version",
    "meters_per_pixel",
    "layout_ref",
    "extent_m",
    "buildings",
    "surfaces",
    "props",
}

PROP_KINDS = ("tree", "streetlight")


class SchemaViolationError(ValueError):
    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"{path}: {detail}")


@dataclass(frozen=True)
class BuildingEntry:
    instance: InstanceId
    asset_id: str
    position: Tuple[float, float]  # meters (x east, y north) from the layout origin
    rotation: float  # radians CCW
    scale: float
    plan: Dict[str, str]  # primary/secondary function, size_class, style


@dataclass(frozen=True)
class SurfaceEntry:
    instance: InstanceId
    class_name: str
    texture_tag: str


@dataclass(frozen=True)
class PropEntry:
    kind: str
    position: Tuple[float, float]
    rotation: float
    scale: float


@dataclass
class SceneManifest:
    version: int
    meters_per_pixel: float
    layout_ref: str
    extent_m: Tuple[float, float]
    buildings: List[BuildingEntry] = field(default_factory=list)
    surfaces: List[SurfaceEntry] = field(default_factory=list)
    props: List[PropEntry] = field(default_factory=list)
    extras: Dict[str, object] = field(default_factory=dict)


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise SchemaViolationError(f"{path}.{key}", "missing required field")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaViolationError(f"{path}.{key}", f"expected a number, got {type(value).__name__}")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaViolationError(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _pair(value, path: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaViolationError(path, "expected a pair of numbers")
    return float(value[0]), float(value[1])


def _instance(value, path: str) -> InstanceId:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaViolationError(path, "expected [class_id, index]")
    return InstanceId(int(value[0]), int(value[1]))


def write_manifest(manifest: SceneManifest) -> bytes:
    doc: Dict[str, object] = {
        "version": manifest.version,
        "meters_per_pixel": manifest.meters_per_pixel,
        "layout_ref": manifest.layout_ref,
        "extent_m": list(manifest.extent_m),
        "buildings": [
            {
                "instance": list(b.instance),
                "asset_id": b.asset_id,
                "position": list(b.position),
                "rotation": b.rotation,
                "scale": b.scale,
                "plan": b.plan,
            }
            for b in manifest.buildings
        ],
        "surfaces": [
            {
                "instance": list(s.instance),
                "class": s.class_name,
                "texture_tag": s.texture_tag,
            }
            for s in manifest.surfaces
        ],
        "props": [
            {
                "kind": p.kind,
                "position": list(p.position),
                "rotation": p.rotation,
                "scale": p.scale,
            }
            for p in manifest.props
        ],
    }
    for key, value in manifest.extras.items():
        if key not in _KNOWN_FIELDS:
            doc[key] = value
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def read_manifest(data: bytes) -> SceneManifest:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolationError("$", f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolationError("$", "top level must be an object")
    version = _require(doc, "version", int, "$")
    mpp = _require(doc, "meters_per_pixel", float, "$")
    layout_ref = _require(doc, "layout_ref", str, "$")
    extent = _pair(_require(doc, "extent_m", list, "$"), "$.extent_m")

    buildings = []
    for i, b in enumerate(_require(doc, "buildings", list, "$")):
        path = f"$.buildings[{i}]"
        buildings.append(
            BuildingEntry(
                instance=_instance(_require(b, "instance", list, path), f"{path}.instance"),
                asset_id=_require(b, "asset_id", str, path),
                position=_pair(_require(b, "position", list, path), f"{path}.position"),
                rotation=_require(b, "rotation", float, path),
                scale=_require(b, "scale", float, path),
                plan=dict(_require(b, "plan", dict, path)),
            )
        )
    surfaces = []
    for i, s in enumerate(_require(doc, "surfaces", list, "$")):
        path = f"$.surfaces[{i}]"
        surfaces.append(
            SurfaceEntry(
                instance=_instance(_require(s, "instance", list, path), f"{path}.instance"),
                class_name=_require(s, "class", str, path),
                texture_tag=_require(s, "texture_tag", str, path),
            )
        )
    props = []
    for i, p in enumerate(_require(doc, "props", list, "$")):
        path = f"$.props[{i}]"
        kind = _require(p, "kind", str, path)
        if kind not in PROP_KINDS:
            raise SchemaViolationError(f"{path}.kind", f"unknown prop kind {kind!r}")
        props.append(
            PropEntry(
                kind=kind,
                position=_pair(_require(p, "position", list, path), f"{path}.position"),
                rotation=_require(p, "rotation", float, path),
                scale=_require(p, "scale", float, path),
            )
        )
    extras = {k: v for k, v in doc.items() if k not in _KNOWN_FIELDS}
    return SceneManifest(
        version=version,
        meters_per_pixel=mpp,
        layout_ref=layout_ref,
        extent_m=extent,
        buildings=buildings,
        surfaces=surfaces,
        props=props,
        extras=extras,
    )
