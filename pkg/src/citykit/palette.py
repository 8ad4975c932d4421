"""Fixed 7-class palette for semantic city layouts.

Class ids are stable across the whole toolkit: rasters, PNG codecs,
dossiers, and manifests all speak the same ids. The RGB colors are the
interchange contract for indexed PNGs and must not change.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

N_CLASSES = 7

GROUND = 0
VEGETATION = 1
BUILDING = 2
RAIL = 3
TRAFFIC_ROAD = 4
FOOTPATH = 5
WATER = 6

CLASS_NAMES = (
    "ground",
    "vegetation",
    "building",
    "rail",
    "traffic_road",
    "footpath",
    "water",
)

# RGB triples, indexed by class id.
CLASS_COLORS: Tuple[Tuple[int, int, int], ...] = (
    (85, 107, 47),    # ground
    (0, 255, 0),      # vegetation
    (255, 165, 0),    # building
    (255, 0, 255),    # rail
    (200, 200, 200),  # traffic_road
    (255, 255, 0),    # footpath
    (0, 191, 255),    # water
)

# Alternate names accepted on ingestion (OSM-derived sources call class 0
# "terrain"; some tools write "road"/"street").
NAME_ALIASES = {
    "terrain": GROUND,
    "road": TRAFFIC_ROAD,
    "street": TRAFFIC_ROAD,
    "traffic_roads": TRAFFIC_ROAD,
}


@dataclass(frozen=True)
class ClassDescriptor:
    id: int
    name: str
    color: Tuple[int, int, int]


@dataclass(frozen=True)
class ClassPalette:
    """Ordered list of the 7 class descriptors.

    There is exactly one valid palette; ``default()`` returns it. The
    constructor validates so that hand-built palettes cannot drift.
    """

    classes: Tuple[ClassDescriptor, ...]

    def __post_init__(self) -> None:
        if len(self.classes) != N_CLASSES:
            raise ValueError(f"palette must have {N_CLASSES} classes, got {len(self.classes)}")
        ids = [c.id for c in self.classes]
        if ids != list(range(N_CLASSES)):
            raise ValueError(f"class ids must be 0..{N_CLASSES - 1} in order, got {ids}")
        names = [c.name for c in self.classes]
        if len(set(names)) != N_CLASSES:
            raise ValueError("class names must be unique")
        colors = [c.color for c in self.classes]
        if len(set(colors)) != N_CLASSES:
            raise ValueError("class colors must be unique")

    @staticmethod
    def default() -> "ClassPalette":
        return ClassPalette(
            tuple(
                ClassDescriptor(i, CLASS_NAMES[i], CLASS_COLORS[i])
                for i in range(N_CLASSES)
            )
        )

    def color_of(self, class_id: int) -> Tuple[int, int, int]:
        return self.classes[class_id].color

    def id_of(self, name: str) -> int:
        for c in self.classes:
            if c.name == name:
                return c.id
        if name in NAME_ALIASES:
            return NAME_ALIASES[name]
        raise KeyError(name)


def class_name(class_id: int) -> str:
    return CLASS_NAMES[class_id]
