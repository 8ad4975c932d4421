"""OSM XML parsing into an in-memory document (nodes + ways only)."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, Tuple


class MalformedXmlError(ValueError):
    def __init__(self, position: Tuple[int, int], detail: str):
        self.position = position
        super().__init__(f"malformed XML at line {position[0]}, column {position[1]}: {detail}")


class DanglingNodeRefError(ValueError):
    def __init__(self, way_id: int, node_id: int):
        self.way_id = way_id
        self.node_id = node_id
        super().__init__(f"way {way_id} references missing node {node_id}")


@dataclass(frozen=True)
class OsmWay:
    id: int
    node_ids: Tuple[int, ...]
    tags: Dict[str, str]

    @property
    def is_closed(self) -> bool:
        return len(self.node_ids) >= 2 and self.node_ids[0] == self.node_ids[-1]


@dataclass
class OsmDocument:
    """Nodes keyed by id -> (lat, lon); ways keyed by id, in document order."""

    nodes: Dict[int, Tuple[float, float]] = field(default_factory=dict)
    ways: Dict[int, OsmWay] = field(default_factory=dict)

    def way_coords(self, way: OsmWay) -> list:
        return [self.nodes[n] for n in way.node_ids]


def parse_osm(data: bytes) -> OsmDocument:
    """Parse OSM 0.6 XML (node / way / nd / tag elements).

    Raises MalformedXmlError for broken XML and DanglingNodeRefError when a
    way references a node id that is not present in the document.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXmlError(exc.position or (0, 0), str(exc)) from exc

    doc = OsmDocument()
    for node in root.iter("node"):
        doc.nodes[int(node.attrib["id"])] = (
            float(node.attrib["lat"]),
            float(node.attrib["lon"]),
        )
    for way in root.iter("way"):
        way_id = int(way.attrib["id"])
        node_ids = tuple(int(nd.attrib["ref"]) for nd in way.findall("nd"))
        tags = {t.attrib["k"]: t.attrib["v"] for t in way.findall("tag")}
        for node_id in node_ids:
            if node_id not in doc.nodes:
                raise DanglingNodeRefError(way_id, node_id)
        doc.ways[way_id] = OsmWay(way_id, node_ids, tags)
    return doc
