from __future__ import annotations

import math

import numpy as np
import pytest

from citykit.layout import compute_ratios
from citykit.osm import (
    DanglingNodeRefError,
    LocalProjector,
    MalformedXmlError,
    SelfIntersectingRingError,
    classify,
    classify_document,
    parse_osm,
    rasterize,
)
from citykit.osm.geometry import POLYGON, POLYLINE, ClassifiedFeature
from citykit.palette import BUILDING, FOOTPATH, GROUND, TRAFFIC_ROAD, VEGETATION, WATER

MPP = 0.5


def osm_xml(body: str) -> bytes:
    return f'<?xml version="1.0"?><osm version="0.6">{body}</osm>'.encode()


BUILDING_FIXTURE = osm_xml(
    """
    <node id="1" lat="0.0" lon="0.0"/>
    <node id="2" lat="0.0" lon="0.0001"/>
    <node id="3" lat="0.0001" lon="0.0001"/>
    <node id="4" lat="0.0001" lon="0.0"/>
    <way id="10">
      <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
      <tag k="building" v="yes"/>
    </way>
    """
)


class TestParse:
    def test_fixture_counts(self):
        doc = parse_osm(BUILDING_FIXTURE)
        assert len(doc.nodes) == 4
        assert len(doc.ways) == 1
        way = doc.ways[10]
        assert way.tags == {"building": "yes"}
        assert way.is_closed

    def test_empty_document(self):
        doc = parse_osm(b"<osm/>")
        assert not doc.nodes and not doc.ways

    def test_dangling_node_ref(self):
        xml = osm_xml('<node id="1" lat="0" lon="0"/><way id="5"><nd ref="1"/><nd ref="99"/></way>')
        with pytest.raises(DanglingNodeRefError) as err:
            parse_osm(xml)
        assert err.value.way_id == 5 and err.value.node_id == 99

    def test_malformed_xml(self):
        with pytest.raises(MalformedXmlError):
            parse_osm(b"<osm><way>")


def square_feature(class_id, x0, y0, side, priority=None, way_id=1):
    from citykit.osm.tags import PAINT_PRIORITY

    coords = np.array(
        [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)], dtype=np.float64
    )
    return ClassifiedFeature(
        way_id=way_id,
        class_id=class_id,
        priority=PAINT_PRIORITY[class_id] if priority is None else priority,
        kind=POLYGON,
        coords=coords,
        width_m=0.0,
    )


class TestClassify:
    def test_building_way(self):
        doc = parse_osm(BUILDING_FIXTURE)
        feature = classify(doc.ways[10], doc, LocalProjector(0.0, 0.0))
        assert feature.class_id == BUILDING
        assert feature.kind == POLYGON
        assert feature.priority == 5

    def test_footway_is_two_meter_polyline(self):
        xml = osm_xml(
            '<node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.001"/>'
            '<way id="7"><nd ref="1"/><nd ref="2"/><tag k="highway" v="footway"/></way>'
        )
        doc = parse_osm(xml)
        feature = classify(doc.ways[7], doc, LocalProjector(0.0, 0.0))
        assert feature.class_id == FOOTPATH
        assert feature.kind == POLYLINE
        assert feature.width_m == 2.0

    def test_unmapped_landuse_skipped(self):
        xml = osm_xml(
            '<node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.001"/>'
            '<node id="3" lat="0.001" lon="0.001"/>'
            '<way id="8"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="1"/>'
            '<tag k="landuse" v="retail"/></way>'
        )
        doc = parse_osm(xml)
        assert classify(doc.ways[8], doc, LocalProjector(0.0, 0.0)) is None

    def test_road_width_by_class(self):
        for highway, width in (("motorway", 12.0), ("primary", 10.0), ("secondary", 8.0), ("residential", 6.0)):
            xml = osm_xml(
                '<node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.001"/>'
                f'<way id="9"><nd ref="1"/><nd ref="2"/><tag k="highway" v="{highway}"/></way>'
            )
            doc = parse_osm(xml)
            feature = classify(doc.ways[9], doc, LocalProjector(0.0, 0.0))
            assert feature.class_id == TRAFFIC_ROAD and feature.width_m == width


class TestRasterize:
    def test_ten_meter_building_is_exactly_400_pixels(self):
        feature = square_feature(BUILDING, 0.0, 0.0, 10.0)
        layout = rasterize([feature], origin=(0.0, 20.0), size=(64, 64), meters_per_pixel=MPP)
        assert int((layout.labels == BUILDING).sum()) == 400

    def test_no_features_is_all_ground(self):
        layout = rasterize([], origin=(0.0, 0.0), size=16, meters_per_pixel=MPP)
        assert np.all(layout.labels == GROUND)

    def test_building_overwrites_water(self):
        water = square_feature(WATER, 0.0, 0.0, 12.0, way_id=1)
        building = square_feature(BUILDING, 3.0, 3.0, 6.0, way_id=2)
        layout = rasterize([building, water], origin=(0.0, 16.0), size=(40, 40), meters_per_pixel=MPP)
        # the building square is painted over the water despite document order
        assert int((layout.labels == BUILDING).sum()) == 144
        assert int((layout.labels == WATER).sum()) == 12 * 12 * 4 - 144

    def test_per_pixel_point_in_polygon_oracle(self):
        from test_kernels import point_in_polygon

        rng = np.random.default_rng(31)
        # star-convex polygon: sorted angles around a center never self-intersect
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=6))
        radii = rng.uniform(2.0, 6.0, size=6)
        xs = 7.0 + radii * np.cos(angles)
        ys = 7.0 + radii * np.sin(angles)
        coords = np.stack([xs, ys], axis=1)
        feature = ClassifiedFeature(1, VEGETATION, 1, POLYGON, coords, 0.0)
        origin = (0.0, 16.0)
        layout = rasterize([feature], origin, size=(32, 32), meters_per_pixel=MPP)
        if_self = SelfIntersectingRingError
        for r in range(32):
            for c in range(32):
                px = origin[0] + (c + 0.5) * MPP
                py = origin[1] - (r + 0.5) * MPP
                expected = point_in_polygon(px, py, xs, ys)
                assert (layout.labels[r, c] == VEGETATION) == expected

    def test_self_intersecting_ring_rejected(self):
        bowtie = np.array([(0, 0), (10, 10), (10, 0), (0, 10)], dtype=np.float64)
        feature = ClassifiedFeature(77, BUILDING, 5, POLYGON, bowtie, 0.0)
        with pytest.raises(SelfIntersectingRingError) as err:
            rasterize([feature], (0.0, 16.0), 32, MPP)
        assert err.value.way_id == 77

    def test_priority_monotonicity(self):
        water = square_feature(WATER, 0.0, 0.0, 12.0, way_id=1)
        building = square_feature(BUILDING, 3.0, 3.0, 6.0, way_id=2)
        low = rasterize([square_feature(WATER, 0, 0, 12, priority=1), building], (0.0, 16.0), 40, MPP)
        high = rasterize([square_feature(WATER, 0, 0, 12, priority=9), building], (0.0, 16.0), 40, MPP)
        assert int((high.labels == WATER).sum()) >= int((low.labels == WATER).sum())

    def test_determinism(self):
        doc = parse_osm(BUILDING_FIXTURE)
        features = classify_document(doc)
        a = rasterize(features, (-20.0, 20.0), 96, MPP)
        b = rasterize(features, (-20.0, 20.0), 96, MPP)
        assert a == b

    def test_convex_area_conservation(self):
        # painted-pixel count within perimeter/mpp of analytic area/mpp^2
        side = 13.0
        feature = square_feature(BUILDING, 1.3, 2.7, side)
        layout = rasterize([feature], (0.0, 32.0), (80, 80), MPP)
        painted = int((layout.labels == BUILDING).sum())
        analytic = side * side / (MPP * MPP)
        assert abs(painted - analytic) <= 4 * side / MPP


class TestEndToEndFixture:
    def test_square_building_road_park(self):
        # ~0.0001 deg = 11.1 m at the equator; fixture spans a 384 m patch
        xml = osm_xml(
            """
            <node id="1" lat="0.00000" lon="0.00000"/>
            <node id="2" lat="0.00000" lon="0.00009"/>
            <node id="3" lat="0.00009" lon="0.00009"/>
            <node id="4" lat="0.00009" lon="0.00000"/>
            <node id="5" lat="-0.0004" lon="-0.001"/>
            <node id="6" lat="-0.0004" lon="0.001"/>
            <node id="7" lat="0.0004" lon="-0.001"/>
            <node id="8" lat="0.0008" lon="-0.0008"/>
            <node id="9" lat="0.0008" lon="-0.0004"/>
            <node id="10" lat="0.0004" lon="-0.0004"/>
            <way id="100">
              <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
              <tag k="building" v="yes"/>
            </way>
            <way id="101"><nd ref="5"/><nd ref="6"/><tag k="highway" v="residential"/></way>
            <way id="102">
              <nd ref="7"/><nd ref="8"/><nd ref="9"/><nd ref="10"/><nd ref="7"/>
              <tag k="leisure" v="park"/>
            </way>
            """
        )
        doc = parse_osm(xml)
        features = classify_document(doc)
        assert sorted(f.class_id for f in features) == [VEGETATION, BUILDING, TRAFFIC_ROAD]
        layout = rasterize(features, (-192.0, 192.0), 768, MPP)
        counts = np.bincount(layout.labels.ravel(), minlength=7)
        assert counts[BUILDING] > 0 and counts[TRAFFIC_ROAD] > 0 and counts[VEGETATION] > 0
        ratios = compute_ratios(layout)
        assert abs(float(ratios.ratios.sum()) - 1.0) < 1e-12
        # determinism across repeated ingestion
        again = rasterize(classify_document(parse_osm(xml)), (-192.0, 192.0), 768, MPP)
        assert layout == again
