from __future__ import annotations

import struct
from collections import Counter

import numpy as np
import pytest

from citykit.layout import (
    ClassRatios,
    LengthMismatchError,
    SemanticLayout,
    UnknownColorError,
    average_class_error,
    compute_ratios,
    decode_png,
    encode_png,
    read_ratio_sidecar,
    write_ratio_sidecar,
)
from citykit.palette import (
    BUILDING,
    CLASS_COLORS,
    GROUND,
    N_CLASSES,
    WATER,
    ClassPalette,
)
from conftest import random_layout


class TestPalette:
    def test_default_palette_is_the_fixed_legend(self):
        palette = ClassPalette.default()
        assert [c.name for c in palette.classes] == [
            "ground", "vegetation", "building", "rail", "traffic_road", "footpath", "water",
        ]
        assert palette.color_of(GROUND) == (85, 107, 47)
        assert palette.color_of(WATER) == (0, 191, 255)
        assert palette.color_of(BUILDING) == (255, 165, 0)

    def test_terrain_alias_maps_to_ground(self):
        assert ClassPalette.default().id_of("terrain") == GROUND

    def test_duplicate_colors_rejected(self):
        palette = ClassPalette.default()
        broken = list(palette.classes)
        from dataclasses import replace

        broken[1] = replace(broken[1], color=broken[0].color)
        with pytest.raises(ValueError):
            ClassPalette(tuple(broken))


class TestComputeRatios:
    def test_two_by_two(self):
        layout = SemanticLayout(np.array([[BUILDING, BUILDING], [WATER, WATER]], dtype=np.uint8))
        ratios = compute_ratios(layout)
        assert ratios[BUILDING] == 0.5
        assert ratios[WATER] == 0.5
        assert ratios[GROUND] == 0.0

    def test_uniform_ground(self):
        ratios = compute_ratios(SemanticLayout(np.zeros((10, 10), dtype=np.uint8)))
        assert ratios[GROUND] == 1.0

    def test_matches_counting_oracle_on_random_768(self):
        layout = random_layout(11, 768, 768)
        ratios = compute_ratios(layout)
        # independent single-pass counting oracle
        counts = Counter(int(v) for v in layout.labels.ravel())
        n = 768 * 768
        for class_id in range(N_CLASSES):
            assert ratios[class_id] == counts.get(class_id, 0) / n
        assert abs(float(ratios.ratios.sum()) - 1.0) < 1e-12

    def test_ratio_vector_validation(self):
        with pytest.raises(ValueError):
            ClassRatios(np.array([0.5, 0.5, 0.1, 0, 0, 0, 0]))
        with pytest.raises(ValueError):
            ClassRatios(np.array([1.2, -0.2, 0, 0, 0, 0, 0]))


class TestPngCodec:
    def test_single_water_pixel_color(self):
        layout = SemanticLayout(np.array([[WATER]], dtype=np.uint8))
        data = encode_png(layout)
        from PIL import Image
        import io

        rgb = Image.open(io.BytesIO(data)).convert("RGB")
        assert rgb.getpixel((0, 0)) == (0, 191, 255)

    def test_round_trip_small(self):
        layout = SemanticLayout(np.arange(9, dtype=np.uint8).reshape(3, 3) % N_CLASSES)
        assert decode_png(encode_png(layout)) == layout

    def test_round_trip_random_768(self):
        layout = random_layout(3, 768, 768)
        decoded = decode_png(encode_png(layout), meters_per_pixel=0.5)
        assert np.array_equal(decoded.labels, layout.labels)

    def test_plte_chunk_is_exactly_the_seven_colors(self):
        data = encode_png(random_layout(4, 16, 16))
        offset = 8  # PNG signature
        plte = None
        while offset < len(data):
            length, kind = struct.unpack(">I4s", data[offset : offset + 8])
            if kind == b"PLTE":
                plte = data[offset + 8 : offset + 8 + length]
                break
            offset += 12 + length
        expected = bytes(v for rgb in CLASS_COLORS for v in rgb)
        assert plte == expected

    def test_unknown_color_names_pixel(self):
        from PIL import Image
        import io

        img = Image.new("RGB", (3, 2), (85, 107, 47))
        img.putpixel((2, 1), (1, 2, 3))
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        with pytest.raises(UnknownColorError) as err:
            decode_png(buf.getvalue())
        assert (err.value.x, err.value.y) == (2, 1)
        assert err.value.rgb == (1, 2, 3)

    def test_hand_built_pixel_table(self):
        from PIL import Image
        import io

        img = Image.new("RGB", (3, 3), CLASS_COLORS[GROUND])
        expected = np.zeros((3, 3), dtype=np.uint8)
        for class_id in range(N_CLASSES):
            x, y = class_id % 3, class_id // 3
            img.putpixel((x, y), CLASS_COLORS[class_id])
            expected[y, x] = class_id
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        assert np.array_equal(decode_png(buf.getvalue()).labels, expected)


def _ratios(**kwargs) -> ClassRatios:
    values = np.zeros(N_CLASSES)
    for key, val in kwargs.items():
        values[{"ground": 0, "vegetation": 1, "building": 2, "rail": 3,
                "traffic_road": 4, "footpath": 5, "water": 6}[key]] = val
    return ClassRatios(values)


class TestAverageClassError:
    def test_identity_is_zero(self):
        rs = [_ratios(ground=0.5, water=0.5), _ratios(building=1.0)]
        assert np.all(average_class_error(rs, rs) == 0.0)

    def test_single_pair_arithmetic(self):
        target = _ratios(building=0.30, water=0.10, ground=0.60)
        generated = _ratios(building=0.40, water=0.00, ground=0.60)
        ace = average_class_error([target], [generated])
        assert ace[BUILDING] == pytest.approx(10.0)
        assert ace[WATER] == pytest.approx(10.0)
        assert ace[GROUND] == pytest.approx(0.0)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a = [ClassRatios(v / v.sum()) for v in rng.random((5, N_CLASSES))]
        b = [ClassRatios(v / v.sum()) for v in rng.random((5, N_CLASSES))]
        assert np.array_equal(average_class_error(a, b), average_class_error(b, a))

    def test_length_mismatch(self):
        r = [_ratios(ground=1.0)]
        with pytest.raises(LengthMismatchError):
            average_class_error(r, r * 2)
        with pytest.raises(LengthMismatchError):
            average_class_error([], [])


class TestRatioSidecar:
    def test_round_trip(self):
        ratios = compute_ratios(random_layout(8, 32, 32))
        text = write_ratio_sidecar(ratios)
        assert text.count(",") == 6 and text.endswith("\n")
        assert read_ratio_sidecar(text) == ratios
