"""Kernel oracles plus compiled-vs-fallback bit equivalence."""
from __future__ import annotations

import math

import numpy as np
import pytest

from citykit._kernels import _pyfallback

try:
    from citykit._kernels import _core
except ImportError:
    _core = None

BACKENDS = [_pyfallback] + ([_core] if _core is not None else [])
IDS = ["python"] + (["compiled"] if _core is not None else [])


@pytest.fixture(params=BACKENDS, ids=IDS)
def kern(request):
    return request.param


# -- oracles ------------------------------------------------------------------

def flood_fill_components(labels: np.ndarray, background: int):
    """Recursive-style (stack) flood fill; the independent CCL oracle."""
    h, w = labels.shape
    comp = np.full((h, w), -1, dtype=np.int32)
    next_id = 0
    for r0 in range(h):
        for c0 in range(w):
            if labels[r0, c0] == background or comp[r0, c0] >= 0:
                continue
            stack = [(r0, c0)]
            comp[r0, c0] = next_id
            while stack:
                r, c = stack.pop()
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < h and 0 <= cc < w and comp[rr, cc] < 0 and labels[rr, cc] == labels[r, c]:
                        comp[rr, cc] = next_id
                        stack.append((rr, cc))
            next_id += 1
    return comp, next_id


def brute_edt_sq(mask: np.ndarray) -> np.ndarray:
    """All-pairs nearest-target scan (chunked), independent of the two-pass EDT."""
    h, w = mask.shape
    targets = np.argwhere(mask)
    out = np.full((h, w), np.inf)
    if len(targets) == 0:
        return out
    rows = np.arange(h)[:, None, None]
    cols = np.arange(w)[None, :, None]
    d = (rows - targets[:, 0][None, None, :]) ** 2 + (cols - targets[:, 1][None, None, :]) ** 2
    return d.min(axis=2).astype(np.float64)


def point_in_polygon(px: float, py: float, xs, ys) -> bool:
    inside = False
    n = len(xs)
    for i in range(n):
        x1, y1 = xs[i], ys[i]
        x2, y2 = xs[(i + 1) % n], ys[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            if px < x1 + (py - y1) * (x2 - x1) / (y2 - y1):
                inside = not inside
    return inside


# -- EDT ----------------------------------------------------------------------

class TestEdt:
    def test_target_pixel_is_zero(self, kern):
        mask = np.zeros((4, 4), dtype=bool)
        mask[2, 1] = True
        assert kern.edt_sq(mask)[2, 1] == 0.0

    def test_three_four_five(self, kern):
        mask = np.zeros((8, 8), dtype=bool)
        mask[0, 0] = True
        assert kern.edt_sq(mask)[4, 3] == 25.0

    def test_empty_mask_is_inf(self, kern):
        assert np.all(np.isinf(kern.edt_sq(np.zeros((5, 7), dtype=bool))))

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_brute_force_64(self, kern, seed):
        rng = np.random.default_rng(seed)
        mask = rng.random((64, 64)) < 0.02 * (seed + 1) / 3
        assert np.array_equal(kern.edt_sq(mask), brute_edt_sq(mask))

    def test_backends_bit_equal(self):
        if _core is None:
            pytest.skip("compiled kernels unavailable")
        rng = np.random.default_rng(123)
        for density in (0.0, 0.001, 0.05, 0.5):
            mask = rng.random((97, 143)) < density
            a = _pyfallback.edt_sq(mask)
            b = _core.edt_sq(mask)
            assert np.array_equal(a, b)


# -- connected components -------------------------------------------------------

class TestLabelComponents:
    def test_diagonal_pixels_are_separate(self, kern):
        labels = np.zeros((3, 3), dtype=np.uint8)
        labels[0, 0] = labels[2, 2] = 2
        comp, n = kern.label_components(labels, 0)
        assert n == 2
        assert comp[0, 0] == 0 and comp[2, 2] == 1

    def test_all_background_empty(self, kern):
        comp, n = kern.label_components(np.zeros((4, 4), dtype=np.uint8), 0)
        assert n == 0 and np.all(comp == -1)

    def test_different_classes_never_merge(self, kern):
        labels = np.array([[1, 2], [2, 1]], dtype=np.uint8)
        _, n = kern.label_components(labels, 0)
        assert n == 4

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_flood_fill_oracle(self, kern, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 4, size=(48, 48), dtype=np.uint8)
        comp, n = kern.label_components(labels, 0)
        oracle_comp, oracle_n = flood_fill_components(labels, 0)
        assert n == oracle_n
        # oracle discovers components in row-major first-pixel order too
        assert np.array_equal(comp, oracle_comp)

    def test_ordering_by_topleft_row_major(self, kern):
        labels = np.zeros((4, 4), dtype=np.uint8)
        labels[3, 0] = 2  # later in row-major order
        labels[0, 3] = 2
        comp, n = kern.label_components(labels, 0)
        assert n == 2
        assert comp[0, 3] == 0 and comp[3, 0] == 1

    def test_backends_bit_equal(self):
        if _core is None:
            pytest.skip("compiled kernels unavailable")
        rng = np.random.default_rng(7)
        labels = rng.integers(0, 7, size=(128, 128), dtype=np.uint8)
        ca, na = _pyfallback.label_components(labels, 0)
        cb, nb = _core.label_components(labels, 0)
        assert na == nb
        assert np.array_equal(ca, cb)


# -- rotated-rectangle overlap ---------------------------------------------------

class TestRectOverlap:
    def test_axis_aligned_counts(self, kern):
        mask = np.zeros((20, 20), dtype=bool)
        mask[0:10, 0:10] = True
        inter, total = kern.rect_overlap(mask, 0, 0, 5.0, 5.0, 5.0, 5.0, 1.0, 0.0)
        assert total == 100 and inter == 100

    def test_rect_outside_mask_window_counts_toward_total(self, kern):
        mask = np.ones((4, 4), dtype=bool)
        inter, total = kern.rect_overlap(mask, 0, 0, 100.0, 100.0, 2.0, 2.0, 1.0, 0.0)
        assert inter == 0 and total == 16

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_per_pixel_oracle(self, kern, seed):
        rng = np.random.default_rng(seed)
        mask = rng.random((30, 40)) < 0.4
        oy, ox = int(rng.integers(-5, 5)), int(rng.integers(-5, 5))
        cx, cy = float(rng.uniform(-5, 45)), float(rng.uniform(-5, 35))
        hw, hh = float(rng.uniform(1, 12)), float(rng.uniform(1, 9))
        theta = float(rng.uniform(-math.pi, math.pi))
        ca, sa = math.cos(theta), math.sin(theta)
        inter, total = kern.rect_overlap(mask, oy, ox, cx, cy, hw, hh, ca, sa)

        o_inter = o_total = 0
        for r in range(int(cy - 25), int(cy + 26)):
            for c in range(int(cx - 25), int(cx + 26)):
                dx, dy = c + 0.5 - cx, r + 0.5 - cy
                u = dx * ca + dy * sa
                v = -dx * sa + dy * ca
                if abs(u) <= hw and abs(v) <= hh:
                    o_total += 1
                    if 0 <= r - oy < 30 and 0 <= c - ox < 40 and mask[r - oy, c - ox]:
                        o_inter += 1
        assert (inter, total) == (o_inter, o_total)

    def test_backends_bit_equal(self):
        if _core is None:
            pytest.skip("compiled kernels unavailable")
        rng = np.random.default_rng(42)
        mask = rng.random((50, 50)) < 0.5
        for _ in range(50):
            args = (
                float(rng.uniform(0, 50)), float(rng.uniform(0, 50)),
                float(rng.uniform(0.5, 20)), float(rng.uniform(0.5, 20)),
            )
            theta = float(rng.uniform(-math.pi, math.pi))
            a = _pyfallback.rect_overlap(mask, 0, 0, *args, math.cos(theta), math.sin(theta))
            b = _core.rect_overlap(mask, 0, 0, *args, math.cos(theta), math.sin(theta))
            assert a == b


# -- polygon fill / polyline stroke ---------------------------------------------

class TestFillPolygon:
    def test_half_open_rectangle(self, kern):
        labels = np.zeros((30, 30), dtype=np.uint8)
        kern.fill_polygon(labels, 2, np.array([0.0, 20.0, 20.0, 0.0]), np.array([0.0, 0.0, 20.0, 20.0]))
        assert int((labels == 2).sum()) == 400

    def test_triangle_matches_pnpoly_oracle(self, kern):
        rng = np.random.default_rng(5)
        for _ in range(5):
            xs = rng.uniform(0, 25, size=5)
            ys = rng.uniform(0, 25, size=5)
            labels = np.zeros((25, 25), dtype=np.uint8)
            kern.fill_polygon(labels, 3, xs, ys)
            for r in range(25):
                for c in range(25):
                    expected = point_in_polygon(c + 0.5, r + 0.5, xs, ys)
                    assert (labels[r, c] == 3) == expected

    def test_backends_bit_equal(self):
        if _core is None:
            pytest.skip("compiled kernels unavailable")
        rng = np.random.default_rng(17)
        for _ in range(20):
            xs = rng.uniform(-10, 70, size=7)
            ys = rng.uniform(-10, 70, size=7)
            a = np.zeros((64, 64), dtype=np.uint8)
            b = np.zeros((64, 64), dtype=np.uint8)
            _pyfallback.fill_polygon(a, 5, xs, ys)
            _core.fill_polygon(b, 5, xs, ys)
            assert np.array_equal(a, b)


class TestStrokePolyline:
    def test_single_segment_width(self, kern):
        labels = np.zeros((20, 20), dtype=np.uint8)
        kern.stroke_polyline(labels, 4, np.array([0.0, 20.0]), np.array([10.0, 10.0]), 2.0)
        # rows whose centers are within 2 px of y=10: 8.5, 9.5, 10.5, 11.5
        assert np.array_equal(np.unique(np.nonzero(labels == 4)[0]), np.array([8, 9, 10, 11]))

    def test_matches_distance_oracle(self, kern):
        rng = np.random.default_rng(9)
        xs = rng.uniform(0, 30, size=4)
        ys = rng.uniform(0, 30, size=4)
        hw = 3.0
        labels = np.zeros((30, 30), dtype=np.uint8)
        kern.stroke_polyline(labels, 6, xs, ys, hw)
        for r in range(30):
            for c in range(30):
                p = np.array([c + 0.5, r + 0.5])
                d = math.inf
                for k in range(3):
                    a = np.array([xs[k], ys[k]])
                    b = np.array([xs[k + 1], ys[k + 1]])
                    seg = b - a
                    t = float(np.clip(np.dot(p - a, seg) / np.dot(seg, seg), 0, 1))
                    d = min(d, float(np.linalg.norm(p - (a + t * seg))))
                assert (labels[r, c] == 6) == (d <= hw), (r, c, d)

    def test_backends_bit_equal(self):
        if _core is None:
            pytest.skip("compiled kernels unavailable")
        rng = np.random.default_rng(23)
        for _ in range(20):
            xs = rng.uniform(-10, 70, size=5)
            ys = rng.uniform(-10, 70, size=5)
            hw = float(rng.uniform(0.5, 6))
            a = np.zeros((64, 64), dtype=np.uint8)
            b = np.zeros((64, 64), dtype=np.uint8)
            _pyfallback.stroke_polyline(a, 1, xs, ys, hw)
            _core.stroke_polyline(b, 1, xs, ys, hw)
            assert np.array_equal(a, b)
