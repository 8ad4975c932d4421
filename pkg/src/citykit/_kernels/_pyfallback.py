"""Pure-numpy implementations of the hot raster kernels.

Selected at import time by ``citykit._kernels`` when the compiled core is
unavailable (or forced via CITYKIT_KERNELS=python). Every function here is
the semantic twin of its Cython counterpart in ``_core.pyx``: identical
results bit-for-bit, exercised by tests/test_kernels.py.

All geometry is in the raster frame: x along columns, y along rows (y grows
downward), pixel (r, c) has center (c + 0.5, r + 0.5).
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def edt_sq(mask: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance (pixels^2) to the nearest True pixel.

    True pixels map to 0; if the mask is empty every entry is +inf.
    """
    mask = np.ascontiguousarray(mask, dtype=bool)
    h, w = mask.shape
    inf = np.inf

    # Horizontal pass: per-row distance to the nearest True pixel in that row.
    cols = np.arange(w, dtype=np.float64)
    idx = np.where(mask, cols, -inf)
    left = np.maximum.accumulate(idx, axis=1)
    idx = np.where(mask, cols, inf)
    right = np.minimum.accumulate(idx[:, ::-1], axis=1)[:, ::-1]
    hdist = np.minimum(cols - left, right - cols)  # inf on empty rows
    h2 = hdist * hdist

    # Vertical pass: exact min over source rows k of (i-k)^2 + h2[k].
    out = np.full((h, w), inf, dtype=np.float64)
    rows = np.arange(h, dtype=np.float64)
    nonempty = np.flatnonzero(np.isfinite(h2).any(axis=1))
    for k in nonempty:
        dy = rows - float(k)
        np.minimum(out, dy[:, None] * dy[:, None] + h2[k][None, :], out=out)
    return out


def label_components(labels: np.ndarray, background: int) -> tuple[np.ndarray, int]:
    """4-connected components of equal label value, excluding ``background``.

    Returns (comp, n): comp is int32 with -1 on background and component
    ids 0..n-1 assigned in row-major order of each component's top-left-most
    pixel.
    """
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    h, w = labels.shape
    n_px = h * w
    fg = labels != background
    comp = np.where(fg, np.arange(n_px, dtype=np.int64).reshape(h, w), -1)

    def neighbor_min(c: np.ndarray) -> np.ndarray:
        out = c.copy()
        same = (labels[:, 1:] == labels[:, :-1]) & fg[:, 1:] & fg[:, :-1]
        np.minimum(out[:, 1:], np.where(same, c[:, :-1], n_px), out=out[:, 1:])
        np.minimum(out[:, :-1], np.where(same, c[:, 1:], n_px), out=out[:, :-1])
        same = (labels[1:, :] == labels[:-1, :]) & fg[1:, :] & fg[:-1, :]
        np.minimum(out[1:, :], np.where(same, c[:-1, :], n_px), out=out[1:, :])
        np.minimum(out[:-1, :], np.where(same, c[1:, :], n_px), out=out[:-1, :])
        return out

    flat = comp.ravel()
    while True:
        prev = flat.copy()
        comp = neighbor_min(comp)
        flat = comp.ravel()
        # Pointer jumping: chase parents until every pixel points at a root.
        while True:
            jumped = np.where(flat >= 0, flat[np.maximum(flat, 0)], -1)
            if np.array_equal(jumped, flat):
                break
            flat = jumped
        comp = flat.reshape(h, w)
        if np.array_equal(flat, prev):
            break

    # Roots are component minima (top-left-most pixels); renumber ascending.
    roots = np.unique(flat[flat >= 0])
    lut = np.full(n_px, -1, dtype=np.int32)
    lut[roots] = np.arange(len(roots), dtype=np.int32)
    out = np.where(flat >= 0, lut[np.maximum(flat, 0)], -1).astype(np.int32)
    return out.reshape(h, w), int(len(roots))


def rect_overlap(
    mask: np.ndarray,
    oy: int,
    ox: int,
    cx: float,
    cy: float,
    hw: float,
    hh: float,
    ca: float,
    sa: float,
) -> tuple[int, int]:
    """Count pixel centers inside a rotated rectangle, and those also in the mask.

    The rectangle has center (cx, cy), half extents (hw, hh), and local u-axis
    (ca, sa), all in raster pixel units. The mask window covers global rows
    [oy, oy+mh) and cols [ox, ox+mw); rectangle pixels beyond the window still
    count toward the rectangle total. Returns (intersection, rect_total).
    """
    mask = np.ascontiguousarray(mask, dtype=bool)
    mh, mw = mask.shape
    ex = hw * abs(ca) + hh * abs(sa)
    ey = hw * abs(sa) + hh * abs(ca)
    c_lo = int(np.floor(cx - ex - 0.5))
    c_hi = int(np.ceil(cx + ex - 0.5))
    r_lo = int(np.floor(cy - ey - 0.5))
    r_hi = int(np.ceil(cy + ey - 0.5))
    if c_hi < c_lo or r_hi < r_lo:
        return 0, 0
    cs = np.arange(c_lo, c_hi + 1, dtype=np.float64)
    rs = np.arange(r_lo, r_hi + 1, dtype=np.float64)
    dx = cs + 0.5 - cx
    dy = rs + 0.5 - cy
    u = dx[None, :] * ca + dy[:, None] * sa
    v = -(dx[None, :] * sa) + dy[:, None] * ca
    inside = (np.abs(u) <= hw) & (np.abs(v) <= hh)
    rect_total = int(inside.sum())

    # Overlap of the bbox grid with the mask window, in window coordinates.
    wr_lo = max(r_lo, oy)
    wr_hi = min(r_hi, oy + mh - 1)
    wc_lo = max(c_lo, ox)
    wc_hi = min(c_hi, ox + mw - 1)
    if wr_hi < wr_lo or wc_hi < wc_lo:
        return 0, rect_total
    sub = inside[wr_lo - r_lo : wr_hi - r_lo + 1, wc_lo - c_lo : wc_hi - c_lo + 1]
    msub = mask[wr_lo - oy : wr_hi - oy + 1, wc_lo - ox : wc_hi - ox + 1]
    inter = int((sub & msub).sum())
    return inter, rect_total


def fill_polygon(labels: np.ndarray, value: int, xs: np.ndarray, ys: np.ndarray) -> None:
    """Paint pixels whose centers fall inside the ring (even-odd rule) in place.

    Vertices are raster-frame coordinates; the ring may repeat its first
    vertex or not. Boundary semantics follow the classic crossing test
    ((y1 > py) != (y2 > py), px < x_cross), which is closed-open on
    axis-aligned rectangles.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = len(xs)
    if n and (xs[0] == xs[-1] and ys[0] == ys[-1]):
        xs, ys = xs[:-1], ys[:-1]
        n -= 1
    if n < 3:
        return
    h, w = labels.shape
    c_lo = max(0, int(np.floor(xs.min() - 0.5)))
    c_hi = min(w - 1, int(np.ceil(xs.max() - 0.5)))
    r_lo = max(0, int(np.floor(ys.min() - 0.5)))
    r_hi = min(h - 1, int(np.ceil(ys.max() - 0.5)))
    if c_hi < c_lo or r_hi < r_lo:
        return
    py = np.arange(r_lo, r_hi + 1, dtype=np.float64) + 0.5
    px = np.arange(c_lo, c_hi + 1, dtype=np.float64) + 0.5
    crossings = np.zeros((len(py), len(px)), dtype=np.int64)
    for k in range(n):
        x1, y1 = xs[k], ys[k]
        x2, y2 = xs[(k + 1) % n], ys[(k + 1) % n]
        straddle = (y1 > py) != (y2 > py)
        if not straddle.any():
            continue
        xint = x1 + (py[straddle] - y1) * (x2 - x1) / (y2 - y1)
        crossings[straddle] += px[None, :] < xint[:, None]
    region = labels[r_lo : r_hi + 1, c_lo : c_hi + 1]
    region[crossings % 2 == 1] = value


def stroke_polyline(
    labels: np.ndarray, value: int, xs: np.ndarray, ys: np.ndarray, half_width: float
) -> None:
    """Paint pixels whose centers lie within half_width of any segment (in place).

    Capsule stroke: round caps and joins; distances in raster pixel units.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    h, w = labels.shape
    hw2 = half_width * half_width
    for k in range(len(xs) - 1):
        ax, ay, bx, by = xs[k], ys[k], xs[k + 1], ys[k + 1]
        c_lo = max(0, int(np.floor(min(ax, bx) - half_width - 0.5)))
        c_hi = min(w - 1, int(np.ceil(max(ax, bx) + half_width - 0.5)))
        r_lo = max(0, int(np.floor(min(ay, by) - half_width - 0.5)))
        r_hi = min(h - 1, int(np.ceil(max(ay, by) + half_width - 0.5)))
        if c_hi < c_lo or r_hi < r_lo:
            continue
        px = np.arange(c_lo, c_hi + 1, dtype=np.float64) + 0.5
        py = np.arange(r_lo, r_hi + 1, dtype=np.float64) + 0.5
        dxp = px[None, :] - ax
        dyp = py[:, None] - ay
        ux, uy = bx - ax, by - ay
        seg2 = ux * ux + uy * uy
        if seg2 > 0.0:
            t = (dxp * ux + dyp * uy) / seg2
            t = np.clip(t, 0.0, 1.0)
        else:
            t = np.zeros((len(py), len(px)), dtype=np.float64)
        ex = dxp - t * ux
        ey = dyp - t * uy
        d2 = ex * ex + ey * ey
        region = labels[r_lo : r_hi + 1, c_lo : c_hi + 1]
        region[d2 <= hw2] = value
