# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled raster kernels: the hot loops behind rasterization, instance
analysis, and placement scoring.

Semantic twin of ``_pyfallback.py``; identical results bit-for-bit. Keep
floating-point expressions in the same order as the numpy versions.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, floor, ceil

cnp.import_array()

BACKEND_NAME = "compiled"


cdef void _dt1d(double* f, double* d, long* v, double* z, Py_ssize_t n) noexcept nogil:
    """Felzenszwalb-Huttenlocher 1-D squared distance transform (lower envelope)."""
    cdef Py_ssize_t k = 0, q, r
    cdef double s
    q = 0
    while q < n and f[q] == INFINITY:
        q += 1
    if q == n:
        for r in range(n):
            d[r] = INFINITY
        return
    v[0] = q
    z[0] = -INFINITY
    z[1] = INFINITY
    for q in range(q + 1, n):
        if f[q] == INFINITY:
            continue
        while True:
            r = v[k]
            s = ((f[q] + <double>(q * q)) - (f[r] + <double>(r * r))) / (2.0 * q - 2.0 * r)
            if s <= z[k]:
                # z[0] is -inf, so k never underflows: s is always finite.
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = INFINITY
    k = 0
    for q in range(n):
        while z[k + 1] < <double>q:
            k += 1
        r = v[k]
        d[q] = <double>((q - r) * (q - r)) + f[r]


def edt_sq(mask):
    """Exact squared Euclidean distance (pixels^2) to the nearest True pixel."""
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t n = h if h > w else w
    f_arr = np.empty(n, dtype=np.float64)
    d_arr = np.empty(n, dtype=np.float64)
    v_arr = np.empty(n, dtype=np.int64)
    z_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] f = f_arr, d = d_arr, z = z_arr
    cdef long[::1] v = v_arr
    cdef Py_ssize_t i, j
    with nogil:
        for j in range(w):
            for i in range(h):
                f[i] = 0.0 if m[i, j] else INFINITY
            _dt1d(&f[0], &d[0], &v[0], &z[0], h)
            for i in range(h):
                out[i, j] = d[i]
        for i in range(h):
            for j in range(w):
                f[j] = out[i, j]
            _dt1d(&f[0], &d[0], &v[0], &z[0], w)
            for j in range(w):
                out[i, j] = d[j]
    return out_arr


cdef long _find(long* parent, long a) noexcept nogil:
    cdef long root = a, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


def label_components(labels, int background):
    """4-connected components of equal label value, excluding ``background``.

    Returns (comp, n) with component ids 0..n-1 ordered by each component's
    top-left-most pixel in row-major order (-1 on background).
    """
    cdef const cnp.uint8_t[:, ::1] lab = np.ascontiguousarray(labels, dtype=np.uint8)
    cdef Py_ssize_t h = lab.shape[0], w = lab.shape[1]
    parent_arr = np.arange(h * w, dtype=np.int64)
    cdef long[::1] parent = parent_arr
    cdef Py_ssize_t r, c
    cdef long p, ra, rb
    with nogil:
        for r in range(h):
            for c in range(w):
                if lab[r, c] == background:
                    continue
                p = r * w + c
                if c > 0 and lab[r, c - 1] == lab[r, c]:
                    ra = _find(&parent[0], p)
                    rb = _find(&parent[0], p - 1)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
                if r > 0 and lab[r - 1, c] == lab[r, c]:
                    ra = _find(&parent[0], p)
                    rb = _find(&parent[0], p - w)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
    comp_arr = np.full((h, w), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] comp = comp_arr
    lut_arr = np.full(h * w, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] lut = lut_arr
    cdef long n = 0, root
    with nogil:
        # Union-by-smaller-index makes every root its component's minimum
        # flat index, so roots appear in row-major top-left order.
        for r in range(h):
            for c in range(w):
                if lab[r, c] == background:
                    continue
                root = _find(&parent[0], r * w + c)
                if lut[root] < 0:
                    lut[root] = <cnp.int32_t>n
                    n += 1
                comp[r, c] = lut[root]
    return comp_arr, int(n)


def rect_overlap(mask, Py_ssize_t oy, Py_ssize_t ox, double cx, double cy,
                 double hw, double hh, double ca, double sa):
    """Count pixel centers inside a rotated rectangle, and those also in the mask."""
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t mh = m.shape[0], mw = m.shape[1]
    cdef double ex = hw * fabs(ca) + hh * fabs(sa)
    cdef double ey = hw * fabs(sa) + hh * fabs(ca)
    cdef long c_lo = <long>floor(cx - ex - 0.5)
    cdef long c_hi = <long>ceil(cx + ex - 0.5)
    cdef long r_lo = <long>floor(cy - ey - 0.5)
    cdef long r_hi = <long>ceil(cy + ey - 0.5)
    if c_hi < c_lo or r_hi < r_lo:
        return 0, 0
    cdef long inter = 0, rect_total = 0
    cdef long r, c
    cdef double dx, dy, u, v
    cdef bint inside
    with nogil:
        for r in range(r_lo, r_hi + 1):
            dy = <double>r + 0.5 - cy
            for c in range(c_lo, c_hi + 1):
                dx = <double>c + 0.5 - cx
                u = dx * ca + dy * sa
                v = -(dx * sa) + dy * ca
                inside = fabs(u) <= hw and fabs(v) <= hh
                if inside:
                    rect_total += 1
                    if oy <= r < oy + mh and ox <= c < ox + mw:
                        if m[r - oy, c - ox]:
                            inter += 1
    return int(inter), int(rect_total)


def fill_polygon(labels, int value, xs, ys):
    """Paint pixels whose centers fall inside the ring (even-odd rule) in place."""
    cdef cnp.uint8_t[:, ::1] lab = labels
    xs_arr = np.asarray(xs, dtype=np.float64)
    ys_arr = np.asarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = xs_arr.shape[0]
    if n and xs_arr[0] == xs_arr[n - 1] and ys_arr[0] == ys_arr[n - 1]:
        xs_arr = xs_arr[: n - 1]
        ys_arr = ys_arr[: n - 1]
        n -= 1
    if n < 3:
        return
    cdef double[::1] vx = np.ascontiguousarray(xs_arr)
    cdef double[::1] vy = np.ascontiguousarray(ys_arr)
    cdef Py_ssize_t h = lab.shape[0], w = lab.shape[1]
    cdef double xmin = vx[0], xmax = vx[0], ymin = vy[0], ymax = vy[0]
    cdef Py_ssize_t k
    for k in range(1, n):
        if vx[k] < xmin: xmin = vx[k]
        if vx[k] > xmax: xmax = vx[k]
        if vy[k] < ymin: ymin = vy[k]
        if vy[k] > ymax: ymax = vy[k]
    cdef long c_lo = <long>floor(xmin - 0.5)
    cdef long c_hi = <long>ceil(xmax - 0.5)
    cdef long r_lo = <long>floor(ymin - 0.5)
    cdef long r_hi = <long>ceil(ymax - 0.5)
    if c_lo < 0: c_lo = 0
    if r_lo < 0: r_lo = 0
    if c_hi > w - 1: c_hi = w - 1
    if r_hi > h - 1: r_hi = h - 1
    if c_hi < c_lo or r_hi < r_lo:
        return
    xc_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] xc = xc_arr
    cdef long r, c, m, ptr, i
    cdef double py, px, x1, y1, x2, y2, t
    with nogil:
        for r in range(r_lo, r_hi + 1):
            py = <double>r + 0.5
            m = 0
            for k in range(n):
                x1 = vx[k]; y1 = vy[k]
                x2 = vx[(k + 1) % n]; y2 = vy[(k + 1) % n]
                if (y1 > py) != (y2 > py):
                    xc[m] = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                    m += 1
            if m == 0:
                continue
            # insertion sort (m is tiny)
            for i in range(1, m):
                t = xc[i]
                k = i
                while k > 0 and xc[k - 1] > t:
                    xc[k] = xc[k - 1]
                    k -= 1
                xc[k] = t
            ptr = 0
            for c in range(c_lo, c_hi + 1):
                px = <double>c + 0.5
                while ptr < m and xc[ptr] <= px:
                    ptr += 1
                if (m - ptr) & 1:
                    lab[r, c] = <cnp.uint8_t>value


def stroke_polyline(labels, int value, xs, ys, double half_width):
    """Paint pixels whose centers lie within half_width of any segment (in place)."""
    cdef cnp.uint8_t[:, ::1] lab = labels
    cdef double[::1] vx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t h = lab.shape[0], w = lab.shape[1]
    cdef Py_ssize_t n = vx.shape[0]
    cdef double hw2 = half_width * half_width
    cdef Py_ssize_t k
    cdef long c_lo, c_hi, r_lo, r_hi, r, c
    cdef double ax, ay, bx, by, ux, uy, seg2, dxp, dyp, t, ex, ey, d2
    cdef double lox, hix, loy, hiy
    with nogil:
        for k in range(n - 1):
            ax = vx[k]; ay = vy[k]; bx = vx[k + 1]; by = vy[k + 1]
            lox = ax if ax < bx else bx
            hix = ax if ax > bx else bx
            loy = ay if ay < by else by
            hiy = ay if ay > by else by
            c_lo = <long>floor(lox - half_width - 0.5)
            c_hi = <long>ceil(hix + half_width - 0.5)
            r_lo = <long>floor(loy - half_width - 0.5)
            r_hi = <long>ceil(hiy + half_width - 0.5)
            if c_lo < 0: c_lo = 0
            if r_lo < 0: r_lo = 0
            if c_hi > w - 1: c_hi = w - 1
            if r_hi > h - 1: r_hi = h - 1
            if c_hi < c_lo or r_hi < r_lo:
                continue
            ux = bx - ax
            uy = by - ay
            seg2 = ux * ux + uy * uy
            for r in range(r_lo, r_hi + 1):
                dyp = <double>r + 0.5 - ay
                for c in range(c_lo, c_hi + 1):
                    dxp = <double>c + 0.5 - ax
                    if seg2 > 0.0:
                        t = (dxp * ux + dyp * uy) / seg2
                        if t < 0.0:
                            t = 0.0
                        elif t > 1.0:
                            t = 1.0
                    else:
                        t = 0.0
                    ex = dxp - t * ux
                    ey = dyp - t * uy
                    d2 = ex * ex + ey * ey
                    if d2 <= hw2:
                        lab[r, c] = <cnp.uint8_t>value
