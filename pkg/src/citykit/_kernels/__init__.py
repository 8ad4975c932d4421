"""Kernel backend selection: compiled Cython core with a pure-numpy fallback.

The compiled extension is preferred when importable. Set CITYKIT_KERNELS to
"python" or "compiled" to force a backend (forcing "compiled" raises if the
extension is missing). Both backends are bit-for-bit equivalent; see
tests/test_kernels.py.
"""
from __future__ import annotations

import os

_requested = os.environ.get("CITYKIT_KERNELS", "").strip().lower()
if _requested not in {"", "compiled", "python"}:
    raise ImportError(f"CITYKIT_KERNELS must be 'compiled' or 'python', got {_requested!r}")

if _requested == "python":
    from . import _pyfallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pyfallback as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND_NAME
edt_sq = _impl.edt_sq
label_components = _impl.label_components
rect_overlap = _impl.rect_overlap
fill_polygon = _impl.fill_polygon
stroke_polyline = _impl.stroke_polyline

__all__ = [
    "BACKEND",
    "edt_sq",
    "label_components",
    "rect_overlap",
    "fill_polygon",
    "stroke_polyline",
]
