"""Semantic layout raster, class ratios, indexed-PNG codec, and the ACE metric.

A layout is an immutable (height, width) uint8 raster of class ids plus a
meters-per-pixel scale. The interchange format is an indexed PNG whose
palette is exactly the 7 fixed class colors; a sidecar ratio file carries
the 7 class-area fractions as one comma-separated line.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from PIL import Image

from .palette import CLASS_COLORS, N_CLASSES

DEFAULT_METERS_PER_PIXEL = 0.5
PATCH_SIZE = 768


class UnknownColorError(ValueError):
    """A decoded pixel's RGB is not one of the 7 palette colors."""

    def __init__(self, x: int, y: int, rgb: tuple):
        self.x = x
        self.y = y
        self.rgb = rgb
        super().__init__(f"unknown color {rgb} at pixel ({x}, {y})")


class LengthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticLayout:
    """C-class label raster. ``labels`` is (height, width) uint8, row-major."""

    labels: np.ndarray
    meters_per_pixel: float = DEFAULT_METERS_PER_PIXEL

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.uint8)
        if labels.ndim != 2 or labels.shape[0] < 1 or labels.shape[1] < 1:
            raise ValueError(f"labels must be a 2-D raster, got shape {labels.shape}")
        if labels.max(initial=0) >= N_CLASSES:
            bad = int(labels.max())
            raise ValueError(f"label {bad} out of range 0..{N_CLASSES - 1}")
        if not self.meters_per_pixel > 0:
            raise ValueError("meters_per_pixel must be positive")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemanticLayout):
            return NotImplemented
        return (
            self.meters_per_pixel == other.meters_per_pixel
            and self.labels.shape == other.labels.shape
            and bool(np.array_equal(self.labels, other.labels))
        )

    def __hash__(self) -> int:
        return hash((self.labels.tobytes(), self.labels.shape, self.meters_per_pixel))


@dataclass(frozen=True)
class ClassRatios:
    """Per-class area fractions; entries sum to 1 within 1e-9."""

    ratios: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.ratios, dtype=np.float64)
        if r.shape != (N_CLASSES,):
            raise ValueError(f"ratios must have shape ({N_CLASSES},), got {r.shape}")
        if np.any(r < 0) or np.any(r > 1):
            raise ValueError("ratio entries must lie in [0, 1]")
        if abs(float(r.sum()) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1, got {r.sum()!r}")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "ratios", r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassRatios):
            return NotImplemented
        return bool(np.array_equal(self.ratios, other.ratios))

    def __getitem__(self, class_id: int) -> float:
        return float(self.ratios[class_id])


@dataclass(frozen=True)
class GenerationCondition:
    """Conditioning for a generator call: optional ratios, optional text, mandatory seed."""

    seed: int
    ratios: Optional[ClassRatios] = None
    text: Optional[str] = None

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def compute_ratios(layout: SemanticLayout) -> ClassRatios:
    """Per-class pixel-count fractions of a layout."""
    counts = np.bincount(layout.labels.ravel(), minlength=N_CLASSES).astype(np.float64)
    return ClassRatios(counts / float(layout.width * layout.height))


def _palette_bytes() -> bytes:
    return bytes(v for rgb in CLASS_COLORS for v in rgb)


def encode_png(layout: SemanticLayout) -> bytes:
    """Serialize to an indexed PNG whose palette is exactly the 7 class colors."""
    img = Image.fromarray(np.asarray(layout.labels), mode="P")
    img.putpalette(_palette_bytes())
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes, meters_per_pixel: float = DEFAULT_METERS_PER_PIXEL) -> SemanticLayout:
    """Inverse of :func:`encode_png`.

    Accepts any PNG whose pixels use only the 7 palette colors (exact RGB
    match); raises :class:`UnknownColorError` naming the first offending
    pixel otherwise.
    """
    img = Image.open(io.BytesIO(data))
    rgb = np.asarray(img.convert("RGB"), dtype=np.uint8)
    h, w, _ = rgb.shape
    packed = (
        rgb[:, :, 0].astype(np.uint32) << 16
        | rgb[:, :, 1].astype(np.uint32) << 8
        | rgb[:, :, 2].astype(np.uint32)
    )
    labels = np.full((h, w), 255, dtype=np.uint8)
    for class_id, (r, g, b) in enumerate(CLASS_COLORS):
        labels[packed == (r << 16 | g << 8 | b)] = class_id
    bad = np.argwhere(labels == 255)
    if bad.size:
        y, x = (int(v) for v in bad[0])
        raise UnknownColorError(x, y, tuple(int(v) for v in rgb[y, x]))
    return SemanticLayout(labels, meters_per_pixel)


def average_class_error(
    targets: Sequence[ClassRatios], generated: Sequence[ClassRatios]
) -> np.ndarray:
    """Average Class Error: per-class mean |generated - target| over pairs, in percent."""
    if len(targets) == 0 or len(targets) != len(generated):
        raise LengthMismatchError(
            f"need equal nonzero lengths, got {len(targets)} targets and {len(generated)} generated"
        )
    t = np.stack([r.ratios for r in targets])
    g = np.stack([r.ratios for r in generated])
    return np.abs(g - t).mean(axis=0) * 100.0


def write_ratio_sidecar(ratios: ClassRatios) -> str:
    """One line, 7 comma-separated decimals in class-id order."""
    return ",".join(repr(float(v)) for v in ratios.ratios) + "\n"


def read_ratio_sidecar(text: str) -> ClassRatios:
    parts = text.strip().split(",")
    if len(parts) != N_CLASSES:
        raise ValueError(f"expected {N_CLASSES} comma-separated values, got {len(parts)}")
    return ClassRatios(np.array([float(p) for p in parts], dtype=np.float64))
