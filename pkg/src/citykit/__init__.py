"""citykit: semantic city layouts, planning, asset retrieval, placement, export."""
from __future__ import annotations

from .layout import (
    ClassRatios,
    GenerationCondition,
    SemanticLayout,
    average_class_error,
    compute_ratios,
    decode_png,
    encode_png,
)
from .palette import ClassPalette

__version__ = "0.1.0"

__all__ = [
    "ClassPalette",
    "ClassRatios",
    "GenerationCondition",
    "SemanticLayout",
    "average_class_error",
    "compute_ratios",
    "decode_png",
    "encode_png",
    "__version__",
]
