"""Generator backend abstraction and the conditional-generation entry point."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..layout import GenerationCondition, SemanticLayout


class UnsupportedConditionError(ValueError):
    pass


class BackendFailureError(RuntimeError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


@dataclass(frozen=True)
class KnownRegion:
    """Committed pixels handed to a partial-capable backend for outpainting.

    ``labels``/``mask`` cover the requested tile; mask is True where the
    pixel is already committed. ``origin`` is the tile's global pixel offset
    (col, row) on the expansion canvas, so pattern-based backends can stay
    phase-aligned with earlier tiles.
    """

    labels: np.ndarray
    mask: np.ndarray
    origin: Tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        if labels.shape != mask.shape:
            raise ValueError("known labels and mask shapes differ")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mask", mask)


class GeneratorBackend(ABC):
    """A layout generator: deterministic in (condition, size, known)."""

    name: str = "backend"
    supports_ratios: bool = False
    supports_text: bool = False
    supports_partial: bool = False

    @abstractmethod
    def generate_tile(
        self,
        condition: GenerationCondition,
        width: int,
        height: int,
        known: Optional[KnownRegion] = None,
    ) -> SemanticLayout:
        raise NotImplementedError


def generate(backend: GeneratorBackend, condition: GenerationCondition, size: int) -> SemanticLayout:
    """Generate a square layout, validating conditions against capabilities."""
    if condition.ratios is not None and not backend.supports_ratios:
        raise UnsupportedConditionError(f"backend {backend.name!r} does not support ratio conditions")
    if condition.text is not None and not backend.supports_text:
        raise UnsupportedConditionError(f"backend {backend.name!r} does not support text conditions")
    layout = backend.generate_tile(condition, size, size)
    if layout.width != size or layout.height != size:
        raise BackendFailureError(
            f"backend {backend.name!r} returned {layout.width}x{layout.height}, wanted {size}x{size}"
        )
    return layout
