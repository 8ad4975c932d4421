"""Layout generation: backend abstraction, procedural + remote backends, expansion."""
from __future__ import annotations

from .backend import (
    BackendFailureError,
    GeneratorBackend,
    KnownRegion,
    UnsupportedConditionError,
    generate,
)
from .expand import (
    ExpansionSpec,
    OutOfRangeError,
    expand,
    expansion_seams,
    independent_tiling,
    seam_discontinuity,
    tile_positions,
)
from .procedural import ProceduralBackend, derive_seed
from .remote import RemoteBackend, RemoteGeneratorConfig

__all__ = [
    "BackendFailureError",
    "ExpansionSpec",
    "GeneratorBackend",
    "KnownRegion",
    "OutOfRangeError",
    "ProceduralBackend",
    "RemoteBackend",
    "RemoteGeneratorConfig",
    "UnsupportedConditionError",
    "derive_seed",
    "expand",
    "expansion_seams",
    "generate",
    "independent_tiling",
    "seam_discontinuity",
    "tile_positions",
]
