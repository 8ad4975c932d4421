from __future__ import annotations

import numpy as np
import pytest

from citykit.layout import SemanticLayout
from citykit.palette import N_CLASSES


def random_layout(seed: int, width: int = 64, height: int = 64, mpp: float = 0.5) -> SemanticLayout:
    rng = np.random.default_rng(seed)
    return SemanticLayout(rng.integers(0, N_CLASSES, size=(height, width), dtype=np.uint8), mpp)


@pytest.fixture(scope="session")
def catalog_200():
    from citykit.assets import synth_catalog

    return synth_catalog(200, seed=99)
