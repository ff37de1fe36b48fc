import numpy as np
import pytest

from core.models import LabelImage


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def two_lobe():
    """
    12x8 image with lobe A (x 1..4, y 1..6) and lobe B (x 5..8, y 3..4)

    The guidance raster separates the lobes (A 0.2, B 0.6, background 1.0) while the
    ground truth treats them as one object.
    """
    guidance = np.ones((8, 12), dtype=np.float64)
    guidance[1:7, 1:5] = 0.2
    guidance[3:5, 5:9] = 0.6
    gt = np.zeros((8, 12), dtype=np.uint32)
    gt[1:7, 1:5] = 1
    gt[3:5, 5:9] = 1
    return guidance, LabelImage(gt)
