"""Seeded priority-flood watershed"""

from typing import Union

import numpy as np
from skimage.segmentation import watershed

from core.exceptions import PreconditionError
from core.masks import check_same_shape, relabel_sequential
from core.models import LabelImage
from .seeds import SeedMap

_INT32_MAX = np.iinfo(np.int32).max


def seeded_watershed(
    height: np.ndarray,
    seeds: Union[SeedMap, LabelImage, np.ndarray],
    mask: np.ndarray,
) -> LabelImage:
    """
    Grow seeds over `height` (ascending) inside `mask`

    skimage floods from a heap ordered by (height, insertion age) with markers pushed in
    raster order, which makes plateaus deterministic. Masked pixels with no seed in their
    mask component stay 0.
    """
    if isinstance(seeds, SeedMap):
        seeds = seeds.seeds
    markers = seeds.labels if isinstance(seeds, LabelImage) else np.asarray(seeds)
    mask = np.asarray(mask, dtype=bool)
    check_same_shape(height, markers)
    check_same_shape(height, mask)

    if np.any((markers != 0) & ~mask):
        raise PreconditionError("Seeds must lie inside the mask")
    if not markers.any():
        return LabelImage(np.zeros(mask.shape, dtype=np.uint32))
    if markers.max() > _INT32_MAX:
        markers = relabel_sequential(markers)

    flooded = watershed(
        np.asarray(height, dtype=np.float64),
        markers=markers.astype(np.int32),
        mask=mask,
        connectivity=1,
    )
    return LabelImage(flooded)
