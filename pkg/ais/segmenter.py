"""Automatic instance segmentation from decoder outputs"""

import logging

import numpy as np

from core.masks import label_components, relabel_sequential
from core.models import AisParams, LabelImage, PredictionStack
from .seeds import seed_mask, smoothed_distances
from .watershed import seeded_watershed

logger = logging.getLogger(__name__)


def remove_small_instances(labels: np.ndarray, min_size: float) -> np.ndarray:
    """Zero out instances with fewer than `min_size` pixels"""
    ids, counts = np.unique(labels, return_counts=True)
    small = ids[(ids != 0) & (counts < min_size)]
    if small.size == 0:
        return labels
    out = labels.copy()
    out[np.isin(out, small)] = 0
    return out


def instance_segmentation(stack: PredictionStack, params: AisParams = AisParams()) -> LabelImage:
    """Smooth, seed, flood over boundary proximity, drop small instances, relabel 1..N"""
    center, boundary = smoothed_distances(stack, params.smoothing_sigma)
    mask = stack.foreground > params.foreground_threshold
    seeds, n_seeds = label_components(seed_mask(stack.foreground, center, boundary, params))
    if n_seeds == 0:
        return LabelImage.empty(stack.width, stack.height)

    flooded = seeded_watershed(boundary, seeds, mask).labels
    kept = remove_small_instances(flooded, params.min_instance_size)
    labels = relabel_sequential(kept)
    logger.debug("Segmented %d seeds into %d instances", n_seeds, int(labels.max()))
    return LabelImage(labels)
