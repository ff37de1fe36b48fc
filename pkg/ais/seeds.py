"""Seed extraction from thresholded distance channels"""

from dataclasses import dataclass

import numpy as np

from core.masks import label_components
from core.models import AisParams, LabelImage, PredictionStack
from .smoothing import smooth


@dataclass(frozen=True, eq=False)
class SeedMap:
    """Connected seed components; every seed pixel passed the threshold rule"""
    seeds: LabelImage

    @property
    def n_seeds(self) -> int:
        return self.seeds.num_instances

    def mask(self) -> np.ndarray:
        return self.seeds.foreground()


def smoothed_distances(stack: PredictionStack, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Center-distance and boundary-proximity planes after optional smoothing"""
    return smooth(stack.center_distance, sigma), smooth(stack.boundary_proximity, sigma)


def seed_mask(
    foreground: np.ndarray,
    center_distance: np.ndarray,
    boundary_proximity: np.ndarray,
    params: AisParams,
) -> np.ndarray:
    return (
        (center_distance < params.center_threshold)
        & (boundary_proximity < params.boundary_threshold)
        & (foreground > params.foreground_threshold)
    )


def compute_seeds(stack: PredictionStack, params: AisParams) -> SeedMap:
    """Threshold both distance channels and the foreground, then label 4-connected seeds"""
    center, boundary = smoothed_distances(stack, params.smoothing_sigma)
    labels, _ = label_components(seed_mask(stack.foreground, center, boundary, params))
    return SeedMap(LabelImage(labels))
