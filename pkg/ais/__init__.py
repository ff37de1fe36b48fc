"""Automatic instance segmentation from decoder outputs"""

from .targets import generate_targets
from .smoothing import gaussian_kernel, smooth
from .seeds import SeedMap, compute_seeds, seed_mask, smoothed_distances
from .watershed import seeded_watershed
from .segmenter import instance_segmentation, remove_small_instances
from .grid_search import grid_search

__all__ = [
    "generate_targets",
    "gaussian_kernel",
    "smooth",
    "SeedMap",
    "compute_seeds",
    "seed_mask",
    "smoothed_distances",
    "seeded_watershed",
    "instance_segmentation",
    "remove_small_instances",
    "grid_search",
]
