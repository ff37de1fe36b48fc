"""Whole-slide tile-and-stitch segmentation"""

from .tiling import make_tile_grid, tile_count
from .source import InMemoryStackSource, Psf3StackSource
from .stitching import StitchTable, build_stitch_table, compose, stitch, truncated_ids
from .store import DiskTileStore, MemoryTileStore, write_tiled_output
from .segmenter import TiledSegmentation, segment_tiled

__all__ = [
    "make_tile_grid",
    "tile_count",
    "InMemoryStackSource",
    "Psf3StackSource",
    "StitchTable",
    "build_stitch_table",
    "compose",
    "stitch",
    "truncated_ids",
    "DiskTileStore",
    "MemoryTileStore",
    "write_tiled_output",
    "TiledSegmentation",
    "segment_tiled",
]
