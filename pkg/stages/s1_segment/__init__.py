"""Stage 1: Automatic instance segmentation"""

from .auto_segmenter import AutoSegmenter

__all__ = ["AutoSegmenter"]
