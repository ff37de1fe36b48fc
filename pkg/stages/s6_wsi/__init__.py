"""Stage 6: Whole-slide tiled segmentation"""

from .slide_segmenter import SlideSegmenter

__all__ = ["SlideSegmenter"]
