"""Raster file parsers"""

from .base import RasterParser, MAX_PIXELS
from .pgm import PGMParser
from .lbl1 import LBL1Parser
from .psf3 import PSF3Parser, PSF3_HEADER_SIZE

__all__ = [
    "RasterParser",
    "MAX_PIXELS",
    "PGMParser",
    "LBL1Parser",
    "PSF3Parser",
    "PSF3_HEADER_SIZE",
]
