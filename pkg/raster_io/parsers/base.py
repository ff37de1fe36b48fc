"""Base raster parser"""

from abc import ABC
from typing import Optional

from core.interfaces import RasterParser as IRasterParser
from core.exceptions import BadMagicError, DimensionOverflowError, TruncatedPayloadError

# Largest accepted raster; a 32,914 x 46,000 slide is well inside
MAX_PIXELS = 2 ** 32
MAX_CHANNELS = 2 ** 16


class RasterParser(IRasterParser, ABC):
    """Shared checks for fixed-header binary raster formats"""

    def check_magic(self, data: bytes, path: Optional[str] = None) -> None:
        size = len(self.magic)
        if len(data) < size and self.magic.startswith(data):
            raise TruncatedPayloadError("File ends inside the magic bytes", path, len(data))
        if data[:size] != self.magic:
            raise BadMagicError(f"Expected magic {self.magic!r}, found {bytes(data[:size])!r}", path, 0)

    def check_dimensions(
        self, width: int, height: int, channels: int = 1,
        path: Optional[str] = None, offset: int = 0,
    ) -> None:
        if width <= 0 or height <= 0 or channels <= 0:
            raise DimensionOverflowError(
                f"Invalid dimensions {width}x{height}x{channels}", path, offset
            )
        if width * height > MAX_PIXELS or channels > MAX_CHANNELS:
            raise DimensionOverflowError(
                f"Dimensions {width}x{height}x{channels} exceed the supported raster size", path, offset
            )

    def check_payload(self, data: bytes, start: int, size: int, path: Optional[str] = None) -> None:
        if len(data) - start < size:
            raise TruncatedPayloadError(
                f"Payload needs {size} bytes, file has {max(len(data) - start, 0)}",
                path, len(data),
            )
