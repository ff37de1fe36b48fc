"""PSF3 float raster format: b"PSF3", u32-LE width, height, channels, planar f32-LE"""

import struct
from typing import Optional

import numpy as np

from core.exceptions import TruncatedPayloadError
from .base import RasterParser

_HEADER = struct.Struct("<4sIII")
PSF3_HEADER_SIZE = _HEADER.size


class PSF3Parser(RasterParser):
    """Parser for planar float32 stacks (prediction stacks, probability maps, guidance)"""

    @property
    def magic(self) -> bytes:
        return b"PSF3"

    def read_header(self, data: bytes, path: Optional[str] = None) -> tuple[int, int, int]:
        """Return (width, height, channels)"""
        self.check_magic(data, path)
        if len(data) < _HEADER.size:
            raise TruncatedPayloadError("Header ends early", path, len(data))
        _, width, height, channels = _HEADER.unpack_from(data)
        self.check_dimensions(width, height, channels, path=path, offset=4)
        return width, height, channels

    def parse(self, data: bytes, path: Optional[str] = None) -> np.ndarray:
        width, height, channels = self.read_header(data, path)
        count = width * height * channels
        self.check_payload(data, _HEADER.size, count * 4, path)
        values = np.frombuffer(data, dtype="<f4", count=count, offset=_HEADER.size)
        return values.reshape(channels, height, width).astype(np.float32)

    def serialize(self, array: np.ndarray) -> bytes:
        channels, height, width = array.shape
        payload = np.ascontiguousarray(array, dtype="<f4").tobytes()
        return _HEADER.pack(self.magic, width, height, channels) + payload
