"""LBL1 label format: b"PSLB", u32-LE width and height, u32-LE row-major ids"""

import struct
from typing import Optional

import numpy as np

from core.exceptions import TruncatedPayloadError
from .base import RasterParser

_HEADER = struct.Struct("<4sII")


class LBL1Parser(RasterParser):
    """Parser for 32-bit instance label files"""

    @property
    def magic(self) -> bytes:
        return b"PSLB"

    def parse(self, data: bytes, path: Optional[str] = None) -> np.ndarray:
        self.check_magic(data, path)
        if len(data) < _HEADER.size:
            raise TruncatedPayloadError("Header ends early", path, len(data))

        _, width, height = _HEADER.unpack_from(data)
        self.check_dimensions(width, height, path=path, offset=4)
        self.check_payload(data, _HEADER.size, width * height * 4, path)
        ids = np.frombuffer(data, dtype="<u4", count=width * height, offset=_HEADER.size)
        return ids.reshape(height, width).astype(np.uint32)

    def serialize(self, array: np.ndarray) -> bytes:
        height, width = array.shape
        return _HEADER.pack(self.magic, width, height) + np.ascontiguousarray(array, dtype="<u4").tobytes()
