"""Binary PGM (P5) parser, 8-bit or 16-bit big-endian"""

from typing import Optional

import numpy as np

from core.exceptions import FormatError, IdOverflowError, TruncatedPayloadError
from .base import RasterParser

_WHITESPACE = b" \t\r\n\x0b\x0c"


class PGMParser(RasterParser):
    """Parser for binary greymaps as exported by ImageJ-style tools"""

    @property
    def magic(self) -> bytes:
        return b"P5"

    def parse(self, data: bytes, path: Optional[str] = None) -> np.ndarray:
        self.check_magic(data, path)

        fields, pos = self._read_header(data, path)
        width, height, maxval = fields
        self.check_dimensions(width, height, path=path, offset=2)
        if not 0 < maxval < 65536:
            raise FormatError(f"Invalid maxval {maxval}", path, pos)

        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        self.check_payload(data, pos, width * height * dtype.itemsize, path)
        pixels = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)

        over = np.flatnonzero(pixels > maxval)
        if over.size:
            raise FormatError(
                f"Pixel value {int(pixels[over[0]])} exceeds maxval {maxval}",
                path, pos + int(over[0]) * dtype.itemsize,
            )
        return pixels.reshape(height, width).astype(np.uint32)

    def serialize(self, array: np.ndarray) -> bytes:
        height, width = array.shape
        peak = int(array.max()) if array.size else 0
        if peak > 65535:
            raise IdOverflowError(f"Instance id {peak} does not fit a 16-bit PGM")
        if peak <= 255:
            maxval, payload = 255, array.astype(np.uint8).tobytes()
        else:
            maxval, payload = 65535, array.astype(">u2").tobytes()
        return b"P5\n%d %d\n%d\n" % (width, height, maxval) + payload

    def _read_header(self, data: bytes, path: Optional[str]) -> tuple[list[int], int]:
        """Read width, height and maxval; returns them and the payload offset"""
        fields: list[int] = []
        pos = len(self.magic)
        while len(fields) < 3:
            while pos < len(data) and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
                if data[pos] == ord("#"):
                    end = data.find(b"\n", pos)
                    pos = len(data) if end < 0 else end + 1
                else:
                    pos += 1
            start = pos
            while pos < len(data) and 48 <= data[pos] <= 57:
                pos += 1
            if start == pos:
                if pos >= len(data):
                    raise TruncatedPayloadError("Header ends early", path, pos)
                raise FormatError("Malformed header field", path, pos)
            fields.append(int(data[start:pos]))

        # exactly one whitespace byte separates the header from the payload
        if pos >= len(data):
            raise TruncatedPayloadError("Header ends early", path, pos)
        if data[pos] not in _WHITESPACE:
            raise FormatError("Missing whitespace after maxval", path, pos)
        return fields, pos + 1
