"""Random-access prediction-stack windows"""

import logging
import threading
from pathlib import Path
from typing import Optional, Union

import numpy as np

from core.exceptions import FormatError, PreconditionError, TruncatedPayloadError
from core.interfaces import StackSource
from core.models import BoundingBox, PredictionStack
from raster_io.parsers import PSF3_HEADER_SIZE, PSF3Parser
from raster_io.stacks import clamp_unit
from .stitching import local_slices

logger = logging.getLogger(__name__)


def _check_box(source: StackSource, box: BoundingBox) -> None:
    if box.x_max > source.width or box.y_max > source.height:
        raise PreconditionError(
            f"Window {box.as_tuple()} exceeds {source.width}x{source.height} source"
        )


class InMemoryStackSource(StackSource):
    """Windows cropped from a stack held in memory"""

    def __init__(self, stack: PredictionStack):
        self._stack = stack

    @property
    def width(self) -> int:
        return self._stack.width

    @property
    def height(self) -> int:
        return self._stack.height

    def read(self, box: BoundingBox, counted: Optional[BoundingBox] = None) -> PredictionStack:
        _check_box(self, box)
        return self._stack.crop(box)


class Psf3StackSource(StackSource):
    """
    Memory-mapped PSF3 stack; only the requested window is read

    Out-of-range values are clamped into [0, 1] per window. Only values inside the
    `counted` rect of each read add to `clamped`; tiles pass their inner rect, so
    halo pixels read by several tiles are counted once.
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        with open(self.path, "rb") as handle:
            header = handle.read(PSF3_HEADER_SIZE)
        width, height, channels = PSF3Parser().read_header(header, str(self.path))
        if channels != 3:
            raise FormatError(f"Prediction stack needs 3 channels, found {channels}", str(self.path), 12)
        expected = PSF3_HEADER_SIZE + 4 * width * height * channels
        actual = self.path.stat().st_size
        if actual < expected:
            raise TruncatedPayloadError(f"Expected {expected} bytes, found {actual}", str(self.path), actual)
        self._width, self._height = width, height
        self._values = np.memmap(
            self.path, dtype="<f4", mode="r", offset=PSF3_HEADER_SIZE, shape=(3, height, width)
        )
        self._lock = threading.Lock()
        self.clamped = 0

    @property
    def width(self) -> int:
        return self._width

    @property
    def height(self) -> int:
        return self._height

    def read(self, box: BoundingBox, counted: Optional[BoundingBox] = None) -> PredictionStack:
        _check_box(self, box)
        window = np.array(self._values[:, box.y_min:box.y_max, box.x_min:box.x_max], dtype=np.float32)
        if not np.all(np.isfinite(window)):
            raise FormatError(f"Non-finite value in window {box.as_tuple()}", str(self.path))
        if counted is None:
            counted = box
        if not box.contains(counted):
            raise PreconditionError(f"Counted rect {counted.as_tuple()} is not inside window {box.as_tuple()}")
        rows, cols = local_slices(counted, box)
        _, clamped = clamp_unit(window[:, rows, cols])
        window = np.clip(window, 0.0, 1.0)
        if clamped:
            with self._lock:
                self.clamped += clamped
        return PredictionStack(window)
