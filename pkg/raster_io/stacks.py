"""Float raster persistence: prediction stacks, semantic probability maps, guidance rasters"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from core.exceptions import FormatError
from core.models import PredictionStack, SemanticProbMap
from .parsers import PSF3Parser, PSF3_HEADER_SIZE

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_parser = PSF3Parser()


def _check_finite(values: np.ndarray, path: str) -> None:
    bad = np.flatnonzero(~np.isfinite(values.reshape(-1)))
    if bad.size:
        raise FormatError("Non-finite value", path, PSF3_HEADER_SIZE + int(bad[0]) * 4)


def load_float_raster(path: PathLike) -> np.ndarray:
    """Load a PSF3 file with any channel count as a (C, H, W) float32 array"""
    values = _parser.parse(Path(path).read_bytes(), str(path))
    _check_finite(values, str(path))
    return values


def save_float_raster(values: np.ndarray, path: PathLike) -> None:
    array = np.asarray(values, dtype=np.float32)
    if array.ndim == 2:
        array = array[np.newaxis]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(_parser.serialize(array))


def clamp_unit(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Clamp to [0, 1]; returns the clamped array and how many values moved"""
    outside = int(np.count_nonzero((values < 0.0) | (values > 1.0)))
    return np.clip(values, 0.0, 1.0).astype(np.float32), outside


def load_prediction_stack(path: PathLike) -> tuple[PredictionStack, int]:
    """Load a 3-channel PSF3 stack; returns the stack and the clamped-value count"""
    values = load_float_raster(path)
    if values.shape[0] != 3:
        raise FormatError(f"Prediction stack needs 3 channels, found {values.shape[0]}", str(path), 12)
    values, clamped = clamp_unit(values)
    if clamped:
        logger.warning("Clamped %d values of %s into [0, 1]", clamped, path)
    return PredictionStack(values), clamped


def save_prediction_stack(stack: PredictionStack, path: PathLike) -> None:
    save_float_raster(stack.channels, path)


def load_semantic_probs(path: PathLike) -> SemanticProbMap:
    """Semantic probability maps reuse PSF3 with C+1 channels"""
    values = load_float_raster(path)
    if values.shape[0] < 2:
        raise FormatError(f"Probability map needs at least 2 channels, found {values.shape[0]}", str(path), 12)
    return SemanticProbMap(values)


def save_semantic_probs(probs: SemanticProbMap, path: PathLike) -> None:
    save_float_raster(probs.channels, path)


def load_guidance(path: PathLike) -> np.ndarray:
    """Single-channel guidance raster for the region-grow predictor"""
    values = load_float_raster(path)
    if values.shape[0] != 1:
        raise FormatError(f"Guidance raster needs 1 channel, found {values.shape[0]}", str(path), 12)
    return values[0]
