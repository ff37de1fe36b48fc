"""Automatic mask generation from a regular grid of point prompts"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from core.exceptions import HistosegError, InvalidValueError
from core.interfaces import Predictor
from core.masks import bounding_box_of, relabel_sequential
from core.models import AmgParams, BoundingBox, LabelImage, PositivePoint, Prediction
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


@dataclass
class PointFailure:
    index: int
    x: int
    y: int
    message: str


@dataclass
class AmgResult:
    """Generated labeling plus per-point bookkeeping"""
    labels: LabelImage
    n_points: int = 0
    n_candidates: int = 0
    n_kept: int = 0
    failures: list[PointFailure] = field(default_factory=list)

    @property
    def n_failures(self) -> int:
        return len(self.failures)


def point_grid(n_per_side: int, width: int, height: int) -> list[PositivePoint]:
    """n*n cell-center points, rows outer; x_i = floor((2i + 1) * width / (2n))"""
    if n_per_side < 1:
        raise InvalidValueError("points per side must be at least 1", field="points_per_side")
    if width < 1 or height < 1:
        raise InvalidValueError("image dimensions must be positive", field="grid")
    xs = [(2 * i + 1) * width // (2 * n_per_side) for i in range(n_per_side)]
    ys = [(2 * j + 1) * height // (2 * n_per_side) for j in range(n_per_side)]
    return [PositivePoint(x=x, y=y) for y in ys for x in xs]


@dataclass
class _KeptMask:
    mask: np.ndarray
    area: int
    box: BoundingBox

    def iou(self, other: "_KeptMask") -> float:
        overlap = self.box.intersection(other.box)
        if overlap is None:
            return 0.0
        rows, cols = overlap.slices
        inter = int(np.count_nonzero(self.mask[rows, cols] & other.mask[rows, cols]))
        return inter / (self.area + other.area - inter)


def amg_generate(
    predictor: Predictor,
    grid: Optional[list[PositivePoint]] = None,
    params: AmgParams = AmgParams(),
    jobs: int = 1,
    on_point: Optional[Callable[[PositivePoint], None]] = None,
) -> AmgResult:
    """
    Prompt every grid point, filter unlikely masks, deduplicate and paint

    Masks below `confidence_min` or `min_area` are discarded. The rest are sorted by
    confidence (descending, grid order on ties); a mask whose IoU with any kept mask
    reaches `dedup_iou` is dropped. Kept masks are painted in order and never
    overwrite pixels already claimed.
    """
    height, width = predictor.shape
    if grid is None:
        grid = point_grid(params.points_per_side, width, height)

    def _predict(point: PositivePoint) -> tuple[Optional[Prediction], Optional[str]]:
        try:
            answer = predictor.predict([point]), None
        except HistosegError as e:
            answer = None, str(e)
        if on_point:
            on_point(point)
        return answer

    answers = map_ordered(_predict, grid, jobs)

    failures = []
    candidates = []
    for index, (point, (prediction, error)) in enumerate(zip(grid, answers)):
        if prediction is None:
            failures.append(PointFailure(index=index, x=point.x, y=point.y, message=error))
            logger.warning("Predictor failed at grid point %d (%d, %d): %s", index, point.x, point.y, error)
            continue
        if prediction.mask.shape != (height, width):
            failures.append(PointFailure(index=index, x=point.x, y=point.y, message="mask shape mismatch"))
            continue
        if prediction.area == 0 or prediction.area < params.min_area:
            continue
        if prediction.confidence < params.confidence_min:
            continue
        candidates.append((index, prediction))

    candidates.sort(key=lambda item: (-item[1].confidence, item[0]))

    kept: list[_KeptMask] = []
    for _, prediction in candidates:
        entry = _KeptMask(prediction.mask, prediction.area, bounding_box_of(prediction.mask))
        if any(entry.iou(other) >= params.dedup_iou for other in kept):
            continue
        kept.append(entry)

    canvas = np.zeros((height, width), dtype=np.uint32)
    for instance_id, entry in enumerate(kept, start=1):
        canvas[entry.mask & (canvas == 0)] = instance_id

    logger.info(
        "AMG: %d points, %d candidates, %d kept, %d failures",
        len(grid), len(candidates), len(kept), len(failures),
    )
    return AmgResult(
        labels=LabelImage(relabel_sequential(canvas)),
        n_points=len(grid),
        n_candidates=len(candidates),
        n_kept=len(kept),
        failures=failures,
    )
