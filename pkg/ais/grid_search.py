"""Threshold grid search over the seed rule"""

import itertools
import logging
from typing import Sequence

from core.exceptions import InvalidValueError
from core.models import AisParams, GridSearchRow, LabelImage, PredictionStack
from metrics.instance import pooled_detection
from metrics.matching import iou_table, match_at_threshold
from utils.parallel import map_ordered
from .segmenter import instance_segmentation

logger = logging.getLogger(__name__)


def _evaluate_cell(
    samples: Sequence[tuple[PredictionStack, LabelImage]],
    params: AisParams,
    iou_threshold: float,
) -> GridSearchRow:
    counts = []
    n_objects = 0
    n_instances = 0
    for stack, gt in samples:
        labels = instance_segmentation(stack, params)
        table = iou_table(labels, gt)
        row = match_at_threshold(table, iou_threshold)
        counts.append((row.tp, row.fp, row.fn))
        n_objects += table.n_gt + table.n_pred
        n_instances += table.n_pred
    point = pooled_detection(counts, n_objects)
    return GridSearchRow(
        center_threshold=params.center_threshold,
        boundary_threshold=params.boundary_threshold,
        precision=point.precision,
        recall=point.recall,
        f1=point.f1,
        n_samples=len(samples),
        n_instances=n_instances,
    )


def grid_search(
    samples: Sequence[tuple[PredictionStack, LabelImage]],
    center_grid: Sequence[float],
    boundary_grid: Sequence[float],
    base_params: AisParams = AisParams(),
    iou_threshold: float = 0.5,
    jobs: int = 1,
) -> list[GridSearchRow]:
    """
    Segment every sample for each (center, boundary) threshold cell

    TP/FP/FN counts are pooled over samples before computing precision, recall and
    F1. Rows come back sorted by (center_threshold, boundary_threshold); the first
    row with the highest F1 is flagged `is_best`.

    Args:
        samples: (stack, gt) pairs in a fixed order, usually by sample id
        center_grid: Center-distance thresholds
        boundary_grid: Boundary-proximity thresholds
        base_params: Remaining watershed parameters
        iou_threshold: Matching threshold for the detection counts
        jobs: Cells evaluated concurrently
    """
    if not samples:
        raise InvalidValueError("grid search needs at least one sample", field="samples")
    if not center_grid or not boundary_grid:
        raise InvalidValueError("grid search needs nonempty grids", field="grid")

    cells = [
        AisParams(**{**base_params.model_dump(), "center_threshold": tc, "boundary_threshold": tb})
        for tc, tb in itertools.product(sorted(set(center_grid)), sorted(set(boundary_grid)))
    ]
    logger.info("Grid search: %d cells x %d samples", len(cells), len(samples))
    rows = map_ordered(lambda params: _evaluate_cell(samples, params, iou_threshold), cells, jobs)

    best = max(range(len(rows)), key=lambda i: (rows[i].f1, -i))
    rows[best] = rows[best].model_copy(update={"is_best": True})
    return rows
