"""Instance segmentation scores: mean segmentation accuracy and detection curves"""

from typing import Optional, Sequence

from core.exceptions import InvalidValueError
from core.models import DetectionCurve, DetectionPoint, LabelImage, MatchTable
from .matching import match_table

DEFAULT_THRESHOLDS = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]


def _thresholds(thresholds: Optional[Sequence[float]]) -> list[float]:
    if thresholds is None:
        return list(DEFAULT_THRESHOLDS)
    if len(thresholds) == 0:
        raise InvalidValueError("at least one IoU threshold is required", field="thresholds")
    return list(thresholds)


def _ratio(numerator: int, denominator: int, both_empty: bool) -> float:
    # 0/0 scores 1.0 only when neither labeling has objects
    if denominator == 0:
        return 1.0 if both_empty else 0.0
    return numerator / denominator


def segmentation_accuracy(table: MatchTable) -> list[float]:
    """TP / (TP + FP + FN) per threshold"""
    both_empty = table.n_pred == 0 and table.n_gt == 0
    return [_ratio(r.tp, r.tp + r.fp + r.fn, both_empty) for r in table.rows]


def mean_segmentation_accuracy(
    pred: LabelImage,
    gt: LabelImage,
    thresholds: Optional[Sequence[float]] = None,
) -> float:
    """Average of TP / (TP + FP + FN) over IoU thresholds"""
    thresholds = _thresholds(thresholds)
    scores = segmentation_accuracy(match_table(pred, gt, thresholds))
    return sum(scores) / len(scores)


def curve_from_table(table: MatchTable) -> DetectionCurve:
    both_empty = table.n_pred == 0 and table.n_gt == 0
    points = []
    for row in table.rows:
        points.append(DetectionPoint(
            threshold=row.threshold,
            precision=_ratio(row.tp, row.tp + row.fp, both_empty),
            recall=_ratio(row.tp, row.tp + row.fn, both_empty),
            f1=_ratio(2 * row.tp, 2 * row.tp + row.fp + row.fn, both_empty),
            tp=row.tp,
            fp=row.fp,
            fn=row.fn,
        ))
    return DetectionCurve(points=points)


def detection_metrics(
    pred: LabelImage,
    gt: LabelImage,
    thresholds: Optional[Sequence[float]] = None,
) -> DetectionCurve:
    """Precision, recall and F1 per IoU threshold"""
    thresholds = _thresholds(thresholds)
    return curve_from_table(match_table(pred, gt, thresholds))


def pooled_detection(counts: Sequence[tuple[int, int, int]], n_objects_total: int) -> DetectionPoint:
    """Precision/recall/F1 from (TP, FP, FN) counts summed over images"""
    tp = sum(c[0] for c in counts)
    fp = sum(c[1] for c in counts)
    fn = sum(c[2] for c in counts)
    both_empty = n_objects_total == 0
    return DetectionPoint(
        threshold=0.0,
        precision=_ratio(tp, tp + fp, both_empty),
        recall=_ratio(tp, tp + fn, both_empty),
        f1=_ratio(2 * tp, 2 * tp + fp + fn, both_empty),
        tp=tp, fp=fp, fn=fn,
    )
