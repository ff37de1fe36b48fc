"""Dice scores and semantic-segmentation evaluation"""

import numpy as np

from core.exceptions import InvalidValueError
from core.masks import check_same_shape
from core.models import SemanticLabelImage, SemanticProbMap, SemanticReport


def dice(pred, gt) -> float:
    """2 * sum(p * t) / (sum(p) + sum(t)); 1.0 when both are empty"""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(gt, dtype=np.float64)
    check_same_shape(p, t)
    denominator = p.sum() + t.sum()
    if denominator == 0:
        return 1.0
    return float(2.0 * (p * t).sum() / denominator)


def semantic_argmax(probs: SemanticProbMap) -> SemanticLabelImage:
    """Per-pixel argmax; ties go to the lowest class index"""
    return SemanticLabelImage(np.argmax(probs.channels, axis=0), probs.num_classes)


def weighted_dice(pred: SemanticLabelImage, gt: SemanticLabelImage, num_classes: int) -> SemanticReport:
    """
    One-vs-rest dice per class, weighted by gt pixel frequency

    Classes absent from the ground truth get weight 0.
    """
    check_same_shape(pred.classes, gt.classes)
    for name, image in (("pred", pred), ("gt", gt)):
        if int(image.classes.max()) > num_classes:
            raise InvalidValueError(
                f"class id {int(image.classes.max())} exceeds {num_classes}", field=name
            )

    total = gt.classes.size
    scores, frequencies = [], []
    for class_id in range(num_classes + 1):
        t = gt.classes == class_id
        scores.append(dice(pred.classes == class_id, t))
        frequencies.append(int(np.count_nonzero(t)) / total)

    weighted = float(sum(w * d for w, d in zip(frequencies, scores)))
    return SemanticReport(
        num_classes=num_classes,
        dice=scores,
        frequencies=frequencies,
        weighted_dice=min(max(weighted, 0.0), 1.0),
    )
