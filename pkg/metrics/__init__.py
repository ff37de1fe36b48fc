"""Evaluation metrics"""

from .matching import IouTable, iou_table, match_at_threshold, match_table
from .instance import (
    DEFAULT_THRESHOLDS, mean_segmentation_accuracy, detection_metrics,
    segmentation_accuracy, curve_from_table, pooled_detection,
)
from .semantic import dice, semantic_argmax, weighted_dice
from .aggregate import aggregate_dataset

__all__ = [
    "IouTable",
    "iou_table",
    "match_at_threshold",
    "match_table",
    "DEFAULT_THRESHOLDS",
    "mean_segmentation_accuracy",
    "detection_metrics",
    "segmentation_accuracy",
    "curve_from_table",
    "pooled_detection",
    "dice",
    "semantic_argmax",
    "weighted_dice",
    "aggregate_dataset",
]
