"""IoU contingency tables and one-to-one matching"""

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import UnsupportedThresholdError
from core.masks import check_same_shape
from core.models import LabelImage, MatchRow, MatchTable

MIN_MATCH_THRESHOLD = 0.5


@dataclass(frozen=True)
class IouTable:
    """Sparse pairwise IoU between gt and predicted instances, background excluded"""
    gt_sizes: dict[int, int]
    pred_sizes: dict[int, int]
    ious: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def n_gt(self) -> int:
        return len(self.gt_sizes)

    @property
    def n_pred(self) -> int:
        return len(self.pred_sizes)


def _sizes(labels: np.ndarray) -> dict[int, int]:
    ids, counts = np.unique(labels[labels != 0], return_counts=True)
    return {int(i): int(c) for i, c in zip(ids, counts)}


def iou_table(pred: LabelImage, gt: LabelImage) -> IouTable:
    """One contingency pass over (gt_id, pred_id) pixel pairs"""
    check_same_shape(pred.labels, gt.labels)
    g = gt.labels.reshape(-1).astype(np.uint64)
    p = pred.labels.reshape(-1).astype(np.uint64)
    both = (g != 0) & (p != 0)
    keys, overlaps = np.unique((g[both] << np.uint64(32)) | p[both], return_counts=True)

    gt_sizes = _sizes(gt.labels)
    pred_sizes = _sizes(pred.labels)
    ious: dict[tuple[int, int], float] = {}
    for key, overlap in zip(keys.tolist(), overlaps.tolist()):
        g_id, p_id = key >> 32, key & 0xFFFFFFFF
        union = gt_sizes[g_id] + pred_sizes[p_id] - overlap
        ious[(g_id, p_id)] = overlap / union
    return IouTable(gt_sizes=gt_sizes, pred_sizes=pred_sizes, ious=ious)


def match_at_threshold(table: IouTable, threshold: float) -> MatchRow:
    """
    Greedy descending-IoU matching of pairs with IoU >= threshold

    For thresholds of at least 0.5 every object has at most one partner above the
    threshold, so greedy matching is the optimal one-to-one assignment.
    """
    if threshold < MIN_MATCH_THRESHOLD:
        raise UnsupportedThresholdError(threshold)

    candidates = sorted(
        ((iou, g, p) for (g, p), iou in table.ious.items() if iou >= threshold),
        key=lambda c: (-c[0], c[1], c[2]),
    )
    used_gt: set[int] = set()
    used_pred: set[int] = set()
    pairs = []
    for iou, g, p in candidates:
        if g in used_gt or p in used_pred:
            continue
        used_gt.add(g)
        used_pred.add(p)
        pairs.append((g, p, iou))

    tp = len(pairs)
    return MatchRow(
        threshold=threshold,
        tp=tp,
        fp=table.n_pred - tp,
        fn=table.n_gt - tp,
        pairs=pairs,
    )


def match_table(pred: LabelImage, gt: LabelImage, thresholds: list[float]) -> MatchTable:
    table = iou_table(pred, gt)
    rows = [match_at_threshold(table, t) for t in thresholds]
    return MatchTable(n_pred=table.n_pred, n_gt=table.n_gt, rows=rows)
