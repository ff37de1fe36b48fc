"""Dataset-level aggregation of per-image scores"""

import math
from typing import Mapping, Sequence, Union

from core.exceptions import DataError
from core.models import AggregateResult


def aggregate_dataset(scores: Union[Mapping[str, float], Sequence[tuple[str, float]]]) -> AggregateResult:
    """Arithmetic mean over images, rows kept in sample_id order"""
    rows = sorted(scores.items() if isinstance(scores, Mapping) else scores, key=lambda r: r[0])
    if not rows:
        raise DataError("Cannot aggregate an empty set of images")
    mean = math.fsum(score for _, score in rows) / len(rows)
    return AggregateResult(mean=mean, per_image=[(sid, float(s)) for sid, s in rows])
