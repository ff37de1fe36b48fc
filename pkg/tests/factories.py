"""Synthetic-image factories shared by the test modules"""

import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from core.models import LabelImage


def disk_labels(
    height: int,
    width: int,
    centers: Sequence[tuple[int, int]],
    radius: float,
) -> LabelImage:
    """Filled disks labeled 1..n in the order given; centers are (x, y)"""
    yy, xx = np.mgrid[:height, :width]
    labels = np.zeros((height, width), dtype=np.uint32)
    for instance_id, (cx, cy) in enumerate(centers, start=1):
        labels[(xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2] = instance_id
    return LabelImage(labels)


def separated_centers(
    rng: np.random.Generator,
    height: int,
    width: int,
    count: int,
    radius: float,
    gap: float = 6,
    margin: Optional[int] = None,
) -> list[tuple[int, int]]:
    """Rejection-sample disk centers at least 2 * radius + gap apart"""
    margin = int(radius) + 2 if margin is None else margin
    centers: list[tuple[int, int]] = []
    attempts = 0
    while len(centers) < count:
        attempts += 1
        if attempts > 100_000:
            raise RuntimeError("could not place disks")
        x = int(rng.integers(margin, width - margin))
        y = int(rng.integers(margin, height - margin))
        if all((x - cx) ** 2 + (y - cy) ** 2 >= (2 * radius + gap) ** 2 for cx, cy in centers):
            centers.append((x, y))
    return centers


def square_labels(height: int, width: int, boxes: Sequence[tuple[int, int, int, int]]) -> LabelImage:
    """Axis-aligned rectangles (x_min, y_min, x_max, y_max), half-open, labeled 1..n"""
    labels = np.zeros((height, width), dtype=np.uint32)
    for instance_id, (x0, y0, x1, y1) in enumerate(boxes, start=1):
        labels[y0:y1, x0:x1] = instance_id
    return LabelImage(labels)


def write_manifest(path: Path, samples: list[dict], name: str = "synthetic") -> Path:
    path.write_text(json.dumps({"name": name, "samples": samples}), encoding="utf-8")
    return path


