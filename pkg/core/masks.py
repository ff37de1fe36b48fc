"""Lossless conversions between labelings, binary masks, run lengths and boxes"""

from typing import Iterable

import numpy as np
from scipy import ndimage

from .exceptions import DimensionMismatchError, EmptyObjectError, InvalidValueError
from .models import BoundingBox, LabelImage, MaskRLE

# 4-connectivity is used for seeds, instances and error components alike
FOUR_CONNECTIVITY = ndimage.generate_binary_structure(2, 1)


def _binary(mask) -> np.ndarray:
    array = np.asarray(mask)
    if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
        raise InvalidValueError(f"expected a nonempty 2-D mask, got shape {array.shape}", field="mask")
    return array.astype(bool, copy=False)


def mask_to_rle(mask) -> MaskRLE:
    """Encode a binary raster as column-major run lengths starting with background"""
    array = _binary(mask)
    height, width = array.shape
    flat = array.ravel(order="F")
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return MaskRLE(width=width, height=height, counts=counts)


def rle_to_mask(rle: MaskRLE) -> np.ndarray:
    """Decode run lengths into a (height, width) boolean raster"""
    values = np.arange(len(rle.counts)) % 2 == 1
    flat = np.repeat(values, rle.counts)
    return flat.reshape((rle.height, rle.width), order="F")


def label_image_to_masks(labels: LabelImage) -> list[tuple[int, MaskRLE]]:
    """One RLE mask per instance, ids ascending"""
    masks = []
    for instance_id in labels.ids():
        masks.append((int(instance_id), mask_to_rle(labels.labels == instance_id)))
    return masks


def paint_masks(masks: Iterable[tuple[int, MaskRLE]], width: int, height: int) -> LabelImage:
    """Inverse of label_image_to_masks; paints in descending id order"""
    canvas = np.zeros((height, width), dtype=np.uint32)
    for instance_id, rle in sorted(masks, key=lambda item: item[0], reverse=True):
        if (rle.width, rle.height) != (width, height):
            raise DimensionMismatchError((rle.height, rle.width), (height, width))
        canvas[rle_to_mask(rle)] = instance_id
    return LabelImage(canvas)


def bounding_box_of(mask) -> BoundingBox:
    """Tight half-open box around all set pixels"""
    array = _binary(mask)
    rows = np.flatnonzero(array.any(axis=1))
    if rows.size == 0:
        raise EmptyObjectError("cannot take the bounding box of an empty mask")
    cols = np.flatnonzero(array.any(axis=0))
    return BoundingBox(
        x_min=int(cols[0]), y_min=int(rows[0]),
        x_max=int(cols[-1]) + 1, y_max=int(rows[-1]) + 1,
    )


def label_components(mask) -> tuple[np.ndarray, int]:
    """4-connected components numbered in row-major discovery order"""
    labels, count = ndimage.label(_binary(mask), structure=FOUR_CONNECTIVITY)
    return labels.astype(np.int32, copy=False), int(count)


def relabel_sequential(labels: np.ndarray) -> np.ndarray:
    """Renumber ids 1..N in order of each instance's first row-major pixel"""
    flat = np.asarray(labels).reshape(-1)
    ids, first = np.unique(flat, return_index=True)
    keep = ids != 0
    ids, first = ids[keep], first[keep]
    out = np.zeros(flat.shape, dtype=np.uint32)
    if ids.size == 0:
        return out.reshape(np.shape(labels))
    rank = np.empty(ids.size, dtype=np.uint32)
    rank[np.argsort(first, kind="stable")] = np.arange(1, ids.size + 1, dtype=np.uint32)
    nonzero = flat != 0
    out[nonzero] = rank[np.searchsorted(ids, flat[nonzero])]
    return out.reshape(np.shape(labels))


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if np.shape(a) != np.shape(b):
        raise DimensionMismatchError(np.shape(a), np.shape(b))
