"""Prompt derivation from annotations and prediction errors"""

from typing import Optional

import numpy as np
from scipy import ndimage

from core.enums import SamplingMode, StartKind
from core.exceptions import EmptyObjectError, InvalidValueError
from core.masks import bounding_box_of, check_same_shape, label_components
from core.models import BoxPrompt, NegativePoint, PositivePoint


def interior_point(
    mask: np.ndarray,
    sampling: SamplingMode = SamplingMode.INTERIOR,
    rng: Optional[np.random.Generator] = None,
) -> tuple[int, int]:
    """
    Pick (x, y) inside a mask

    Interior mode returns the pixel farthest from the mask border (pixels outside the
    image count as border), smallest row-major index on ties. Random mode draws a mask
    pixel uniformly.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyObjectError("cannot place a prompt in an empty mask")
    if sampling == SamplingMode.RANDOM:
        if rng is None:
            raise InvalidValueError("random sampling needs a generator", field="rng")
        candidates = np.flatnonzero(mask)
        index = int(candidates[rng.integers(candidates.size)])
    else:
        distance = ndimage.distance_transform_edt(np.pad(mask, 1))[1:-1, 1:-1]
        index = int(np.argmax(distance))
    y, x = divmod(index, mask.shape[1])
    return x, y


def initial_prompt(
    gt_mask: np.ndarray,
    kind: StartKind,
    sampling: SamplingMode = SamplingMode.INTERIOR,
    rng: Optional[np.random.Generator] = None,
):
    """Point at the interior-most pixel, or the tight bounding box"""
    if kind == StartKind.BOX:
        return BoxPrompt(box=bounding_box_of(gt_mask))
    x, y = interior_point(gt_mask, sampling, rng)
    return PositivePoint(x=x, y=y)


def largest_component(mask: np.ndarray) -> Optional[np.ndarray]:
    """Largest 4-connected component; the first discovered wins ties"""
    labels, count = label_components(mask)
    if count == 0:
        return None
    sizes = np.bincount(labels.ravel())[1:]
    return labels == int(np.argmax(sizes)) + 1


def correction_prompts(
    pred_mask: np.ndarray,
    gt_mask: np.ndarray,
    sampling: SamplingMode = SamplingMode.INTERIOR,
    rng: Optional[np.random.Generator] = None,
) -> tuple[Optional[PositivePoint], Optional[NegativePoint]]:
    """Positive point in the largest missed region, negative in the largest spurious one"""
    pred = np.asarray(pred_mask, dtype=bool)
    gt = np.asarray(gt_mask, dtype=bool)
    check_same_shape(pred, gt)

    positive = negative = None
    missed = largest_component(gt & ~pred)
    if missed is not None:
        x, y = interior_point(missed, sampling, rng)
        positive = PositivePoint(x=x, y=y)
    spurious = largest_component(pred & ~gt)
    if spurious is not None:
        x, y = interior_point(spurious, sampling, rng)
        negative = NegativePoint(x=x, y=y)
    return positive, negative
