"""Simulated interactive segmentation of single objects"""

import logging
from typing import Optional

import numpy as np

from core.enums import SamplingMode, StartKind
from core.exceptions import EmptyObjectError, HistosegError
from core.interfaces import Predictor
from core.masks import mask_to_rle
from core.models import InteractiveTrace, MaskPrompt, TraceStep
from .prompts import correction_prompts, initial_prompt

logger = logging.getLogger(__name__)


def mask_iou(pred: np.ndarray, gt: np.ndarray) -> float:
    union = np.count_nonzero(pred | gt)
    if union == 0:
        return 1.0
    return np.count_nonzero(pred & gt) / union


def iterative_eval(
    predictor: Predictor,
    gt_mask: np.ndarray,
    start: StartKind,
    n_corrections: int = 7,
    use_mask_prompt: bool = False,
    sampling: SamplingMode = SamplingMode.INTERIOR,
    rng: Optional[np.random.Generator] = None,
    object_id: int = 0,
) -> InteractiveTrace:
    """
    Initial prompt, then up to `n_corrections` rounds of corrective clicks

    Correction points accumulate across iterations and every predict call sees the
    whole list (plus the previous prediction as a mask prompt when enabled). The run
    stops early once the prediction equals the object. A predictor failure truncates
    the trace and records the error.
    """
    gt = np.asarray(gt_mask, dtype=bool)
    if not gt.any():
        raise EmptyObjectError("interactive evaluation needs a nonempty object")

    prompts = [initial_prompt(gt, start, sampling, rng)]
    steps: list[TraceStep] = []
    previous: Optional[np.ndarray] = None
    early_stop = False
    error = None

    for iteration in range(n_corrections + 1):
        if previous is not None:
            positive, negative = correction_prompts(previous, gt, sampling, rng)
            if positive is None and negative is None:
                early_stop = True
                break
            prompts.extend(p for p in (positive, negative) if p is not None)

        issued = list(prompts)
        if use_mask_prompt and previous is not None:
            issued.append(MaskPrompt(mask=previous.astype(np.float32)))

        try:
            prediction = predictor.predict(issued, prior_mask=previous)
        except HistosegError as e:
            error = str(e)
            logger.warning("Predictor %s failed on object %d at iteration %d: %s",
                           predictor.name, object_id, iteration, e)
            break
        if prediction.mask.shape != gt.shape:
            error = f"predicted mask shape {prediction.mask.shape} != {gt.shape}"
            break

        steps.append(TraceStep(
            iteration=iteration,
            prompts=issued,
            mask_rle=mask_to_rle(prediction.mask),
            score=mask_iou(prediction.mask, gt),
        ))
        previous = prediction.mask

    return InteractiveTrace(
        object_id=object_id,
        start=start,
        n_corrections=n_corrections,
        steps=steps,
        early_stop=early_stop,
        error=error,
    )
