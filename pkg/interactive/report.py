"""Dataset-level interactive segmentation report"""

import logging
import math
import zlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from core.enums import SamplingMode, StartKind
from core.exceptions import DataError
from core.interfaces import Predictor
from core.models import (
    InteractiveReport, InteractiveSettings, InteractiveSummary, InteractiveTrace,
    LabelImage, SampleTraces,
)
from metrics.aggregate import aggregate_dataset
from utils.parallel import map_ordered
from .evaluation import iterative_eval

logger = logging.getLogger(__name__)


@dataclass
class InteractiveSample:
    """One image: its gt labeling and a predictor bound to it"""
    sample_id: str
    dataset: str
    gt: LabelImage
    predictor: Predictor


def _trace_rng(settings: InteractiveSettings, sample_id: str, object_id: int, start: StartKind):
    if settings.sampling != SamplingMode.RANDOM:
        return None
    kind_index = 0 if start == StartKind.POINT else 1
    entropy = [settings.seed or 0, zlib.crc32(sample_id.encode("utf-8")), object_id, kind_index]
    return np.random.default_rng(entropy)


def run_sample(sample: InteractiveSample, settings: InteractiveSettings) -> SampleTraces:
    """Every gt object of one image, for each configured start kind"""
    traces = []
    for start in settings.start.kinds():
        for object_id in sample.gt.ids().tolist():
            traces.append(iterative_eval(
                sample.predictor,
                sample.gt.labels == object_id,
                start,
                n_corrections=settings.n_corrections,
                use_mask_prompt=settings.use_mask_prompt,
                sampling=settings.sampling,
                rng=_trace_rng(settings, sample.sample_id, object_id, start),
                object_id=object_id,
            ))
    return SampleTraces(sample_id=sample.sample_id, dataset=sample.dataset, traces=traces)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _image_curve(traces: list[InteractiveTrace]) -> Optional[list[float]]:
    """Mean score per iteration over one image's objects"""
    curves = [t.scores() for t in traces if t.steps]
    if not curves:
        return None
    return [_mean(column) for column in zip(*curves)]


def _dataset_curve(per_image: dict[str, list[float]]) -> list[float]:
    if not per_image:
        return []
    length = len(next(iter(per_image.values())))
    return [
        aggregate_dataset({sid: curve[k] for sid, curve in per_image.items()}).mean
        for k in range(length)
    ]


def summarize(samples: Sequence[SampleTraces], settings: InteractiveSettings) -> list[InteractiveSummary]:
    """Average objects within each image, then images within each dataset"""
    summaries = []
    for dataset in sorted({s.dataset for s in samples}):
        members = [s for s in samples if s.dataset == dataset]
        curves: dict[StartKind, dict[str, list[float]]] = {kind: {} for kind in settings.start.kinds()}
        n_objects = 0
        for sample in members:
            object_ids = {t.object_id for t in sample.traces if t.steps}
            n_objects += len(object_ids)
            for kind in curves:
                curve = _image_curve([t for t in sample.traces if t.start == kind])
                if curve is not None:
                    curves[kind][sample.sample_id] = curve

        point_curve = _dataset_curve(curves.get(StartKind.POINT, {}))
        box_curve = _dataset_curve(curves.get(StartKind.BOX, {}))
        summaries.append(InteractiveSummary(
            dataset=dataset,
            n_images=len(members),
            n_objects=n_objects,
            point=point_curve[0] if point_curve else None,
            box=box_curve[0] if box_curve else None,
            final_point=point_curve[-1] if point_curve else None,
            final_box=box_curve[-1] if box_curve else None,
            point_curve=point_curve,
            box_curve=box_curve,
        ))
    return summaries


def dataset_interactive_report(
    samples: Sequence[InteractiveSample],
    settings: InteractiveSettings = InteractiveSettings(),
    jobs: int = 1,
    on_sample: Optional[Callable[[str], None]] = None,
) -> InteractiveReport:
    """
    Run the interactive protocol over a dataset

    Args:
        samples: Images with their predictors
        settings: Iterations, start kinds, sampling and mask-prompt flag
        jobs: Images processed concurrently
        on_sample: Called with each sample id once its traces are done

    Raises:
        DataError: No samples
    """
    if not samples:
        raise DataError("Interactive report needs at least one sample")
    ordered = sorted(samples, key=lambda s: s.sample_id)

    def _run(sample: InteractiveSample) -> SampleTraces:
        result = run_sample(sample, settings)
        if on_sample:
            on_sample(sample.sample_id)
        return result

    results = map_ordered(_run, ordered, jobs)

    failures = []
    for result in results:
        for trace in result.traces:
            if trace.error:
                failures.append(
                    f"{result.sample_id} object {trace.object_id} ({trace.start.value}): {trace.error}"
                )
    logger.info("Interactive report: %d images, %d failed traces", len(results), len(failures))
    return InteractiveReport(summaries=summarize(results, settings), samples=results, failures=failures)
