"""Promptable predictors: ground-truth oracle, region growing and file-backed proposals"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from core.enums import PredictorName
from core.exceptions import ConfigError, PredictorError
from core.interfaces import Predictor
from core.masks import check_same_shape, label_components
from core.models import (
    BoundingBox, BoxPrompt, LabelImage, MaskPrompt, NegativePoint, PositivePoint, Prediction,
    PredictorSettings, Prompt,
)

logger = logging.getLogger(__name__)


class BasePredictor(Predictor):
    """Shared prompt validation for predictors bound to one image"""

    def __init__(self, height: int, width: int):
        self._shape = (int(height), int(width))

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    def _check_prompts(self, prompts: Sequence[Prompt]) -> None:
        height, width = self._shape
        for prompt in prompts:
            if isinstance(prompt, (PositivePoint, NegativePoint)):
                if prompt.x >= width or prompt.y >= height:
                    raise PredictorError(
                        f"Point ({prompt.x}, {prompt.y}) outside {width}x{height} image", self.name
                    )
            elif isinstance(prompt, BoxPrompt):
                if prompt.box.x_max > width or prompt.box.y_max > height:
                    raise PredictorError(f"Box {prompt.box.as_tuple()} outside image", self.name)
            elif isinstance(prompt, MaskPrompt):
                rows, cols = prompt.mask.shape
                if rows * prompt.downscale < height or cols * prompt.downscale < width:
                    raise PredictorError(
                        f"Mask prompt {rows}x{cols} at downscale {prompt.downscale} "
                        f"does not cover {width}x{height} image", self.name,
                    )

    def _empty(self) -> Prediction:
        return Prediction(np.zeros(self._shape, dtype=bool), 0.0)


def _first(prompts: Sequence[Prompt], kind: type):
    for prompt in prompts:
        if isinstance(prompt, kind):
            return prompt
    return None


def _box_center(box: BoundingBox) -> tuple[int, int]:
    return (box.x_min + box.x_max) // 2, (box.y_min + box.y_max) // 2


def best_instance_for_box(labels: np.ndarray, box: BoundingBox) -> int:
    """Instance id with maximal IoU against the box rectangle; lowest id on ties, 0 if none"""
    inside = labels[box.slices]
    ids, overlaps = np.unique(inside[inside != 0], return_counts=True)
    if ids.size == 0:
        return 0
    all_ids, all_sizes = np.unique(labels, return_counts=True)
    sizes = all_sizes[np.searchsorted(all_ids, ids)]
    ious = overlaps / (box.area + sizes - overlaps)
    # argmax returns the first maximum, ids are sorted ascending
    return int(ids[int(np.argmax(ious))])


class LabelLookupPredictor(BasePredictor):
    """Answers prompts by looking up instances of a fixed labeling"""

    def __init__(self, labels: LabelImage):
        super().__init__(labels.height, labels.width)
        self._labels = labels.labels

    def _instance_confidence(self, mask: np.ndarray) -> float:
        return 1.0

    def predict(self, prompts: Sequence[Prompt], prior_mask: Optional[np.ndarray] = None) -> Prediction:
        self._check_prompts(prompts)

        point = _first(prompts, PositivePoint)
        if point is not None:
            instance_id = int(self._labels[point.y, point.x])
        else:
            box = _first(prompts, BoxPrompt)
            if box is None:
                return self._empty()
            instance_id = best_instance_for_box(self._labels, box.box)

        if instance_id == 0:
            return self._empty()
        mask = self._labels == instance_id
        return Prediction(mask, self._instance_confidence(mask))


class OraclePredictor(LabelLookupPredictor):
    """
    Model-free predictor backed by the ground truth

    The first positive point selects the gt instance under it (empty at confidence 0
    on background); without points, a box selects the instance with the highest IoU
    against the box rectangle. Negative points and mask prompts are ignored.
    """

    @property
    def name(self) -> str:
        return PredictorName.ORACLE.value


class FileMaskPredictor(LabelLookupPredictor):
    """Proposal labeling exported by an external model, optionally with a per-pixel confidence map"""

    def __init__(self, proposals: LabelImage, confidence: Optional[np.ndarray] = None):
        super().__init__(proposals)
        if confidence is not None:
            check_same_shape(proposals.labels, confidence)
            confidence = np.clip(np.asarray(confidence, dtype=np.float64), 0.0, 1.0)
        self._confidence = confidence

    @property
    def name(self) -> str:
        return PredictorName.FILE.value

    def _instance_confidence(self, mask: np.ndarray) -> float:
        if self._confidence is None:
            return 1.0
        return float(self._confidence[mask].mean())


class RegionGrowPredictor(BasePredictor):
    """
    Imperfect predictor growing 4-connected regions over a scalar guidance raster

    Each positive point (and the center of a box prompt) grows the component of pixels
    whose guidance lies within `threshold` of the seed value. A mask prompt adds its
    upsampled foreground (>= 0.5) as prior. Components grown from negative points are removed and the result is clipped to the box. Confidence is
    the mean affinity 1 - |g - g_seed| / threshold over the returned pixels.
    """

    def __init__(self, guidance: np.ndarray, threshold: float = 0.1):
        guidance = np.asarray(guidance, dtype=np.float64)
        if guidance.ndim != 2:
            raise ConfigError("Guidance raster must be 2-D", field="guidance")
        if not np.all(np.isfinite(guidance)):
            raise ConfigError("Guidance raster must be finite", field="guidance")
        if threshold < 0:
            raise ConfigError("Region-grow threshold must be nonnegative", field="region_grow_threshold")
        super().__init__(*guidance.shape)
        self._guidance = guidance
        self._threshold = float(threshold)

    @property
    def name(self) -> str:
        return PredictorName.REGIONGROW.value

    @property
    def capabilities(self) -> dict:
        return {
            "positive_point": True,
            "negative_point": True,
            "box": True,
            "mask": True,
        }

    def _affinity(self, x: int, y: int) -> np.ndarray:
        difference = np.abs(self._guidance - self._guidance[y, x])
        if self._threshold == 0:
            return (difference == 0).astype(np.float64)
        return np.clip(1.0 - difference / self._threshold, 0.0, 1.0)

    def _grow(self, x: int, y: int) -> np.ndarray:
        similar = np.abs(self._guidance - self._guidance[y, x]) <= self._threshold
        components, _ = label_components(similar)
        return components == components[y, x]

    def predict(self, prompts: Sequence[Prompt], prior_mask: Optional[np.ndarray] = None) -> Prediction:
        self._check_prompts(prompts)
        box = _first(prompts, BoxPrompt)

        seeds = [(p.x, p.y) for p in prompts if isinstance(p, PositivePoint)]
        if box is not None:
            seeds.append(_box_center(box.box))
        prior = _first(prompts, MaskPrompt)
        if not seeds and prior is None:
            return self._empty()

        mask = np.zeros(self.shape, dtype=bool)
        affinity = np.zeros(self.shape, dtype=np.float64)
        if prior is not None:
            mask |= prior.upsampled(*self.shape) >= 0.5
        for x, y in seeds:
            mask |= self._grow(x, y)
            affinity = np.maximum(affinity, self._affinity(x, y))
        for prompt in prompts:
            if isinstance(prompt, NegativePoint):
                mask &= ~self._grow(prompt.x, prompt.y)
        if box is not None:
            clipped = np.zeros_like(mask)
            clipped[box.box.slices] = mask[box.box.slices]
            mask = clipped

        if not mask.any():
            return self._empty()
        return Prediction(mask, float(affinity[mask].mean()))


PredictorFactory = Callable[..., Predictor]


def _build_oracle(gt: Optional[LabelImage] = None, **_) -> Predictor:
    if gt is None:
        raise ConfigError("The oracle predictor needs ground-truth labels", field="gt")
    return OraclePredictor(gt)


def _build_regiongrow(
    guidance: Optional[np.ndarray] = None,
    settings: PredictorSettings = PredictorSettings(),
    **_,
) -> Predictor:
    if guidance is None:
        raise ConfigError("The regiongrow predictor needs a guidance raster", field="guidance")
    return RegionGrowPredictor(guidance, settings.region_grow_threshold)


def _build_file(
    proposals: Optional[LabelImage] = None,
    confidence: Optional[np.ndarray] = None,
    **_,
) -> Predictor:
    if proposals is None:
        raise ConfigError("The file predictor needs a proposal labeling", field="proposals")
    return FileMaskPredictor(proposals, confidence)


PREDICTORS: dict[str, PredictorFactory] = {
    PredictorName.ORACLE.value: _build_oracle,
    PredictorName.REGIONGROW.value: _build_regiongrow,
    PredictorName.FILE.value: _build_file,
}


def resolve_predictor_name(name: str) -> PredictorName:
    """Map a user-supplied name onto the registry, listing valid names on failure"""
    key = str(getattr(name, "value", name)).strip().lower()
    if key not in PREDICTORS:
        valid = ", ".join(sorted(PREDICTORS))
        raise ConfigError(f"Unknown predictor '{name}'. Valid predictors: {valid}", field="predictor")
    return PredictorName(key)


def build_predictor(
    settings: PredictorSettings,
    gt: Optional[LabelImage] = None,
    guidance: Optional[np.ndarray] = None,
    proposals: Optional[LabelImage] = None,
    confidence: Optional[np.ndarray] = None,
) -> Predictor:
    """
    Instantiate the configured predictor for one image

    Raises:
        ConfigError: Unknown name or a missing input the predictor needs
    """
    name = resolve_predictor_name(settings.name)
    predictor = PREDICTORS[name.value](
        gt=gt, guidance=guidance, proposals=proposals, confidence=confidence, settings=settings,
    )
    logger.debug("Built %s predictor for %dx%d image", name.value, predictor.shape[1], predictor.shape[0])
    return predictor
