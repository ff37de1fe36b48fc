"""Core data models for Histoseg"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from .enums import (
    LabelFormat, ReportFormat, SamplingMode, Split, StartKind, StartSelection,
    PredictorName, ResourceStage,
)
from .exceptions import FormatError, InvalidValueError

MAX_LABEL_ID = np.iinfo(np.uint32).max
SIMPLEX_TOLERANCE = 1e-4


def _as_2d(values: Any, name: str) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 2:
        raise InvalidValueError(f"expected a 2-D raster, got shape {array.shape}", field=name)
    if array.shape[0] == 0 or array.shape[1] == 0:
        raise InvalidValueError("raster dimensions must be positive", field=name)
    return array


def _freeze(array: np.ndarray) -> np.ndarray:
    # callers keep their own buffers; the model holds a read-only copy
    if array.flags.writeable or not array.flags.c_contiguous:
        array = np.array(array, order="C", copy=True)
        array.flags.writeable = False
    return array


# ─────────────────────────────────────────────────────────────
# Rasters
# ─────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class LabelImage:
    """Instance labeling; 0 is background, ids need not be contiguous"""
    labels: np.ndarray

    def __post_init__(self):
        array = _as_2d(self.labels, "labels")
        if array.dtype.kind == "f":
            if not np.all(np.isfinite(array)) or np.any(array != np.floor(array)):
                raise InvalidValueError("instance ids must be integers", field="labels")
        elif array.dtype.kind not in "iub":
            raise InvalidValueError(f"unsupported dtype {array.dtype}", field="labels")
        if array.size and (array.min() < 0 or array.max() > MAX_LABEL_ID):
            raise InvalidValueError("instance ids must lie in [0, 2**32 - 1]", field="labels")
        object.__setattr__(self, "labels", _freeze(array.astype(np.uint32, copy=False)))

    @classmethod
    def from_flat(cls, width: int, height: int, values) -> "LabelImage":
        flat = np.asarray(values)
        if width <= 0 or height <= 0 or flat.size != width * height:
            raise InvalidValueError(
                f"{flat.size} values do not fill a {width}x{height} raster", field="labels"
            )
        return cls(flat.reshape(height, width))

    @classmethod
    def empty(cls, width: int, height: int) -> "LabelImage":
        return cls(np.zeros((height, width), dtype=np.uint32))

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def ids(self) -> np.ndarray:
        """Sorted nonzero instance ids"""
        ids = np.unique(self.labels)
        return ids[ids != 0]

    @property
    def num_instances(self) -> int:
        return int(self.ids().size)

    def foreground(self) -> np.ndarray:
        return self.labels != 0

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelImage) and np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PredictionStack:
    """Foreground, center-distance and boundary-proximity planes, all within [0, 1]"""
    channels: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.channels, dtype=np.float32)
        if array.ndim != 3 or array.shape[0] != 3:
            raise InvalidValueError(f"expected shape (3, H, W), got {array.shape}", field="channels")
        if array.shape[1] == 0 or array.shape[2] == 0:
            raise InvalidValueError("raster dimensions must be positive", field="channels")
        if not np.all(np.isfinite(array)):
            raise InvalidValueError("values must be finite", field="channels")
        if array.size and (array.min() < 0.0 or array.max() > 1.0):
            raise InvalidValueError("values must lie in [0, 1]", field="channels")
        object.__setattr__(self, "channels", _freeze(array))

    @classmethod
    def from_planes(cls, foreground, center_distance, boundary_proximity) -> "PredictionStack":
        planes = [np.asarray(p, dtype=np.float32) for p in (foreground, center_distance, boundary_proximity)]
        if len({p.shape for p in planes}) != 1:
            raise InvalidValueError("planes must share one shape", field="channels")
        return cls(np.stack(planes))

    @property
    def foreground(self) -> np.ndarray:
        return self.channels[0]

    @property
    def center_distance(self) -> np.ndarray:
        return self.channels[1]

    @property
    def boundary_proximity(self) -> np.ndarray:
        return self.channels[2]

    @property
    def width(self) -> int:
        return int(self.channels.shape[2])

    @property
    def height(self) -> int:
        return int(self.channels.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape[1:]

    def crop(self, box: "BoundingBox") -> "PredictionStack":
        return PredictionStack(self.channels[:, box.y_min:box.y_max, box.x_min:box.x_max])

    def __eq__(self, other) -> bool:
        return isinstance(other, PredictionStack) and np.array_equal(self.channels, other.channels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SemanticProbMap:
    """C+1 class probability planes, index 0 is background"""
    channels: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.channels, dtype=np.float32)
        if array.ndim != 3 or array.shape[0] < 2:
            raise InvalidValueError(
                f"expected shape (C+1, H, W) with C >= 1, got {array.shape}", field="channels"
            )
        if not np.all(np.isfinite(array)):
            raise InvalidValueError("values must be finite", field="channels")
        sums = array.sum(axis=0, dtype=np.float64)
        if np.any(np.abs(sums - 1.0) > SIMPLEX_TOLERANCE):
            raise InvalidValueError("per-pixel probabilities must sum to 1", field="channels")
        object.__setattr__(self, "channels", _freeze(array))

    @property
    def num_classes(self) -> int:
        return int(self.channels.shape[0] - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape[1:]


@dataclass(frozen=True, eq=False)
class SemanticLabelImage:
    """Per-pixel class ids in 0..num_classes"""
    classes: np.ndarray
    num_classes: int

    def __post_init__(self):
        array = _as_2d(self.classes, "classes")
        if array.dtype.kind not in "iub":
            raise InvalidValueError(f"unsupported dtype {array.dtype}", field="classes")
        if self.num_classes < 1:
            raise InvalidValueError("need at least one foreground class", field="num_classes")
        if array.min() < 0 or array.max() > self.num_classes:
            raise InvalidValueError(
                f"class ids must lie in [0, {self.num_classes}]", field="classes"
            )
        object.__setattr__(self, "classes", _freeze(array.astype(np.int32, copy=False)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.classes.shape

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SemanticLabelImage)
            and self.num_classes == other.num_classes
            and np.array_equal(self.classes, other.classes)
        )

    __hash__ = None


# ─────────────────────────────────────────────────────────────
# Masks, boxes and prompts
# ─────────────────────────────────────────────────────────────

class MaskRLE(BaseModel):
    """Uncompressed column-major run lengths, first run counts background"""
    model_config = ConfigDict(frozen=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    counts: list[int]

    @model_validator(mode="after")
    def _check_counts(self) -> "MaskRLE":
        if any(c < 0 for c in self.counts):
            raise InvalidValueError("run lengths must be nonnegative", field="counts")
        total = sum(self.counts)
        if total != self.width * self.height:
            raise FormatError(
                f"run lengths sum to {total}, expected {self.width * self.height}"
            )
        return self

    @property
    def area(self) -> int:
        return int(sum(self.counts[1::2]))


class BoundingBox(BaseModel):
    """Half-open pixel rectangle"""
    model_config = ConfigDict(frozen=True)

    x_min: int = Field(ge=0)
    y_min: int = Field(ge=0)
    x_max: int
    y_max: int

    @model_validator(mode="after")
    def _check_order(self) -> "BoundingBox":
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise InvalidValueError(
                f"empty box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )
        return self

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def slices(self) -> tuple[slice, slice]:
        return slice(self.y_min, self.y_max), slice(self.x_min, self.x_max)

    def contains(self, other: "BoundingBox") -> bool:
        return (
            self.x_min <= other.x_min and self.y_min <= other.y_min
            and self.x_max >= other.x_max and self.y_max >= other.y_max
        )

    def intersection(self, other: "BoundingBox") -> Optional["BoundingBox"]:
        x_min, y_min = max(self.x_min, other.x_min), max(self.y_min, other.y_min)
        x_max, y_max = min(self.x_max, other.x_max), min(self.y_max, other.y_max)
        if x_min >= x_max or y_min >= y_max:
            return None
        return BoundingBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.x_min, self.y_min, self.x_max, self.y_max


class PositivePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["positive_point"] = "positive_point"
    x: int = Field(ge=0)
    y: int = Field(ge=0)


class NegativePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["negative_point"] = "negative_point"
    x: int = Field(ge=0)
    y: int = Field(ge=0)


class BoxPrompt(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["box"] = "box"
    box: BoundingBox


class MaskPrompt(BaseModel):
    """Low-resolution mask prompt; `downscale` pixels of the image per mask pixel"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["mask"] = "mask"
    mask: np.ndarray
    downscale: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_mask(self) -> "MaskPrompt":
        if self.mask.ndim != 2 or not np.all(np.isfinite(self.mask)):
            raise InvalidValueError("mask prompt must be a finite 2-D raster", field="mask")
        return self

    @field_serializer("mask")
    def _serialize_mask(self, mask: np.ndarray):
        return {"shape": list(mask.shape), "area": int(np.count_nonzero(mask >= 0.5))}

    def upsampled(self, height: int, width: int) -> np.ndarray:
        """Nearest-neighbour upsample to image size, cropped or zero-padded"""
        full = np.repeat(np.repeat(self.mask, self.downscale, axis=0), self.downscale, axis=1)
        out = np.zeros((height, width), dtype=np.float32)
        h, w = min(height, full.shape[0]), min(width, full.shape[1])
        out[:h, :w] = full[:h, :w]
        return out


Prompt = Annotated[
    Union[PositivePoint, NegativePoint, BoxPrompt, MaskPrompt],
    Field(discriminator="kind"),
]


@dataclass(frozen=True, eq=False)
class Prediction:
    """Predictor answer: binary mask plus confidence"""
    mask: np.ndarray
    confidence: float

    def __post_init__(self):
        mask = _as_2d(self.mask, "mask").astype(bool, copy=False)
        if not np.isfinite(self.confidence):
            raise InvalidValueError("confidence must be finite", field="confidence")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "confidence", float(self.confidence))

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.mask))


# ─────────────────────────────────────────────────────────────
# Metrics
# ─────────────────────────────────────────────────────────────

class MatchRow(BaseModel):
    """Matching outcome at one IoU threshold"""
    threshold: float
    tp: int = Field(ge=0)
    fp: int = Field(ge=0)
    fn: int = Field(ge=0)
    pairs: list[tuple[int, int, float]] = []


class MatchTable(BaseModel):
    """Matching outcome across thresholds"""
    n_pred: int = Field(ge=0)
    n_gt: int = Field(ge=0)
    rows: list[MatchRow] = []

    @model_validator(mode="after")
    def _check_counts(self) -> "MatchTable":
        previous_tp = None
        for row in sorted(self.rows, key=lambda r: r.threshold):
            if row.tp + row.fp != self.n_pred or row.tp + row.fn != self.n_gt:
                raise InvalidValueError(f"inconsistent counts at t={row.threshold}", field="rows")
            if previous_tp is not None and row.tp > previous_tp:
                raise InvalidValueError("TP must be non-increasing in t", field="rows")
            previous_tp = row.tp
        return self

    @property
    def thresholds(self) -> list[float]:
        return [row.threshold for row in self.rows]


class DetectionPoint(BaseModel):
    threshold: float
    precision: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1)
    f1: float = Field(ge=0, le=1)
    tp: int = 0
    fp: int = 0
    fn: int = 0


class DetectionCurve(BaseModel):
    """Precision, recall and F1 per IoU threshold"""
    points: list[DetectionPoint] = []

    def at(self, threshold: float) -> DetectionPoint:
        for point in self.points:
            if abs(point.threshold - threshold) < 1e-9:
                return point
        raise KeyError(threshold)


class SemanticReport(BaseModel):
    """Per-class dice, gt class frequencies and their weighted sum"""
    num_classes: int
    dice: list[float]
    frequencies: list[float]
    weighted_dice: float = Field(ge=0, le=1)


class AggregateResult(BaseModel):
    """Dataset mean plus the per-image rows it came from"""
    mean: float
    per_image: list[tuple[str, float]]


# ─────────────────────────────────────────────────────────────
# Algorithm parameters
# ─────────────────────────────────────────────────────────────

class AisParams(BaseModel):
    """Seeded-watershed parameters"""
    model_config = ConfigDict(frozen=True)

    center_threshold: float = Field(default=0.5, gt=0, lt=1)
    boundary_threshold: float = Field(default=0.6, gt=0, lt=1)
    foreground_threshold: float = Field(default=0.5, gt=0, lt=1)
    smoothing_sigma: float = Field(default=1.6, ge=0)
    min_instance_size: float = Field(default=25, ge=0)


class AmgParams(BaseModel):
    """Grid-prompt mask generation parameters"""
    model_config = ConfigDict(frozen=True)

    points_per_side: int = Field(default=32, ge=1)
    confidence_min: float = Field(default=0.5, ge=0, le=1)
    dedup_iou: float = Field(default=0.7, gt=0, le=1)
    min_area: int = Field(default=25, ge=0)


class PredictorSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: PredictorName = PredictorName.ORACLE
    region_grow_threshold: float = Field(default=0.1, ge=0)


class InteractiveSettings(BaseModel):
    """Simulated interactive segmentation protocol"""
    model_config = ConfigDict(frozen=True)

    n_corrections: int = Field(default=7, ge=0)
    use_mask_prompt: bool = False
    sampling: SamplingMode = SamplingMode.INTERIOR
    start: StartSelection = StartSelection.BOTH
    seed: Optional[int] = None


class WsiParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    tile: int = Field(default=512, ge=1)
    halo: int = Field(default=64, ge=0)
    merge_iou: float = Field(default=0.5, gt=0, le=1)
    tiled_output: Optional[str] = None


# ─────────────────────────────────────────────────────────────
# Dataset manifest
# ─────────────────────────────────────────────────────────────

class ManifestSample(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sample_id: str = Field(min_length=1)
    gt_labels_path: str
    prediction_stack_path: Optional[str] = None
    semantic_gt_path: Optional[str] = None
    semantic_prob_path: Optional[str] = None
    guidance_path: Optional[str] = None
    split: Optional[Split] = None
    dataset: Optional[str] = None


class DatasetManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "dataset"
    samples: list[ManifestSample] = []

    @model_validator(mode="after")
    def _unique_ids(self) -> "DatasetManifest":
        seen: set[str] = set()
        for sample in self.samples:
            if sample.sample_id in seen:
                raise InvalidValueError(f"duplicate sample_id '{sample.sample_id}'", field="samples")
            seen.add(sample.sample_id)
        return self

    def dataset_of(self, sample: ManifestSample) -> str:
        return sample.dataset or self.name

    def sorted_samples(self) -> list[ManifestSample]:
        return sorted(self.samples, key=lambda s: s.sample_id)


# ─────────────────────────────────────────────────────────────
# Interactive segmentation
# ─────────────────────────────────────────────────────────────

class TraceStep(BaseModel):
    """One predict call of an interactive run"""
    iteration: int = Field(ge=0)
    prompts: list[Prompt]
    mask_rle: MaskRLE
    score: float = Field(ge=0, le=1)


class InteractiveTrace(BaseModel):
    object_id: int
    start: StartKind
    n_corrections: int = 7
    steps: list[TraceStep] = []
    early_stop: bool = False
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_length(self) -> "InteractiveTrace":
        if len(self.steps) > self.n_corrections + 1:
            raise InvalidValueError("more steps than iterations", field="steps")
        return self

    def scores(self) -> list[float]:
        """Score per iteration 0..n_corrections, last score carried forward"""
        values = [step.score for step in self.steps]
        if not values:
            return []
        return values + [values[-1]] * (self.n_corrections + 1 - len(values))

    @property
    def initial_score(self) -> Optional[float]:
        return self.steps[0].score if self.steps else None

    @property
    def final_score(self) -> Optional[float]:
        return self.steps[-1].score if self.steps else None


# ─────────────────────────────────────────────────────────────
# Grid search
# ─────────────────────────────────────────────────────────────

class GridSearchRow(BaseModel):
    center_threshold: float
    boundary_threshold: float
    precision: float
    recall: float
    f1: float
    n_samples: int
    n_instances: int = 0
    is_best: bool = False


# ─────────────────────────────────────────────────────────────
# Whole-slide tiling
# ─────────────────────────────────────────────────────────────

class Tile(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    row: int
    col: int
    inner: BoundingBox
    outer: BoundingBox


class TileGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    tile_shape: tuple[int, int] = (512, 512)
    halo: int = Field(default=64, ge=0)
    n_rows: int
    n_cols: int
    tiles: list[Tile]

    def neighbours(self) -> list[tuple[int, int]]:
        """Tile index pairs whose outer rects overlap, in index order"""
        pairs = []
        for tile in self.tiles:
            for d_row, d_col in ((0, 1), (1, -1), (1, 0), (1, 1)):
                row, col = tile.row + d_row, tile.col + d_col
                if 0 <= row < self.n_rows and 0 <= col < self.n_cols:
                    pairs.append((tile.index, row * self.n_cols + col))
        return sorted(pairs)


class StageResources(BaseModel):
    stage: ResourceStage
    wall_time_s: float = 0.0
    tiles_processed: int = 0
    peak_tile_bytes: int = 0
    parallelism: int = 1


class TileFailure(BaseModel):
    tile_index: int
    message: str


class ResourceReport(BaseModel):
    stages: list[StageResources] = []
    n_tiles: int = 0
    n_instances: int = 0
    flagged_instances: list[int] = []
    failures: list[TileFailure] = []

    def stage(self, name: ResourceStage) -> StageResources:
        for entry in self.stages:
            if entry.stage == name:
                return entry
        entry = StageResources(stage=name)
        self.stages.append(entry)
        return entry


# ─────────────────────────────────────────────────────────────
# Run configuration
# ─────────────────────────────────────────────────────────────

class RunPaths(BaseModel):
    manifest: Optional[str] = None
    stack: Optional[str] = None
    gt: Optional[str] = None
    out: Optional[str] = None
    pred_dir: Optional[str] = None
    guidance: Optional[str] = None
    proposals: Optional[str] = None
    config: Optional[str] = None


class RunConfig(BaseModel):
    """Everything a command needs; embedded in its reports"""
    model_config = ConfigDict(extra="forbid")

    command: str
    ais: AisParams = AisParams()
    amg: AmgParams = AmgParams()
    predictor: PredictorSettings = PredictorSettings()
    interactive: InteractiveSettings = InteractiveSettings()
    wsi: WsiParams = WsiParams()
    thresholds: list[float] = Field(
        default_factory=lambda: [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]
    )
    iou_threshold: float = Field(default=0.5, ge=0.5, le=1)
    center_grid: list[float] = Field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    boundary_grid: list[float] = Field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    num_classes: Optional[int] = Field(default=None, ge=1)
    curve: bool = False
    jobs: int = Field(default=1, ge=1)
    seed: Optional[int] = None
    report_format: ReportFormat = ReportFormat.CSV
    label_format: LabelFormat = LabelFormat.LBL1
    paths: RunPaths = RunPaths()

    @model_validator(mode="after")
    def _check_thresholds(self) -> "RunConfig":
        for t in self.thresholds:
            if not 0.5 <= t <= 1.0:
                raise ValueError(f"IoU threshold {t} outside [0.5, 1]")
        for t in self.center_grid + self.boundary_grid:
            if not 0.0 < t < 1.0:
                raise ValueError(f"grid value {t} outside (0, 1)")
        return self


class SampleTraces(BaseModel):
    """All interactive traces for one image"""
    sample_id: str
    dataset: str
    traces: list[InteractiveTrace] = []


class InteractiveSummary(BaseModel):
    """Per-dataset interactive scores; objects averaged per image, then images"""
    dataset: str
    n_images: int = 0
    n_objects: int = 0
    point: Optional[float] = None
    box: Optional[float] = None
    final_point: Optional[float] = None
    final_box: Optional[float] = None
    point_curve: list[float] = []
    box_curve: list[float] = []

    def to_row(self) -> dict:
        """Flat report row: dataset, n_objects, point, box, I_P, I_B, iter_k, box_iter_k"""
        row: dict[str, Any] = {
            "dataset": self.dataset,
            "n_objects": self.n_objects,
            "point": self.point,
            "box": self.box,
            "I_P": self.final_point,
            "I_B": self.final_box,
        }
        for k, value in enumerate(self.point_curve):
            row[f"iter_{k}"] = value
        for k, value in enumerate(self.box_curve):
            row[f"box_iter_{k}"] = value
        return row


class InteractiveReport(BaseModel):
    summaries: list[InteractiveSummary] = []
    samples: list[SampleTraces] = []
    failures: list[str] = []


# ─────────────────────────────────────────────────────────────
# Command reports
# ─────────────────────────────────────────────────────────────

class CommandReport(BaseModel):
    """
    What a command stage hands to the output stage

    `tables` maps a report name to its rows (one CSV per name); `details` holds
    JSON-only payloads such as traces or the resource report.
    """
    command: str
    tables: dict[str, list[dict[str, Any]]] = {}
    details: dict[str, Any] = {}
    outputs: list[str] = []
    failures: list[str] = []
    console_table: Optional[str] = None
    report_dir: Optional[str] = None


class OutputResult(BaseModel):
    report_files: list[str] = []
    config_file: Optional[str] = None
    n_failures: int = 0
