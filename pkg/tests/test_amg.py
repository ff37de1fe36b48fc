from typing import Optional, Sequence

import numpy as np
import pytest

from amg import (
    FileMaskPredictor, OraclePredictor, RegionGrowPredictor, amg_generate, best_instance_for_box,
    build_predictor, point_grid, resolve_predictor_name,
)
from amg.predictors import BasePredictor
from core.exceptions import ConfigError, PredictorError
from core.models import (
    AmgParams, BoundingBox, BoxPrompt, LabelImage, MaskPrompt, NegativePoint, PositivePoint, Prediction,
    PredictorSettings,
)
from metrics.instance import mean_segmentation_accuracy
from tests.factories import square_labels


def test_point_grid_single_cell():
    assert [(p.x, p.y) for p in point_grid(1, 100, 100)] == [(50, 50)]


def test_point_grid_rows_are_outer():
    assert [(p.x, p.y) for p in point_grid(2, 100, 100)] == [(25, 25), (75, 25), (25, 75), (75, 75)]


def test_point_grid_default_density():
    points = point_grid(32, 512, 512)
    assert len(points) == 1024
    assert all(0 <= p.x < 512 and 0 <= p.y < 512 for p in points)


def test_oracle_amg_recovers_ground_truth():
    gt = square_labels(128, 128, [(4, 4, 44, 44), (60, 8, 120, 40), (10, 70, 50, 120), (70, 70, 110, 110)])
    result = amg_generate(OraclePredictor(gt), params=AmgParams(points_per_side=16))
    assert result.n_points == 256
    assert result.n_kept == 4
    assert mean_segmentation_accuracy(result.labels, gt) == 1.0


def test_oracle_amg_on_empty_image():
    result = amg_generate(OraclePredictor(LabelImage.empty(32, 32)), params=AmgParams(points_per_side=4))
    assert result.labels.num_instances == 0
    assert result.n_candidates == 0


def test_duplicates_collapse():
    gt = square_labels(20, 20, [(2, 2, 14, 14)])
    grid = [PositivePoint(x=5, y=5), PositivePoint(x=6, y=5)]
    result = amg_generate(OraclePredictor(gt), grid=grid)
    assert result.n_candidates == 2
    assert result.n_kept == 1
    assert result.labels.num_instances == 1


def test_single_point_grid_gives_at_most_one_instance():
    gt = square_labels(40, 40, [(0, 0, 20, 20), (20, 20, 40, 40)])
    result = amg_generate(OraclePredictor(gt), params=AmgParams(points_per_side=1))
    assert result.labels.num_instances <= 1


def test_low_confidence_and_small_masks_are_filtered():
    labels = square_labels(30, 30, [(0, 0, 10, 10), (20, 20, 23, 23)])
    confidence = np.ones((30, 30))
    confidence[:10, :10] = 0.2
    predictor = FileMaskPredictor(labels, confidence)
    grid = [PositivePoint(x=5, y=5), PositivePoint(x=21, y=21)]
    result = amg_generate(predictor, grid=grid, params=AmgParams(min_area=25))
    assert result.n_candidates == 0
    assert result.labels.num_instances == 0


class _FlakyPredictor(BasePredictor):
    """Fails on the left half of the image"""

    def __init__(self, labels: LabelImage):
        super().__init__(labels.height, labels.width)
        self._oracle = OraclePredictor(labels)

    @property
    def name(self) -> str:
        return "flaky"

    def predict(self, prompts: Sequence, prior_mask: Optional[np.ndarray] = None) -> Prediction:
        if prompts[0].x < self.shape[1] // 2:
            raise PredictorError("left half unavailable", self.name)
        return self._oracle.predict(prompts)


def test_point_failures_are_collected():
    gt = square_labels(40, 40, [(22, 2, 38, 38)])
    result = amg_generate(_FlakyPredictor(gt), params=AmgParams(points_per_side=4))
    assert result.n_failures == 8
    assert all(f.x < 20 for f in result.failures)
    assert result.labels.num_instances == 1


def test_oracle_prompts():
    gt = square_labels(12, 12, [(1, 1, 5, 7), (6, 3, 10, 5)])
    oracle = OraclePredictor(gt)
    assert oracle.predict([PositivePoint(x=2, y=2)]).area == 24
    assert oracle.predict([PositivePoint(x=0, y=0)]).confidence == 0.0
    box = BoundingBox(x_min=6, y_min=2, x_max=10, y_max=6)
    prediction = oracle.predict([BoxPrompt(box=box)])
    assert np.array_equal(prediction.mask, gt.labels == 2)
    assert best_instance_for_box(gt.labels, BoundingBox(x_min=0, y_min=9, x_max=3, y_max=12)) == 0


def test_prompts_outside_image_are_rejected():
    oracle = OraclePredictor(LabelImage.empty(8, 8))
    with pytest.raises(PredictorError):
        oracle.predict([PositivePoint(x=8, y=0)])
    with pytest.raises(PredictorError):
        oracle.predict([BoxPrompt(box=BoundingBox(x_min=0, y_min=0, x_max=9, y_max=4))])


def test_region_grow_follows_guidance(two_lobe):
    guidance, _ = two_lobe
    predictor = RegionGrowPredictor(guidance, threshold=0.1)
    lobe_a = predictor.predict([PositivePoint(x=2, y=2)])
    assert lobe_a.area == 24
    assert lobe_a.confidence == 1.0

    both = predictor.predict([PositivePoint(x=2, y=2), PositivePoint(x=6, y=3)])
    assert both.area == 32

    erased = predictor.predict([PositivePoint(x=2, y=2), PositivePoint(x=6, y=3), NegativePoint(x=7, y=4)])
    assert erased.area == 24


def test_region_grow_box_uses_center_and_clips(two_lobe):
    guidance, _ = two_lobe
    predictor = RegionGrowPredictor(guidance, threshold=0.1)
    box = BoundingBox(x_min=1, y_min=1, x_max=9, y_max=7)
    prediction = predictor.predict([BoxPrompt(box=box)])
    assert prediction.area == 8
    assert prediction.mask[3:5, 5:9].all()


def test_region_grow_takes_downscaled_mask_prompt_as_prior(two_lobe):
    guidance, _ = two_lobe
    predictor = RegionGrowPredictor(guidance, threshold=0.1)
    low_res = np.zeros((4, 6), dtype=np.float32)
    low_res[:, :3] = 1.0
    prior = MaskPrompt(mask=low_res, downscale=2)

    prediction = predictor.predict([prior])
    assert prediction.area == 48
    assert prediction.mask[:, :6].all()

    # lobe A lies inside the prior and is erased by a negative click
    assert predictor.predict([prior, NegativePoint(x=2, y=2)]).area == 24


def test_mask_prompt_must_cover_image(two_lobe):
    guidance, _ = two_lobe
    predictor = RegionGrowPredictor(guidance, threshold=0.1)
    with pytest.raises(PredictorError):
        predictor.predict([MaskPrompt(mask=np.ones((3, 6), dtype=np.float32), downscale=2)])


def test_predictor_registry():
    assert resolve_predictor_name(" Oracle ").value == "oracle"
    with pytest.raises(ConfigError) as info:
        resolve_predictor_name("sam")
    assert "file, oracle, regiongrow" in str(info.value)


def test_build_predictor_needs_its_inputs(two_lobe):
    guidance, gt = two_lobe
    assert build_predictor(PredictorSettings(name="oracle"), gt=gt).name == "oracle"
    assert build_predictor(PredictorSettings(name="regiongrow"), guidance=guidance).name == "regiongrow"
    with pytest.raises(ConfigError):
        build_predictor(PredictorSettings(name="regiongrow"), gt=gt)
    with pytest.raises(ConfigError):
        build_predictor(PredictorSettings(name="file"))
