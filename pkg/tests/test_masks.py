import numpy as np
import pytest

from core.exceptions import EmptyObjectError, FormatError, InvalidValueError
from core.masks import (
    bounding_box_of, label_components, label_image_to_masks, mask_to_rle, paint_masks,
    relabel_sequential, rle_to_mask,
)
from core.models import BoundingBox, LabelImage, MaskRLE


def test_rle_all_background():
    assert mask_to_rle(np.zeros((3, 3), dtype=bool)).counts == [9]


def test_rle_all_foreground_has_leading_zero_run():
    assert mask_to_rle(np.ones((3, 3), dtype=bool)).counts == [0, 9]


def test_rle_is_column_major():
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, 1] = True  # x=1, y=0
    rle = mask_to_rle(mask)
    assert (rle.width, rle.height) == (2, 2)
    assert rle.counts == [2, 1, 1]


def test_rle_decode_trivial_cases():
    assert not rle_to_mask(MaskRLE(width=3, height=3, counts=[9])).any()
    assert rle_to_mask(MaskRLE(width=3, height=3, counts=[0, 9])).all()


def test_rle_round_trip_random_masks(rng):
    for _ in range(200):
        h, w = rng.integers(1, 12, size=2)
        mask = rng.random((h, w)) < 0.4
        assert np.array_equal(rle_to_mask(mask_to_rle(mask)), mask)


def test_rle_counts_must_cover_image():
    with pytest.raises(FormatError):
        MaskRLE(width=3, height=3, counts=[4, 4])


def test_label_image_to_masks_keeps_ids():
    labels = np.zeros((5, 5), dtype=np.uint32)
    labels[0, 0] = 3
    labels[4, 4] = 7
    masks = label_image_to_masks(LabelImage(labels))
    assert [instance_id for instance_id, _ in masks] == [3, 7]
    assert paint_masks(masks, 5, 5) == LabelImage(labels)


def test_label_image_to_masks_empty():
    assert label_image_to_masks(LabelImage.empty(4, 4)) == []


def test_bounding_box_single_pixel():
    mask = np.zeros((10, 10), dtype=bool)
    mask[7, 5] = True
    assert bounding_box_of(mask) == BoundingBox(x_min=5, y_min=7, x_max=6, y_max=8)


def test_bounding_box_full_and_random(rng):
    assert bounding_box_of(np.ones((10, 10))).as_tuple() == (0, 0, 10, 10)
    mask = rng.random((30, 40)) < 0.02
    mask[3, 4] = True
    ys, xs = np.nonzero(mask)
    assert bounding_box_of(mask).as_tuple() == (xs.min(), ys.min(), xs.max() + 1, ys.max() + 1)


def test_bounding_box_of_empty_mask():
    with pytest.raises(EmptyObjectError):
        bounding_box_of(np.zeros((4, 4), dtype=bool))


def test_empty_box_rejected():
    with pytest.raises(InvalidValueError):
        BoundingBox(x_min=2, y_min=0, x_max=2, y_max=4)


def test_label_components_are_four_connected():
    mask = np.array([
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
    ], dtype=bool)
    labels, count = label_components(mask)
    assert count == 3
    assert labels[0, 0] == 1 and labels[1, 1] == 2 and labels[2, 2] == 3


def test_relabel_sequential_uses_first_pixel_order():
    labels = np.array([[0, 7], [3, 7]], dtype=np.uint32)
    assert relabel_sequential(labels).tolist() == [[0, 1], [2, 1]]


def test_label_image_rejects_negative_and_fractional_ids():
    with pytest.raises(InvalidValueError):
        LabelImage(np.array([[-1, 0]]))
    with pytest.raises(InvalidValueError):
        LabelImage(np.array([[0.5, 0.0]]))
