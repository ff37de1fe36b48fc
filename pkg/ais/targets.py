"""Synthetic decoder targets derived from ground-truth instances"""

import numpy as np
from scipy import ndimage

from core.masks import FOUR_CONNECTIVITY, relabel_sequential
from core.models import LabelImage, PredictionStack


def generate_targets(gt: LabelImage) -> PredictionStack:
    """
    Build the foreground / center-distance / boundary-proximity stack for a labeling

    Per object, center_distance is the euclidean distance to the object pixel nearest
    its centroid, normalised to 1 at the farthest pixel; boundary_proximity is
    1 - (distance to the object's boundary / its maximum), so 1 on the boundary and 0
    at the medial interior. Boundary pixels are object pixels with a 4-neighbour outside
    the object; the image border counts as outside. Background is 1 in both distance
    channels.
    """
    height, width = gt.shape
    foreground = gt.foreground().astype(np.float32)
    center = np.ones((height, width), dtype=np.float64)
    boundary = np.ones((height, width), dtype=np.float64)

    padded = np.pad(relabel_sequential(gt.labels), 1)
    for index, window in enumerate(ndimage.find_objects(padded), start=1):
        if window is None:
            continue
        rows = slice(window[0].start - 1, window[0].stop + 1)
        cols = slice(window[1].start - 1, window[1].stop + 1)
        obj = padded[rows, cols] == index

        coords = np.argwhere(obj)
        image_y = coords[:, 0] + rows.start - 1
        image_x = coords[:, 1] + cols.start - 1

        edge = obj & ~ndimage.binary_erosion(obj, structure=FOUR_CONNECTIVITY, border_value=0)
        to_edge = ndimage.distance_transform_edt(~edge)[obj]
        peak = to_edge.max()
        boundary[image_y, image_x] = 1.0 - to_edge / peak if peak > 0 else 1.0

        centroid = coords.mean(axis=0)
        anchor = coords[np.argmin(((coords - centroid) ** 2).sum(axis=1))]
        to_center = np.sqrt(((coords - anchor) ** 2).sum(axis=1))
        far = to_center.max()
        center[image_y, image_x] = to_center / far if far > 0 else 0.0

    return PredictionStack.from_planes(
        foreground,
        np.clip(center, 0.0, 1.0),
        np.clip(boundary, 0.0, 1.0),
    )
