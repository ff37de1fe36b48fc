"""File formats and dataset manifests"""

from .receiver import (
    load_label_image, save_label_image, load_semantic_labels,
    label_path, find_label_file, LabelReceiver,
)
from .stacks import (
    load_prediction_stack, save_prediction_stack, load_semantic_probs,
    save_semantic_probs, load_float_raster, save_float_raster, load_guidance,
)
from .manifest import load_manifest, save_manifest

__all__ = [
    "LabelReceiver",
    "load_label_image",
    "save_label_image",
    "load_semantic_labels",
    "label_path",
    "find_label_file",
    "load_prediction_stack",
    "save_prediction_stack",
    "load_semantic_probs",
    "save_semantic_probs",
    "load_float_raster",
    "save_float_raster",
    "load_guidance",
    "load_manifest",
    "save_manifest",
]
