"""Automatic mask generation and promptable predictors"""

from .generator import AmgResult, PointFailure, amg_generate, point_grid
from .predictors import (
    PREDICTORS, BasePredictor, FileMaskPredictor, OraclePredictor, RegionGrowPredictor,
    best_instance_for_box, build_predictor, resolve_predictor_name,
)

__all__ = [
    "AmgResult",
    "PointFailure",
    "amg_generate",
    "point_grid",
    "PREDICTORS",
    "BasePredictor",
    "FileMaskPredictor",
    "OraclePredictor",
    "RegionGrowPredictor",
    "best_instance_for_box",
    "build_predictor",
    "resolve_predictor_name",
]
