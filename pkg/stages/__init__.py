"""Command stages"""

from .s0_targets import TargetGenerator
from .s1_segment import AutoSegmenter
from .s2_grid_search import GridSearcher
from .s3_evaluate import Evaluator
from .s4_amg import MaskGenerator
from .s5_interactive import InteractiveEvaluator
from .s6_wsi import SlideSegmenter
from .s7_semantic import SemanticEvaluator
from .s8_output import OutputManager

__all__ = [
    "TargetGenerator",
    "AutoSegmenter",
    "GridSearcher",
    "Evaluator",
    "MaskGenerator",
    "InteractiveEvaluator",
    "SlideSegmenter",
    "SemanticEvaluator",
    "OutputManager",
]
