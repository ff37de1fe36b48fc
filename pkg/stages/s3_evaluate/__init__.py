"""Stage 3: Instance segmentation evaluation"""

from .evaluator import Evaluator

__all__ = ["Evaluator"]
