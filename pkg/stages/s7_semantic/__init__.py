"""Stage 7: Semantic segmentation evaluation"""

from .semantic_evaluator import SemanticEvaluator

__all__ = ["SemanticEvaluator"]
