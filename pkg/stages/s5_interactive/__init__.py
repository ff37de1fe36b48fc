"""Stage 5: Simulated interactive segmentation"""

from .interactive_evaluator import InteractiveEvaluator

__all__ = ["InteractiveEvaluator"]
