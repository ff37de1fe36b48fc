"""Stage 0: Synthetic target generation"""

from .target_generator import TargetGenerator

__all__ = ["TargetGenerator"]
