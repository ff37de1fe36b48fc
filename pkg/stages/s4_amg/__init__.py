"""Stage 4: Automatic mask generation"""

from .mask_generator import MaskGenerator

__all__ = ["MaskGenerator"]
