"""Stage 8: Report output"""

from .output_manager import OutputManager

__all__ = ["OutputManager"]
