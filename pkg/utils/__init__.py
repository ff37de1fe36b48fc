"""Utility functions"""

from .parallel import map_ordered

__all__ = ["map_ordered"]
