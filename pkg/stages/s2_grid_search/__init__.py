"""Stage 2: Watershed threshold grid search"""

from .grid_searcher import GridSearcher

__all__ = ["GridSearcher"]
