"""Ordered thread-pool mapping"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[T], R], items: Iterable[T], jobs: Optional[int] = 1) -> List[R]:
    """
    Apply `fn` to every item, results in input order

    Args:
        fn: Work function; must not share mutable state across calls
        items: Work items
        jobs: Worker threads; 1 (or None) runs serially in the calling thread

    Returns:
        List of results aligned with `items`
    """
    items = list(items)
    if not jobs or jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
