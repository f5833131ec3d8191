from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from linkmoe.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def chunk_bounds(total: int, chunk_size: int) -> List[tuple[int, int]]:
    return [(start, min(start + chunk_size, total)) for start in range(0, total, max(1, chunk_size))]


def ordered_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    threads: Optional[int] = None,
) -> List[R]:
    """Apply ``fn`` to every item, possibly in parallel; results keep input order."""
    workers = max(1, int(threads or settings.thread_count))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        # Executor.map yields in submission order
        return list(pool.map(fn, items))
