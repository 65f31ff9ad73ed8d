# src/ssvlab/utils/parallel.py

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from ssvlab.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def thread_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map fn over items on a thread pool capped by SSVLAB_THREADS.

    Results come back in input order; the first worker exception propagates.
    """
    items = list(items)
    workers = max(1, min(threads or settings.THREADS, len(items) or 1))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} tasks over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
