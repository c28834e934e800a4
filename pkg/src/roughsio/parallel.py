"""Deterministic parallel map capped by ``ROUGHSIO_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ROUGHSIO_THREADS", "1")))
    except ValueError:
        return 1


def pmap(func, items):
    """``[func(x) for x in items]``; results keep input order."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(func, items))
