"""Thread-pool map capped by ``HYPBC_THREADS`` (default 1)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def threads() -> int:
    try:
        return max(1, int(os.environ.get("HYPBC_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """Ordered map; results do not depend on the worker count."""
    n = threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
