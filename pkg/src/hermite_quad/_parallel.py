"""Optional thread parallelism with deterministic result order."""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "HERMITE_QUAD_THREADS"


def max_threads():
    """Thread cap from HERMITE_QUAD_THREADS; defaults to 1 (serial)."""
    raw = os.environ.get(ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """``list(map(fn, items))``, threaded when allowed; results keep input order."""
    items = list(items)
    workers = min(max_threads(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
