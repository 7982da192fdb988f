"""Small shared helpers: bounded parallel mapping and atomic file writes."""

from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map", "atomic_write_bytes"]


def thread_count() -> int:
    """Worker cap from RVW_THREADS; 0 or unset means auto."""
    raw = os.environ.get("RVW_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def parallel_map(fn, items):
    """Map preserving input order; falls back to a plain loop for one worker."""
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def atomic_write_bytes(path, data: bytes) -> None:
    """Write to a sibling temp file and rename, so failures leave no partial output."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rvw-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
