"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ValidationError

__all__ = ["worker_count", "parallel_map"]


def worker_count() -> int:
    """Worker cap from RCD_THREADS, defaulting to the available cores."""
    raw = os.environ.get("RCD_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValidationError(f"RCD_THREADS must be an integer, got '{raw}'") from None
        if value < 1:
            raise ValidationError(f"RCD_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Map ``fn`` over ``items`` preserving order, using worker processes
    when more than one worker is allowed."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
