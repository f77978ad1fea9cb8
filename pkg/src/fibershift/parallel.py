"""Deterministic parallel map over fiber indices.

Each fiber's work is a pure function of its index. Results land in a
preallocated list slot by index and every aggregation downstream runs
sequentially in fiber order, so outputs are identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


def fiber_map(fn: Callable[[int], T], n: int, threads: int = 1) -> list[T]:
    if threads <= 1 or n <= 1:
        return [fn(m) for m in range(n)]
    out: list = [None] * n
    with ThreadPoolExecutor(max_workers=threads) as ex:
        for m, res in enumerate(ex.map(fn, range(n))):
            out[m] = res
    return out
