# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Chunked thread-pool evaluation over point arrays."""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_threads = 1


def set_threads(count: int) -> None:
    """Cap the number of worker threads used by point-set evaluations."""
    global _threads
    _threads = max(1, int(count))


def get_threads() -> int:
    return _threads


def map_chunks(
    func: Callable[[np.ndarray], np.ndarray], points: np.ndarray, chunk: int = 2048
) -> np.ndarray:
    """Apply ``func`` to consecutive chunks of a 1-D array and concatenate in order.

    The result does not depend on the thread count.
    """
    points = np.asarray(points)
    if points.size <= chunk or _threads == 1:
        parts = [func(points[i : i + chunk]) for i in range(0, max(points.size, 1), chunk)]
    else:
        pieces = [points[i : i + chunk] for i in range(0, points.size, chunk)]
        with ThreadPoolExecutor(max_workers=_threads) as pool:
            parts = list(pool.map(func, pieces))
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)
