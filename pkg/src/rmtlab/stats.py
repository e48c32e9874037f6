"""Binomial intervals, log-log slope fits, and the parallel trial runner."""

from __future__ import annotations

import concurrent.futures
import math
import os
from typing import Callable, Sequence

# Normal quantiles: two-sided 99% and one-sided 99%.
Z_99_TWO_SIDED = 2.5758293035489004
Z_99_ONE_SIDED = 2.3263478740408408


def wilson_interval(successes: int, trials: int, z: float = Z_99_TWO_SIDED) -> tuple[float, float]:
    """Wilson score interval; well-behaved at zero successes."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def wilson_lower(successes: int, trials: int, z: float = Z_99_ONE_SIDED) -> float:
    return wilson_interval(successes, trials, z)[0]


def fit_loglog_slope(
    xs: Sequence[float],
    probs: Sequence[float],
    counts: Sequence[int],
    min_count: int = 20,
    window: tuple[float, float] | None = None,
) -> float | None:
    """Least-squares slope of log(prob) vs log(x) over well-populated points.

    Points with counts < min_count are dropped (they sit in the noise floor);
    an optional window restricts x.  Returns None if fewer than two points
    survive.
    """
    pts = []
    for x, p, c in zip(xs, probs, counts):
        if c < min_count or p <= 0 or x <= 0:
            continue
        if window is not None and not (window[0] <= x <= window[1]):
            continue
        pts.append((math.log(x), math.log(p)))
    if len(pts) < 2:
        return None
    n = len(pts)
    sx = sum(p[0] for p in pts)
    sy = sum(p[1] for p in pts)
    sxx = sum(p[0] * p[0] for p in pts)
    sxy = sum(p[0] * p[1] for p in pts)
    denom = n * sxx - sx * sx
    if denom == 0:
        return None
    return (n * sxy - sx * sy) / denom


def default_threads() -> int:
    env = os.environ.get("RMT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def run_trials(fn: Callable[[int], object], n_trials: int, threads: int = 1) -> list:
    """Evaluate fn(stream_id) for stream_id in 0..n_trials-1, in order.

    Results are returned sorted by stream_id regardless of schedule, so any
    thread count produces identical output for deterministic fn.
    """
    ids = range(n_trials)
    if threads <= 1:
        return [fn(i) for i in ids]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, ids))
