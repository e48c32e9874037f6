"""Exact max-coverage disc of fixed radius over a weighted finite point set.

The optimum closed ball either is centered at a point or has two points on
its boundary, so it suffices to scan the points plus, for every pair within
distance 2r, the two centers equidistant-r from both (which degenerate to the
midpoint when the pair is exactly 2r apart).
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import numpy as np

# Absolute slack for boundary membership; desk-scale inputs keep moduli O(1e3),
# so 1e-9 dominates accumulated rounding without absorbing distinct atoms.
_TOL = 1e-9


def _close_pairs(points: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices of pairs at distance <= 2r, via a cell grid of size 2r."""
    k = points.size
    if k <= 2000:
        diff = np.abs(points[None, :] - points[:, None])
        iu, ju = np.triu_indices(k, 1)
        keep = diff[iu, ju] <= 2 * r + _TOL
        return iu[keep], ju[keep]
    cell = 2 * r
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    cx = np.floor(points.real / cell).astype(np.int64)
    cy = np.floor(points.imag / cell).astype(np.int64)
    for i in range(k):
        buckets[(cx[i], cy[i])].append(i)
    li, lj = [], []
    for (bx, by), members in buckets.items():
        cand: list[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cand.extend(buckets.get((bx + dx, by + dy), ()))
        cand = np.asarray(sorted(cand))
        for i in members:
            close = cand[(cand > i) & (np.abs(points[cand] - points[i]) <= 2 * r + _TOL)]
            li.extend([i] * close.size)
            lj.extend(close.tolist())
    return np.asarray(li, dtype=np.intp), np.asarray(lj, dtype=np.intp)


def _candidate_centers(points: np.ndarray, r: float) -> np.ndarray:
    i, j = _close_pairs(points, r)
    pi, pj = points[i], points[j]
    d = np.abs(pj - pi)
    mid = (pi + pj) / 2
    h = np.sqrt(np.maximum(r * r - (d / 2) ** 2, 0.0))
    perp = np.where(d > 0, 1j * (pj - pi) / np.where(d > 0, d, 1.0), 0.0)
    return np.concatenate([points, mid + h * perp, mid - h * perp])


def ball_mass_at(points: np.ndarray, probs: list[Fraction], center: complex, r: float) -> Fraction:
    inside = np.abs(points - center) <= r + _TOL
    return sum((probs[j] for j in np.nonzero(inside)[0]), Fraction(0))


def max_ball_mass(
    points: np.ndarray,
    probs,
    r: float,
) -> tuple[Fraction, complex, int]:
    """Largest probability mass inside any closed ball of radius r.

    Returns (exact mass, best center, number of centers tried).  probs may be
    Fractions (kept exact in the final mass) or floats (converted).
    """
    points = np.asarray(points, dtype=np.complex128)
    fprobs = np.array([float(p) for p in probs])
    exact = [p if isinstance(p, Fraction) else Fraction(p) for p in probs]
    centers = _candidate_centers(points, r)

    masses = np.empty(centers.size)
    chunk = max(1, int(4e6 // max(points.size, 1)))
    for lo in range(0, centers.size, chunk):
        block = centers[lo : lo + chunk]
        inside = np.abs(block[:, None] - points[None, :]) <= r + _TOL
        masses[lo : lo + chunk] = inside @ fprobs
    best_idx = int(np.argmax(masses))
    best_float = masses[best_idx]

    # re-derive the winning mass with exact rational bookkeeping, rechecking
    # every center that floats could not separate from the best
    tied = np.nonzero(masses >= best_float - 1e-9)[0]
    best_frac = Fraction(0)
    best_center = complex(centers[best_idx])
    for idx in tied[:256]:
        c = complex(centers[idx])
        m = ball_mass_at(points, exact, c, r)
        if m > best_frac:
            best_frac = m
            best_center = c
    return best_frac, best_center, int(centers.size)
