"""Complex vector/matrix helpers, elementary norms, Gaussian-integer rounding."""

from __future__ import annotations

import numpy as np


def as_complex_vector(v) -> np.ndarray:
    """Coerce to a finite 1-d complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty 1-d vector")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("vector has non-finite entries")
    return arr


def as_complex_matrix(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty 2-d matrix")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("matrix has non-finite entries")
    return arr


def norm(v, p) -> float:
    """Vector p-norm for p in {1, 2, inf}."""
    arr = as_complex_vector(v)
    mags = np.abs(arr)
    if p == 1:
        return float(mags.sum())
    if p == 2:
        return float(np.sqrt((mags * mags).sum()))
    if p in (np.inf, float("inf"), "inf"):
        return float(mags.max())
    raise ValueError(f"unsupported norm order {p!r}")


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (sign-symmetric)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def nearest_gaussian_lattice(x) -> tuple[np.ndarray, float]:
    """Nearest point of (Z+iZ)^n under componentwise rounding, and its distance.

    Ties at half-integers round away from zero, independently in the real and
    imaginary parts.  The distance always satisfies d <= sqrt(n/2).
    """
    arr = as_complex_vector(x)
    w = round_half_away(arr.real) + 1j * round_half_away(arr.imag)
    d = float(np.linalg.norm(arr - w))
    return w, d


def lattice_distance(x: np.ndarray) -> float:
    """Distance of x to the Gaussian-integer lattice (no witness)."""
    dr = x.real - round_half_away(x.real)
    di = x.imag - round_half_away(x.imag)
    return float(np.sqrt((dr * dr + di * di).sum()))
