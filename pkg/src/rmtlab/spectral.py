"""Spectral computations, restricted infinity-to-2 norms, row selection,
projections, and independent row permutations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_complex_matrix
from .laws import EntryLaw, sample
from .rng import RandomStream

SIGN_NORM_MAX_COLS = 20


class SpectralBackendError(RuntimeError):
    """Eigen/SVD backend failed or its residual check did not pass."""


class DimensionTooLarge(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class EnsembleSample:
    n: int
    shift: np.ndarray
    noise: np.ndarray
    composite: np.ndarray


@dataclass(frozen=True)
class SpectralSummary:
    singular_values: np.ndarray  # nonincreasing, >= 0
    eigenvalues: np.ndarray
    residual: float

    @property
    def s_min(self) -> float:
        return float(self.singular_values[-1])

    @property
    def s_max(self) -> float:
        return float(self.singular_values[0])


@dataclass(frozen=True)
class ProjectionSelection:
    """Rows passing both the squared-l2 and row-sum thresholds."""

    indices: tuple[int, ...]
    eps: float
    l2sq_threshold: float
    rowsum_threshold: float
    n_rows: int
    n_cols: int

    @property
    def complement_size(self) -> int:
        return self.n_rows - len(self.indices)


def sample_ensemble(
    n: int,
    shift: np.ndarray | None,
    law: EntryLaw,
    stream: RandomStream,
    strict: bool = False,
) -> EnsembleSample:
    """Noise matrix filled i.i.d. row-major from the law; composite = shift + noise.

    strict mode rejects shifts with operator norm above n^0.51.
    """
    if shift is None:
        shift = np.zeros((n, n), dtype=np.complex128)
    shift = as_complex_matrix(shift)
    if shift.shape != (n, n):
        raise ValueError(f"shift must be {n}x{n}, got {shift.shape}")
    if strict:
        top = float(np.linalg.norm(shift, 2))
        if top > n**0.51 * (1 + 1e-9):
            raise ValueError(f"shift operator norm {top:.4g} exceeds n^0.51 = {n**0.51:.4g}")
    noise = sample(law, stream, n * n).reshape(n, n)
    return EnsembleSample(n, shift, noise, shift + noise)


def spectral(a) -> SpectralSummary:
    """Full singular values (sorted nonincreasing) and eigenvalues, with
    Frobenius / trace residual checks."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    try:
        svals = np.linalg.svd(a, compute_uv=False)
        evals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise SpectralBackendError(f"backend failed to converge: {exc}") from exc
    svals = np.sort(svals)[::-1]
    fro2 = float(np.sum(np.abs(a) ** 2))
    scale = max(fro2, 1e-300)
    res_s = abs(float(np.sum(svals**2)) - fro2) / scale
    tr = complex(np.trace(a))
    res_t = abs(complex(np.sum(evals)) - tr) / max(abs(tr), np.sqrt(scale), 1e-300)
    residual = max(res_s, res_t)
    if res_s > 1e-8 or res_t > 1e-6:
        raise SpectralBackendError(f"residual check failed: svd {res_s:.2e}, trace {res_t:.2e}")
    return SpectralSummary(svals, evals, residual)


def op_norm_2(a, tol: float = 1e-10, max_iter: int = 20000) -> float:
    """Largest singular value via power iteration on A^H A, to relative tol."""
    a = as_complex_matrix(a)
    gen = RandomStream(0x5EC7, 0).generator()
    n = a.shape[1]
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = a.conj().T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        cur = float(np.sqrt(nw))
        if abs(cur - prev) <= tol * max(cur, 1e-300):
            return cur
        prev = cur
    raise NonConvergence(f"power iteration did not reach tol {tol} in {max_iter} iterations")


@dataclass(frozen=True)
class SignNormResult:
    """Max of ||B v||_2 over v in {-1,+1}^m with an achieving v.

    The complex infinity-to-2 norm is bracketed by [value, 2*value]: splitting
    a complex maximizer w = w1 + i*w2 into real parts loses at most a factor 2,
    and the real max over the cube is attained at a sign vector by convexity.
    """

    value: float
    witness: np.ndarray

    @property
    def complex_bracket(self) -> tuple[float, float]:
        return self.value, 2 * self.value


def _sign_matrix(m: int) -> np.ndarray:
    """All sign vectors with first coordinate +1, as an (m, 2^(m-1)) array."""
    k = m - 1
    cols = 1 << k
    bits = ((np.arange(cols)[None, :] >> np.arange(k)[:, None]) & 1).astype(np.float64)
    return np.vstack([np.ones(cols), 1.0 - 2.0 * bits])


def inf_to_2_sign_norm(b) -> SignNormResult:
    """Exhaustive sign-vector max; restricted to m <= 20 columns."""
    b = as_complex_matrix(b)
    m = b.shape[1]
    if m > SIGN_NORM_MAX_COLS:
        raise DimensionTooLarge(f"{m} columns exceeds exhaustive cutoff {SIGN_NORM_MAX_COLS}")
    best_val2 = -1.0
    best_v: np.ndarray | None = None
    cols = 1 << (m - 1)
    chunk = max(1, min(cols, int(4e6 // max(b.shape[0], 1))))
    full = _sign_matrix(m)
    for lo in range(0, cols, chunk):
        s = full[:, lo : lo + chunk]
        prod = b @ s
        norms2 = np.sum(prod.real**2 + prod.imag**2, axis=0)
        i = int(np.argmax(norms2))
        if norms2[i] > best_val2:
            best_val2 = float(norms2[i])
            best_v = s[:, i].copy()
    assert best_v is not None
    return SignNormResult(float(np.sqrt(best_val2)), best_v)


def inf_to_2_upper(b) -> float:
    """sqrt(sum of squared row l1 norms): always >= the complex inf-to-2 norm."""
    b = as_complex_matrix(b)
    row_l1 = np.abs(b).sum(axis=1)
    return float(np.sqrt(np.sum(row_l1**2)))


def select_good_rows(a, eps: float) -> ProjectionSelection:
    """Rows i with sum_j |a_ij|^2 <= n^(2 eps) m and |sum_j a_ij| <= n^eps sqrt(m)."""
    a = as_complex_matrix(a)
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    n, m = a.shape
    l2sq_thresh = n ** (2 * eps) * m
    rowsum_thresh = n**eps * np.sqrt(m)
    l2sq = np.sum(np.abs(a) ** 2, axis=1)
    rowsums = np.abs(a.sum(axis=1))
    keep = (l2sq <= l2sq_thresh) & (rowsums <= rowsum_thresh)
    return ProjectionSelection(
        tuple(int(i) for i in np.nonzero(keep)[0]),
        eps,
        float(l2sq_thresh),
        float(rowsum_thresh),
        n,
        m,
    )


def _check_indices(indices, extent: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= extent):
        raise IndexError(f"index out of range for extent {extent}")
    return idx


def project_rows(a, sel) -> np.ndarray:
    """Zero the rows outside the selection; shape preserved (idempotent)."""
    a = as_complex_matrix(a)
    indices = sel.indices if isinstance(sel, ProjectionSelection) else sel
    idx = _check_indices(indices, a.shape[0])
    out = np.zeros_like(a)
    out[idx, :] = a[idx, :]
    return out


def project_cols(a, sel) -> np.ndarray:
    a = as_complex_matrix(a)
    indices = sel.indices if isinstance(sel, ProjectionSelection) else sel
    idx = _check_indices(indices, a.shape[1])
    out = np.zeros_like(a)
    out[:, idx] = a[:, idx]
    return out


def permute_rows_independently(b, stream: RandomStream) -> np.ndarray:
    """Each row rearranged by its own independent uniform permutation."""
    b = as_complex_matrix(b)
    gen = stream.generator()
    out = np.empty_like(b)
    m = b.shape[1]
    for i in range(b.shape[0]):
        out[i] = b[i, gen.permutation(m)]
    return out
