"""Least-common-denominator search on the Gaussian-integer lattice, the
gamma1/gamma2 classification, and the sparse rounding decomposition.

The LCD of a unit vector a is the infimal |theta| such that theta*a comes
within min(gamma*|theta|, alpha) of a nonzero lattice point.  The infimum is
approached by an ascending annular grid sweep: a ring of grid points either
exhibits a witness (an actual theta where the strict condition holds) or
certifies its annulus empty via the Lipschitz bound
|dist(theta' a, L) - dist(theta a, L)| <= |theta' - theta|.  Below 1/(1+gamma)
no witness can exist (a nonzero lattice point is at distance >= 1 - |theta|),
which seeds the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_complex_vector, round_half_away

_UNIT_TOL = 1e-10


class NotUnit(ValueError):
    pass


class WitnessTooFar(ValueError):
    pass


@dataclass(frozen=True)
class LcdParams:
    gamma: float
    alpha: float
    theta_max: float = 16.0
    radial_step: float = 1e-3
    refine_depth: int = 6

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0,1)")
        if self.alpha <= 0 or self.radial_step <= 0 or self.theta_max <= 0:
            raise ValueError("alpha, radial_step, theta_max must be positive")


def default_lcd_params(n: int, theta_max: float = 16.0, radial_step: float = 1e-3, refine_depth: int = 6) -> LcdParams:
    """gamma = n^(-1/2), alpha = n^(1/100)."""
    return LcdParams(n**-0.5, n**0.01, theta_max, radial_step, refine_depth)


@dataclass(frozen=True)
class LcdResult:
    infimum_estimate: float  # inf when exhausted
    certified_lower: float
    witness_theta: complex | None
    witness_w: np.ndarray | None
    achieved_distance: float | None
    exhausted: bool
    final_step: float

    @property
    def grid_tolerance(self) -> float:
        return 2 * self.final_step


def _lattice_dists(thetas: np.ndarray, a: np.ndarray) -> np.ndarray:
    """dist(theta*a, (Z+iZ)^n) for an array of thetas."""
    x = thetas[:, None] * a[None, :]
    dr = x.real - round_half_away(x.real)
    di = x.imag - round_half_away(x.imag)
    return np.sqrt((dr * dr + di * di).sum(axis=1))


def _scan_ring(a: np.ndarray, r: float, step: float, gamma: float, alpha: float):
    """One ring of the sweep.

    Returns (witness_theta or None, ring_certifies, achieved_distance).
    """
    m = max(8, int(math.ceil(2 * math.pi * r / step)))
    phis = 2 * math.pi * np.arange(m) / m
    thetas = r * np.exp(1j * phis)
    tol = min(gamma * r, alpha)
    best_theta = None
    best_dist = None
    min_margin = math.inf
    chunk = max(1, int(4e6 // max(a.size, 1)))
    for lo in range(0, m, chunk):
        block = thetas[lo : lo + chunk]
        dists = _lattice_dists(block, a)
        hits = dists < tol
        if hits.any():
            i = int(np.argmin(np.where(hits, dists, np.inf)))
            if best_dist is None or dists[i] < best_dist:
                best_theta = complex(block[i])
                best_dist = float(dists[i])
        min_margin = min(min_margin, float((dists - tol).min()))
    if best_theta is not None:
        return best_theta, False, best_dist
    # covering radius of the ring's grid over its annulus [r-step/2, r+step/2]
    cover = math.sqrt((step / 2) ** 2 + ((r + step / 2) * math.pi / m) ** 2)
    certifies = min_margin >= (1 + gamma) * cover
    return None, certifies, None


def lcd_search(a, p: LcdParams) -> LcdResult:
    """Grid-certified estimate of LCD_{gamma,alpha}(a) for unit a.

    infimum_estimate is the smallest grid theta satisfying the strict witness
    condition (one-sided overshoot <= grid_tolerance); certified_lower is a
    radius below which the sweep proves no witness exists.
    """
    a = as_complex_vector(a)
    na = float(np.linalg.norm(a))
    if na == 0:
        raise NotUnit("zero vector")
    if abs(na - 1.0) > _UNIT_TOL:
        raise NotUnit(f"norm {na} is not 1 within {_UNIT_TOL}")

    floor = 1.0 / (1.0 + p.gamma)
    h = p.radial_step
    certified = floor
    r_best = math.inf
    witness_theta: complex | None = None
    witness_dist: float | None = None

    r = floor + h / 2
    while r <= p.theta_max:
        theta, certifies, dist = _scan_ring(a, r, h, p.gamma, p.alpha)
        if theta is not None:
            r_best = r
            witness_theta, witness_dist = theta, dist
            break
        if certifies and abs(certified - (r - h / 2)) <= h / 2 + 1e-12:
            certified = r + h / 2
        r += h

    final_step = h
    if witness_theta is not None:
        for level in range(1, p.refine_depth + 1):
            hk = h / 2**level
            final_step = hk
            while certified + hk / 2 < r_best - 1e-15:
                r = certified + hk / 2
                theta, certifies, dist = _scan_ring(a, r, hk, p.gamma, p.alpha)
                if theta is not None:
                    r_best = r
                    witness_theta, witness_dist = theta, dist
                    break
                if certifies:
                    certified = r + hk / 2
                else:
                    break

    if witness_theta is None:
        return LcdResult(math.inf, min(certified, p.theta_max), None, None, None, True, final_step)
    x = witness_theta * a
    w = round_half_away(x.real) + 1j * round_half_away(x.imag)
    assert np.any(w != 0)
    return LcdResult(
        abs(witness_theta),
        min(certified, r_best),
        witness_theta,
        w,
        witness_dist,
        False,
        final_step,
    )


@dataclass(frozen=True)
class GammaClassification:
    eta: float
    threshold: float
    klass: str  # "gamma1" | "gamma2" | "undetermined"
    lcd: LcdResult


def classify_gamma(
    a,
    eta: float,
    p: LcdParams,
    n: int | None = None,
    enforce_eta_range: bool = False,
) -> GammaClassification:
    """gamma2 if a witness exists below n^0.7 / eta, gamma1 if that region is
    certified empty, undetermined if the sweep exhausts inconclusively."""
    a = as_complex_vector(a)
    n = n if n is not None else a.size
    if eta <= 0:
        raise ValueError("eta must be positive")
    if enforce_eta_range and not (2.0 ** (-(n**0.0001)) <= eta < n**-2):
        raise ValueError("eta outside the working range [2^(-n^0.0001), n^-2)")
    threshold = n**0.7 / eta
    capped = LcdParams(p.gamma, p.alpha, min(p.theta_max, threshold), p.radial_step, p.refine_depth)
    res = lcd_search(a, capped)
    if res.witness_theta is not None and res.infimum_estimate < threshold:
        return GammaClassification(eta, threshold, "gamma2", res)
    if res.certified_lower >= threshold:
        return GammaClassification(eta, threshold, "gamma1", res)
    return GammaClassification(eta, threshold, "undetermined", res)


@dataclass(frozen=True)
class RoundingDecomposition:
    w: np.ndarray
    v_sp: np.ndarray
    v_ss: np.ndarray
    v_sm: np.ndarray
    J1: tuple[int, ...]
    J2: tuple[int, ...]
    theta: complex

    @property
    def error(self) -> np.ndarray:
        return self.v_sp + self.v_ss + self.v_sm


def rounding_decomposition(a, theta: complex, w, gamma: float, alpha: float) -> RoundingDecomposition:
    """Split theta*a - w into very-sparse / sparse-and-small / small parts.

    Coordinates sorted by modulus (descending, ties by index): the top
    ceil(n^0.4) go to v_sp, the next ceil(n^0.8) - ceil(n^0.4) to v_ss, the
    rest to v_sm.  Requires witness quality ||theta a - w||_2 <=
    min(gamma |theta|, alpha); the resulting sup-norm bounds
    ||v_ss||_inf <= min/n^0.2 and ||v_sm||_inf <= min/n^0.4 are re-verified.
    """
    a = as_complex_vector(a)
    w = as_complex_vector(w)
    if a.size != w.size:
        raise ValueError("a and w must have the same length")
    if not np.any(w != 0):
        raise ValueError("w must be nonzero")
    n = a.size
    e = theta * a - w
    quality = min(gamma * abs(theta), alpha)
    err_norm = float(np.linalg.norm(e))
    if err_norm > quality * (1 + 1e-12) + 1e-15:
        raise WitnessTooFar(f"||theta a - w||_2 = {err_norm:.6g} exceeds min(gamma|theta|, alpha) = {quality:.6g}")

    j1 = math.ceil(n**0.4)
    j2 = math.ceil(n**0.8)
    mod = np.abs(e)
    order = np.lexsort((np.arange(n), -mod))
    top1 = order[:j1]
    top2 = order[:j2]
    v_sp = np.zeros_like(e)
    v_sp[top1] = e[top1]
    v_ss = np.zeros_like(e)
    v_ss[order[j1:j2]] = e[order[j1:j2]]
    v_sm = np.zeros_like(e)
    v_sm[order[j2:]] = e[order[j2:]]

    assert np.array_equal(v_sp + v_ss + v_sm, e)
    slack = 1e-12 * max(1.0, quality) + 1e-15
    if v_ss.size and np.abs(v_ss).max() > quality / n**0.2 + slack:
        raise WitnessTooFar("sparse-and-small part exceeds its sup-norm budget")
    if v_sm.size and np.abs(v_sm).max() > quality / n**0.4 + slack:
        raise WitnessTooFar("small part exceeds its sup-norm budget")

    return RoundingDecomposition(
        w,
        v_sp,
        v_ss,
        v_sm,
        tuple(sorted(int(i) for i in top1)),
        tuple(sorted(int(i) for i in top2)),
        complex(theta),
    )


def lattice_adjacent_unit_vector(
    n: int,
    stream,
    gamma: float,
    alpha: float,
    support_size: int | None = None,
    box: int = 1,
) -> np.ndarray:
    """A unit vector a = (w + eps)/||w + eps|| hugging a sparse lattice vector.

    Such vectors carry a witness near |theta| = ||w + eps||, so classify_gamma
    re-discovers them as gamma2 without trusting this construction.
    """
    gen = stream.generator()
    support_size = support_size or max(4, n // 4)
    idx = gen.choice(n, size=support_size, replace=False)
    re = gen.integers(-box, box + 1, size=support_size)
    im = gen.integers(-box, box + 1, size=support_size)
    w = np.zeros(n, dtype=np.complex128)
    w[idx] = re + 1j * im
    if not np.any(w != 0):
        w[idx[0]] = 1.0
    budget = 0.3 * min(gamma * float(np.linalg.norm(w)), alpha)
    eps = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    eps *= budget / np.linalg.norm(eps)
    x = w + eps
    return x / np.linalg.norm(x)
