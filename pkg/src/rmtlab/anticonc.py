"""Lévy concentration estimation (exact and Monte Carlo), the Esseen bound,
the torus norm on complex scalars, the Gaussian-smoothed mass P_z, its
Fourier-integral upper bound, and the LCD-driven concentration bound.

Conventions.  rho_{r,z}(v) is the supremum over centers x of the probability
that sum_i v_i z_i lands in the *closed* ball B(x, r).  The torus norm on a
scalar w averages over the plain difference z1 - z2, while P_z averages over
the Bernoulli-thinned (z1 - z2) * Ber(1/2); the two deliberately differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._cover import max_ball_mass
from .core import as_complex_vector
from .laws import EntryLaw, SymmetrizedLaw, sample
from .rng import RandomStream
from .stats import wilson_interval

EXACT_ENUM_LIMIT = 10**7


class TooLargeForExact(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


class PreconditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class ConcentrationQuery:
    weights: np.ndarray
    radius: float
    law: EntryLaw

    def __post_init__(self):
        object.__setattr__(self, "weights", as_complex_vector(self.weights))
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class ConcentrationEstimate:
    rho_hat: float
    method: str  # "exact" | "monte-carlo"
    ci: tuple[float, float]
    centers_tried: int
    exact_mass: Fraction | None = None


def weighted_sum_distribution(
    weights: np.ndarray,
    atoms: tuple[complex, ...],
    probs: tuple[Fraction, ...],
    limit: int = EXACT_ENUM_LIMIT,
) -> tuple[np.ndarray, list[Fraction]]:
    """Exact distribution of sum_i w_i X_i for i.i.d. discrete X.

    Runs coordinatewise convolutions, merging numerically-coincident atoms so
    lattice-valued sums stay compact.  Raises TooLargeForExact if the naive
    enumeration count s^n exceeds the limit.
    """
    weights = as_complex_vector(weights)
    s = len(atoms)
    if s ** len(weights) > limit:
        raise TooLargeForExact(f"support^n = {s}^{len(weights)} exceeds {limit}")
    dist: dict[complex, Fraction] = {0j: Fraction(1)}
    for w in weights:
        nxt: dict[complex, Fraction] = {}
        for v, p in dist.items():
            for a, q in zip(atoms, probs):
                key = v + complex(w) * complex(a)
                key = complex(round(key.real, 12), round(key.imag, 12))
                nxt[key] = nxt.get(key, Fraction(0)) + p * q
        dist = nxt
        if len(dist) > limit:
            raise TooLargeForExact("distinct sums exceeded the enumeration limit")
    points = np.array(sorted(dist, key=lambda z: (z.real, z.imag)), dtype=np.complex128)
    return points, [dist[complex(round(z.real, 12), round(z.imag, 12))] for z in points]


def rho_exact(q: ConcentrationQuery) -> ConcentrationEstimate:
    """Exact closed-ball concentration via full enumeration plus the
    point/circumcenter center search."""
    if not q.law.is_discrete:
        raise TooLargeForExact("exact mode needs a discrete law")
    points, probs = weighted_sum_distribution(q.weights, q.law.atoms, q.law.probs)
    mass, _, tried = max_ball_mass(points, probs, q.radius)
    val = float(mass)
    return ConcentrationEstimate(val, "exact", (val, val), tried, mass)


def rho_mc(
    q: ConcentrationQuery,
    trials: int,
    stream: RandomStream,
    distinct_cap: int = 600,
) -> ConcentrationEstimate:
    """Monte Carlo concentration: best ball over empirical center candidates.

    Samples are merged into distinct values; when few enough remain (lattice
    sums), the center search matches the exact one (points plus pair
    circumcenters), making the estimate consistent.  Dense clouds fall back to
    sample-centered balls, which carry a documented downward bias; the Wilson
    interval covers only the counting error at the chosen center.
    """
    if trials < 10**3:
        raise ValueError("trials must be at least 1e3")
    draws = sample(q.law, stream, trials * q.weights.size).reshape(trials, q.weights.size)
    sums = draws @ q.weights
    keys = np.round(sums.real, 12) + 1j * np.round(sums.imag, 12)
    vals, counts = np.unique(keys, return_counts=True)
    if vals.size <= distinct_cap:
        probs = [Fraction(int(c), trials) for c in counts]
        mass, _, tried = max_ball_mass(vals, probs, q.radius)
        best = int(mass * trials)
    else:
        tried = vals.size
        best = -1
        chunk = max(1, int(4e6 // max(vals.size, 1)))
        weights = counts.astype(np.int64)
        for lo in range(0, vals.size, chunk):
            block = vals[lo : lo + chunk]
            inside = np.abs(block[:, None] - vals[None, :]) <= q.radius + 1e-12
            cand = int((inside @ weights).max())
            best = max(best, cand)
    lo_ci, hi_ci = wilson_interval(best, trials)
    return ConcentrationEstimate(best / trials, "monte-carlo", (lo_ci, hi_ci), int(tried))


@dataclass(frozen=True)
class EsseenInputs:
    t: float
    t_j: np.ndarray
    rho_tj: np.ndarray
    C_E: float = 1.0

    def __post_init__(self):
        tj = np.asarray(self.t_j, dtype=float)
        rho = np.asarray(self.rho_tj, dtype=float)
        object.__setattr__(self, "t_j", tj)
        object.__setattr__(self, "rho_tj", rho)
        if tj.size == 0 or np.any(tj <= 0):
            raise ValueError("t_j must be positive")
        if self.t < tj.max():
            raise ValueError("t must be >= max(t_j)")
        if np.any((rho < 0) | (rho > 1)):
            raise ValueError("rho_tj must lie in [0,1]")
        if self.C_E < 1:
            raise ValueError("C_E must be >= 1")


@dataclass(frozen=True)
class EsseenBound:
    value: float  # clamped to [0, 1]
    raw: float
    vacuous: bool


def esseen_bound(inp: EsseenInputs) -> EsseenBound:
    """C_E * t^2 * (sum_j t_j^4 (1 - rho_j))^(-1/2), clamped to [0,1]."""
    denom = float(np.sum(inp.t_j**4 * (1.0 - inp.rho_tj)))
    if denom <= 0:
        raise DegenerateDenominator("every coordinate is fully concentrated")
    raw = inp.C_E * inp.t**2 / math.sqrt(denom)
    return EsseenBound(min(raw, 1.0), raw, raw >= 1.0)


def _dist_to_int_sq(x: np.ndarray) -> np.ndarray:
    d = x - np.rint(x)
    return d * d


def torus_norm_sq(
    w: complex,
    sym: SymmetrizedLaw,
    trials: int = 10**5,
    stream: RandomStream | None = None,
) -> float:
    """E || Re(w (z1 - z2)) ||^2 over the torus R/Z — plain difference, no
    Bernoulli thinning."""
    if sym.is_discrete:
        total = 0.0
        for d, p in zip(sym.diff_atoms, sym.diff_probs):
            x = (complex(w) * d).real
            total += float(p) * float(_dist_to_int_sq(np.array([x]))[0])
        return total
    stream = stream or RandomStream(0, 0)
    diffs = sym.sample_difference(stream, trials)
    return float(np.mean(_dist_to_int_sq((complex(w) * diffs).real)))


@dataclass(frozen=True)
class PzResult:
    value: float
    method: str  # "exact" | "monte-carlo"
    ci: tuple[float, float]


def p_z(
    v,
    sym: SymmetrizedLaw,
    trials: int = 10**5,
    stream: RandomStream | None = None,
) -> PzResult:
    """E exp(-pi |sum_i v_i x_i|^2) with x_i i.i.d. (z1 - z2) * Ber(1/2)."""
    v = as_complex_vector(v)
    if sym.is_discrete and len(sym.atoms) ** v.size <= EXACT_ENUM_LIMIT:
        points, probs = weighted_sum_distribution(v, sym.atoms, sym.probs)
        val = float(sum(float(p) * math.exp(-math.pi * abs(z) ** 2) for z, p in zip(points, probs)))
        return PzResult(val, "exact", (val, val))
    stream = stream or RandomStream(0, 0)
    draws = sym.sample(stream, trials * v.size).reshape(trials, v.size)
    vals = np.exp(-math.pi * np.abs(draws @ v) ** 2)
    mean = float(vals.mean())
    half = 2.5758293035489004 * float(vals.std(ddof=1)) / math.sqrt(trials)
    return PzResult(mean, "monte-carlo", (mean - half, mean + half))


@dataclass(frozen=True)
class QuadratureSpec:
    radius: float = 6.0
    step: float = 0.01


@dataclass(frozen=True)
class FourierBoundResult:
    p_z_value: float
    integral: float
    error: float
    spec: QuadratureSpec

    @property
    def upper_bound(self) -> float:
        return self.integral + self.error


def _torus_integrand_log(v: np.ndarray, sym: SymmetrizedLaw, xi: np.ndarray) -> np.ndarray:
    """-(1/2) sum_i ||v_i xi||_z^2 evaluated on an array of grid points."""
    acc = np.zeros_like(xi, dtype=np.float64)
    for vi in v:
        if vi == 0:
            continue
        for d, p in zip(sym.diff_atoms, sym.diff_probs):
            if d == 0:
                continue
            acc += float(p) * _dist_to_int_sq((complex(vi) * d * xi).real)
    return -acc / 2.0


def _quad_once(v: np.ndarray, sym: SymmetrizedLaw, radius: float, step: float) -> float:
    xs = np.arange(-radius + step / 2, radius, step)
    total = 0.0
    # row-by-row over the imaginary axis keeps memory flat
    for y in xs:
        xi = xs + 1j * y
        mask = np.abs(xi) <= radius
        if not mask.any():
            continue
        xi = xi[mask]
        logs = _torus_integrand_log(v, sym, xi) - math.pi * np.abs(xi) ** 2
        total += float(np.exp(logs).sum())
    return total * step * step


def fourier_integral_bound(
    v,
    sym: SymmetrizedLaw,
    quadrature: QuadratureSpec = QuadratureSpec(),
) -> FourierBoundResult:
    """Tensor midpoint quadrature of exp(-sum ||v_i xi||_z^2 / 2 - pi |xi|^2)
    over B(0, R), an exact Gaussian tail for |xi| > R, and a grid-refinement
    error estimate."""
    v = as_complex_vector(v)
    if not sym.is_discrete:
        raise ValueError("quadrature needs a discrete symmetrized law (exact torus norms)")
    R, h = quadrature.radius, quadrature.step
    coarse = _quad_once(v, sym, R, h)
    fine = _quad_once(v, sym, R, h / 2)
    tail = math.exp(-math.pi * R * R)
    err = abs(coarse - fine) / 3 + tail + 1e-12
    pz = p_z(v, sym)
    return FourierBoundResult(pz.value, fine + tail, err, quadrature)


@dataclass(frozen=True)
class LcdBoundQuery:
    delta: float
    alpha: float
    gamma: float
    lcd: float
    n: int
    C_bound: float = 1.0

    def __post_init__(self):
        if not (0 < self.alpha < math.sqrt(self.n)):
            raise PreconditionViolated("alpha must lie in (0, sqrt(n))")
        if not (0 < self.gamma < 1):
            raise PreconditionViolated("gamma must lie in (0, 1)")
        if self.C_bound < 1:
            raise PreconditionViolated("C_bound must be >= 1")
        if self.delta < self.n**0.1 * self.alpha / self.lcd:
            raise PreconditionViolated(
                f"delta {self.delta} below n^0.1 * alpha / lcd = "
                f"{self.n ** 0.1 * self.alpha / self.lcd:.3g}"
            )


@dataclass(frozen=True)
class RhoBound:
    value: float
    raw: float
    vacuous: bool


def lcd_rho_bound(q: LcdBoundQuery) -> RhoBound:
    """C * (sqrt(n) delta / gamma + exp(-alpha^2 / C)), clamped to [0,1]."""
    raw = q.C_bound * (math.sqrt(q.n) * q.delta / q.gamma + math.exp(-q.alpha**2 / q.C_bound))
    return RhoBound(min(raw, 1.0), raw, raw >= 1.0)
