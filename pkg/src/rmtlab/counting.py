"""Brute-force concentration level sets over Gaussian-integer boxes, the
mod-p reduction, the two-term counting bound in log space, and the
sparse / non-sparse bookkeeping."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .anticonc import ConcentrationQuery, rho_exact
from .laws import EntryLaw

ENUM_LIMIT = 10**8

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class TooLarge(ValueError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(x: int) -> int:
    """Smallest prime >= x."""
    n = max(2, int(math.ceil(x)))
    while not is_prime(n):
        n += 1
    return n


def box_vectors(n: int, H: int):
    """All w in (Z+iZ)^n with |Re|, |Im| <= H, in lexicographic order."""
    coords = [complex(a, b) for a in range(-H, H + 1) for b in range(-H, H + 1)]
    for tup in itertools.product(coords, repeat=n):
        yield np.array(tup, dtype=np.complex128)


@dataclass(frozen=True)
class LevelSetResult:
    rho: float
    H: int
    n: int
    vectors: list[np.ndarray]
    rho_values: list[Fraction]
    includes_zero: bool

    def phi_image_size(self, p: int) -> int:
        return len({tuple(map(tuple, phi_p(v, p).view(np.float64).reshape(-1, 2))) for v in self.vectors})


def enumerate_level_set(n: int, H: int, law: EntryLaw, rho: float) -> LevelSetResult:
    """All box vectors whose exact radius-1 concentration is >= rho.

    The zero vector (rho = 1) is listed when it qualifies, flagged via
    includes_zero; sparse/non-sparse splits drop it downstream.
    """
    if not law.is_discrete:
        raise TooLarge("level sets need a discrete law for the exact oracle")
    count = (2 * H + 1) ** (2 * n) * len(law.atoms) ** n
    if count > ENUM_LIMIT:
        raise TooLarge(f"(2H+1)^(2n) * s^n = {count} exceeds {ENUM_LIMIT}")
    kept: list[np.ndarray] = []
    vals: list[Fraction] = []
    includes_zero = False
    for w in box_vectors(n, H):
        est = rho_exact(ConcentrationQuery(w, 1.0, law))
        assert est.exact_mass is not None
        if float(est.exact_mass) >= rho - 1e-12:
            kept.append(w)
            vals.append(est.exact_mass)
            if not np.any(w != 0):
                includes_zero = True
    return LevelSetResult(rho, H, n, kept, vals, includes_zero)


def phi_p(w, p: int) -> np.ndarray:
    """Componentwise reduction of Re and Im mod p into [0, p)."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p = {p} is not an odd prime")
    w = np.asarray(w, dtype=np.complex128)
    re = np.rint(w.real).astype(np.int64)
    im = np.rint(w.imag).astype(np.int64)
    if np.abs(re - w.real).max(initial=0) > 1e-9 or np.abs(im - w.imag).max(initial=0) > 1e-9:
        raise ValueError("phi_p needs Gaussian-integer input")
    return (re % p) + 1j * (im % p)


@dataclass(frozen=True)
class CountingBoundParams:
    n: int
    s: int
    k: int
    p: int
    rho: float
    C: float
    C_z: float = 1.0

    def __post_init__(self):
        if min(self.n, self.s, self.k) < 1 or not 0 < self.rho <= 1 or self.C < 1:
            raise ValueError("need n,s,k >= 1, rho in (0,1], C >= 1")


@dataclass(frozen=True)
class CountingBound:
    log_value: float
    flags: dict[str, bool]

    @property
    def hypotheses_ok(self) -> bool:
        return all(self.flags.values())


def counting_bound(q: CountingBoundParams) -> CountingBound:
    """log of (5 n p^2 / s)^s + (C rho^-1 / sqrt(s/k))^n, overflow-safe.

    Hypothesis violations are reported as flags, never as errors: desk-scale n
    cannot satisfy them and the formula is still worth evaluating.
    """
    log_p = math.log(q.p)
    log_rho = math.log(q.rho)
    term1 = q.s * (math.log(5) + math.log(q.n) + 2 * log_p - math.log(q.s))
    term2 = q.n * (math.log(q.C) - log_rho - 0.5 * (math.log(q.s) - math.log(q.k)))
    log_value = float(np.logaddexp(term1, term2))
    log_rho_floor = math.log(q.C) + max(-q.s / q.k, -(q.k / 4) * math.log(q.s))
    flags = {
        "k_ge_1000_Cz": q.k >= 1000 * q.C_z,
        "k_le_sqrt_s": q.k <= math.sqrt(q.s),
        "s_le_n_over_log_n": q.s <= q.n / math.log(q.n) if q.n > 1 else False,
        "rho_ge_floor": log_rho >= log_rho_floor,
        "p_ge_C_over_rho": log_p >= math.log(q.C) - log_rho,
        "p_le_2_pow_n_over_s": log_p <= (q.n / q.s) * math.log(2),
        "p_odd_prime": q.p % 2 == 1 and is_prime(q.p),
    }
    return CountingBound(log_value, flags)


@dataclass(frozen=True)
class SparseSplit:
    s_part: list[np.ndarray]  # support <= n^0.99, zero excluded
    w_part: list[np.ndarray]  # support > n^0.99, zero excluded
    box_violations: list[np.ndarray]  # w_part members breaking the eta^-4 box


def split_sparse(vectors, n: int, eta: float | None = None) -> SparseSplit:
    """Partition by support size against n^0.99; optionally check the
    non-sparse box constraint max(|Re|, |Im|) <= eta^-4."""
    threshold = n**0.99
    s_part: list[np.ndarray] = []
    w_part: list[np.ndarray] = []
    violations: list[np.ndarray] = []
    for w in vectors:
        w = np.asarray(w, dtype=np.complex128)
        support = int(np.count_nonzero(w))
        if support == 0:
            continue
        if support <= threshold:
            s_part.append(w)
        else:
            w_part.append(w)
            if eta is not None:
                box = max(float(np.abs(w.real).max()), float(np.abs(w.imag).max()))
                if box > eta**-4:
                    violations.append(w)
    return SparseSplit(s_part, w_part, violations)


@dataclass(frozen=True)
class RhoBucket:
    t: float  # bucket is [t, 2t)
    j: int  # t = 2^-j
    vectors: list[np.ndarray]
    rho_values: list[Fraction]


def bucket_by_rho(vectors, law: EntryLaw, max_j: int = 40) -> list[RhoBucket]:
    """Dyadic bucketing of exact radius-1 concentrations: rho in [2^-j, 2^-j+1)."""
    buckets: dict[int, RhoBucket] = {}
    for w in vectors:
        est = rho_exact(ConcentrationQuery(np.asarray(w, dtype=np.complex128), 1.0, law))
        rho = float(est.exact_mass)
        j = int(math.ceil(-math.log2(rho) - 1e-12)) if rho < 1 else 0
        if j > max_j:
            raise TooLarge(f"rho = {rho} below the bucket grid 2^-{max_j}")
        b = buckets.setdefault(j, RhoBucket(2.0**-j, j, [], []))
        b.vectors.append(np.asarray(w))
        b.rho_values.append(est.exact_mass)
    return [buckets[j] for j in sorted(buckets)]
