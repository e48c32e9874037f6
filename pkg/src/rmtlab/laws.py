"""Complex entry laws: specification, sampling, symmetrization, C-goodness.

All standard laws have mean 0 and E|z|^2 = 1.  Discrete laws carry exact
rational probabilities so downstream enumeration oracles stay exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._cover import max_ball_mass
from .rng import RandomStream
from .stats import wilson_lower

_MERGE_DECIMALS = 12


class InvalidLaw(ValueError):
    pass


class NoFiniteC(RuntimeError):
    """No grid value certifies the two-copy modulus condition."""


def _merge_atoms(values: list[complex], probs: list[Fraction]) -> tuple[tuple[complex, ...], tuple[Fraction, ...]]:
    acc: dict[complex, Fraction] = {}
    for v, p in zip(values, probs):
        key = complex(round(v.real, _MERGE_DECIMALS), round(v.imag, _MERGE_DECIMALS))
        acc[key] = acc.get(key, Fraction(0)) + p
    items = sorted(acc.items(), key=lambda kv: (kv[0].real, kv[0].imag))
    return tuple(k for k, _ in items), tuple(p for _, p in items)


@dataclass(frozen=True)
class EntryLaw:
    """A complex entry distribution; discrete kinds carry their exact atoms."""

    kind: str
    atoms: tuple[complex, ...] = ()
    probs: tuple[Fraction, ...] = ()
    q: float | None = None  # lazy-bernoulli parameter

    @property
    def is_discrete(self) -> bool:
        return len(self.atoms) > 0

    @property
    def variance(self) -> float:
        if self.is_discrete:
            return float(sum(p * (abs(v) ** 2) for v, p in zip(self.atoms, self.probs)))
        return 1.0

    def mean(self) -> complex:
        if self.is_discrete:
            return complex(sum(Fraction(1) * p * v for v, p in zip(self.atoms, self.probs)))
        return 0j

    def validate(self) -> None:
        if self.is_discrete:
            total = sum(self.probs, Fraction(0))
            if total != 1:
                raise InvalidLaw(f"probabilities sum to {total}, not 1")
            if any(p < 0 for p in self.probs):
                raise InvalidLaw("negative probability")
            if abs(self.mean()) > 1e-9:
                raise InvalidLaw(f"mean {self.mean()} is not 0")
            if abs(self.variance - 1.0) > 1e-9:
                raise InvalidLaw(f"variance {self.variance} is not 1")
        elif self.kind != "complex-gaussian":
            raise InvalidLaw(f"unknown continuous law {self.kind}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def complex_gaussian() -> "EntryLaw":
        return EntryLaw("complex-gaussian")

    @staticmethod
    def discrete(pairs, kind: str = "discrete", validate: bool = True) -> "EntryLaw":
        values = [complex(v) for v, _ in pairs]
        probs = [p if isinstance(p, Fraction) else Fraction(p).limit_denominator(10**12) for _, p in pairs]
        law = EntryLaw(kind, tuple(values), tuple(probs))
        if validate:
            law.validate()
        return law

    @staticmethod
    def real_rademacher() -> "EntryLaw":
        return EntryLaw.discrete([(1, Fraction(1, 2)), (-1, Fraction(1, 2))], kind="real-rademacher")

    @staticmethod
    def complex_rademacher() -> "EntryLaw":
        s = 1 / math.sqrt(2)
        return EntryLaw.discrete(
            [(complex(a * s, b * s), Fraction(1, 4)) for a in (1, -1) for b in (1, -1)],
            kind="complex-rademacher",
        )

    @staticmethod
    def lazy_bernoulli(q: float) -> "EntryLaw":
        if not 0 < q <= 1:
            raise InvalidLaw("lazy-bernoulli parameter must be in (0, 1]")
        v = 1 / math.sqrt(q)
        fq = Fraction(q).limit_denominator(10**12)
        pairs = [(v, fq / 2), (-v, fq / 2)]
        if fq < 1:
            pairs.append((0, 1 - fq))
        law = EntryLaw("lazy-bernoulli", *zip(*_merge_pairs(pairs)), q=q)
        # variance is 1 up to float rounding of 1/sqrt(q)
        if abs(law.variance - 1.0) > 1e-9:
            raise InvalidLaw("lazy-bernoulli variance drifted from 1")
        return law

    @staticmethod
    def from_spec(spec: str) -> "EntryLaw":
        """Parse a law specification string as used by the CLI and configs."""
        spec = spec.strip()
        if spec in ("complex-gaussian", "gaussian"):
            return EntryLaw.complex_gaussian()
        if spec in ("real-rademacher", "rademacher"):
            return EntryLaw.real_rademacher()
        if spec == "complex-rademacher":
            return EntryLaw.complex_rademacher()
        m = re.fullmatch(r"lazy-bernoulli:([0-9.eE+-]+)", spec)
        if m:
            return EntryLaw.lazy_bernoulli(float(m.group(1)))
        m = re.fullmatch(r"discrete:(\[.*\])", spec)
        if m:
            import ast

            body = m.group(1).replace("i", "j").replace("I", "j")
            pairs = ast.literal_eval(body)
            return EntryLaw.discrete([(complex(v), Fraction(p).limit_denominator(10**12)) for v, p in pairs])
        raise InvalidLaw(f"unrecognized law spec {spec!r}")


def _merge_pairs(pairs):
    values = [complex(v) for v, _ in pairs]
    probs = [p for _, p in pairs]
    va, pa = _merge_atoms(values, probs)
    return list(zip(va, pa))


def sample(law: EntryLaw, stream: RandomStream, count: int) -> np.ndarray:
    """count i.i.d. draws from the law, bit-reproducible per stream."""
    law.validate()
    gen = stream.generator()
    if law.kind == "complex-gaussian":
        g = gen.standard_normal((count, 2))
        return (g[:, 0] + 1j * g[:, 1]) / math.sqrt(2)
    # discrete inverse-CDF in atom order, one uniform per draw
    u = gen.random(count)
    cum = np.cumsum([float(p) for p in law.probs])
    cum[-1] = 1.0
    idx = np.searchsorted(cum, u, side="right")
    return np.asarray(law.atoms, dtype=np.complex128)[idx]


@dataclass(frozen=True)
class SymmetrizedLaw:
    """Law of (z1 - z2)*Ber(1/2), plus the un-thinned difference z1 - z2.

    For discrete bases both supports are exact (rational probabilities); for
    continuous bases only the samplers are available.
    """

    base: EntryLaw
    atoms: tuple[complex, ...] = ()
    probs: tuple[Fraction, ...] = ()
    diff_atoms: tuple[complex, ...] = ()
    diff_probs: tuple[Fraction, ...] = ()

    @property
    def is_discrete(self) -> bool:
        return len(self.atoms) > 0

    def mass_at_zero(self) -> Fraction:
        for v, p in zip(self.atoms, self.probs):
            if v == 0:
                return p
        return Fraction(0)

    def sample(self, stream: RandomStream, count: int) -> np.ndarray:
        """Draws of (z1 - z2)*Ber(1/2)."""
        gen = stream.generator()
        if self.base.kind == "complex-gaussian":
            g = gen.standard_normal((count, 4))
            z1 = (g[:, 0] + 1j * g[:, 1]) / math.sqrt(2)
            z2 = (g[:, 2] + 1j * g[:, 3]) / math.sqrt(2)
            keep = gen.random(count) < 0.5
            return (z1 - z2) * keep
        u = gen.random(count)
        cum = np.cumsum([float(p) for p in self.probs])
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side="right")
        return np.asarray(self.atoms, dtype=np.complex128)[idx]

    def sample_difference(self, stream: RandomStream, count: int) -> np.ndarray:
        """Draws of plain z1 - z2 (no Bernoulli thinning)."""
        gen = stream.generator()
        if self.base.kind == "complex-gaussian":
            g = gen.standard_normal((count, 4))
            z1 = (g[:, 0] + 1j * g[:, 1]) / math.sqrt(2)
            z2 = (g[:, 2] + 1j * g[:, 3]) / math.sqrt(2)
            return z1 - z2
        u = gen.random(count)
        cum = np.cumsum([float(p) for p in self.diff_probs])
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side="right")
        return np.asarray(self.diff_atoms, dtype=np.complex128)[idx]


def symmetrize(law: EntryLaw) -> SymmetrizedLaw:
    """Exact convolution for discrete laws; sampler plumbing for continuous."""
    if not law.is_discrete:
        return SymmetrizedLaw(base=law)
    dvals: list[complex] = []
    dprobs: list[Fraction] = []
    for v1, p1 in zip(law.atoms, law.probs):
        for v2, p2 in zip(law.atoms, law.probs):
            dvals.append(v1 - v2)
            dprobs.append(p1 * p2)
    diff_atoms, diff_probs = _merge_atoms(dvals, dprobs)
    # thin with Ber(1/2): half the difference mass moves to 0
    tvals = list(diff_atoms) + [0j]
    tprobs = [p / 2 for p in diff_probs] + [Fraction(1, 2)]
    atoms, probs = _merge_atoms(tvals, tprobs)
    return SymmetrizedLaw(law, atoms, probs, diff_atoms, diff_probs)


@dataclass(frozen=True)
class GoodnessEstimate:
    """Certified C with Pr(1/C <= |z1-z2| <= C) >= 1/C, plus the measured
    anti-constancy pair (u_z, v_z) with rho_{v_z,z}(1) <= u_z."""

    C_z: float
    u_z: float
    v_z: float
    confidence: float
    method: str
    grid_checked: tuple[float, ...] = field(default_factory=tuple)


def _scalar_rho(law: EntryLaw, radius: float, trials: int, stream: RandomStream) -> float:
    """sup_x Pr(z in closed B(x, radius)) for a single copy of z.

    Exact for discrete laws; for continuous laws, the best sample-centered
    ball (adequate here: the value only gates the anti-constancy pair)."""
    if law.is_discrete:
        mass, _, _ = max_ball_mass(np.asarray(law.atoms), list(law.probs), radius)
        return float(mass)
    draws = sample(law, stream, trials)
    centers = draws[:512]
    counts = np.zeros(centers.size, dtype=np.int64)
    step = max(1, int(4e6 // centers.size))
    for lo in range(0, draws.size, step):
        tile = draws[lo : lo + step]
        counts += (np.abs(centers[:, None] - tile[None, :]) <= radius).sum(axis=1)
    return int(counts.max()) / trials


DEFAULT_GOODNESS_GRID = tuple(
    [round(1.0 + 0.1 * k, 2) for k in range(0, 41)]
    + list(range(6, 21))
    + list(range(22, 201, 2))
)


def estimate_goodness(
    law: EntryLaw,
    trials: int = 10**4,
    grid: tuple[float, ...] = DEFAULT_GOODNESS_GRID,
    stream: RandomStream | None = None,
    confidence: float = 0.99,
) -> GoodnessEstimate:
    """Smallest grid C passing the two-copy modulus check.

    Exact for discrete laws; otherwise a one-sided Wilson test at the given
    confidence on sampled |z1 - z2|.
    """
    if trials < 10**4:
        raise ValueError("trials must be at least 1e4")
    if any(c < 1 for c in grid) or list(grid) != sorted(grid):
        raise ValueError("grid must be ascending with all entries >= 1")
    stream = stream or RandomStream(0, 0)

    if law.is_discrete:
        sym = symmetrize(law)
        mags = [(abs(v), p) for v, p in zip(sym.diff_atoms, sym.diff_probs)]
        chosen = None
        for c in grid:
            mass = sum((p for m, p in mags if 1 / c - 1e-12 <= m <= c + 1e-12), Fraction(0))
            if float(mass) >= 1 / c - 1e-12:
                chosen = c
                break
        if chosen is None:
            raise NoFiniteC(f"no grid C up to {grid[-1]} certifies the law")
        u_z, v_z = _anti_constancy(law, trials, stream)
        return GoodnessEstimate(chosen, u_z, v_z, 1.0, "exact", tuple(grid))

    g1 = sample(law, stream.substream(1), trials)
    g2 = sample(law, stream.substream(2), trials)
    mags_mc = np.abs(g1 - g2)
    chosen = None
    for c in grid:
        k = int(np.count_nonzero((mags_mc >= 1 / c) & (mags_mc <= c)))
        if wilson_lower(k, trials) >= 1 / c:
            chosen = c
            break
    if chosen is None:
        raise NoFiniteC(f"no grid C up to {grid[-1]} certifies the law")
    u_z, v_z = _anti_constancy(law, trials, stream)
    return GoodnessEstimate(chosen, u_z, v_z, confidence, "monte-carlo", tuple(grid))


def _anti_constancy(law: EntryLaw, trials: int, stream: RandomStream) -> tuple[float, float]:
    """(u_z, v_z) with rho_{v_z,z}(1) <= u_z < 1: prefer a comfortably
    non-constant radius, fall back to bare non-constancy for heavy-tailed laws."""
    gate = 1.0 - 1e-9 if law.is_discrete else 0.995
    fallback = None
    for v in (0.5, 0.25, 0.1):
        u = _scalar_rho(law, v, trials, stream.substream(3))
        if u <= 0.9:
            return min(max(u, 1e-12), 1.0 - 1e-12), v
        if u < gate and fallback is None:
            fallback = (min(max(u, 1e-12), 1.0 - 1e-12), v)
    if fallback is not None:
        return fallback
    raise NoFiniteC("law concentrates in every candidate radius; degenerate?")
