"""End-to-end seeded experiments: least-singular-value tails, single-vector
invertibility, circular-law spectra, restricted-norm control, and the
gamma1/gamma2 concentration checks.  Every experiment is a pure function of
(config, seed); result files are byte-identical across reruns.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .anticonc import ConcentrationQuery, LcdBoundQuery, lcd_rho_bound, rho_mc
from .core import as_complex_matrix
from .laws import EntryLaw, sample
from .lcd import (
    LcdParams,
    classify_gamma,
    lattice_adjacent_unit_vector,
    rounding_decomposition,
)
from .rng import RandomStream
from .spectral import (
    SpectralBackendError,
    _sign_matrix,
    inf_to_2_upper,
    permute_rows_independently,
    project_rows,
    sample_ensemble,
    select_good_rows,
    spectral,
)
from .stats import fit_loglog_slope, run_trials, wilson_interval


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int  # no entropy defaults: reproducibility is the contract
    n: int = 64
    n_list: tuple[int, ...] = ()
    law: str = "complex-gaussian"
    shift: str = "zero"  # zero | diagonal:<c> | file:<path>
    eta_grid: tuple[float, ...] = ()
    trials: int = 1
    out_dir: str | None = None
    threads: int = 1
    # per-kind knobs
    eps: float = 0.25
    delta1: float = 0.2
    delta2: float = 0.6
    c_threshold: float = 0.1
    vector: str = "e1+e2"
    eta: float = 1.0
    grid_cells: int = 10
    gamma2_fraction: float = 0.5
    envelope_C: float = 1.0
    bound_C: float = 4.0

    def validate(self) -> None:
        if self.kind not in ("tail", "esd", "single-vector", "norms", "gamma"):
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.seed is None:
            raise ConfigError("seed is required")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.eta_grid and (
            any(e <= 0 for e in self.eta_grid) or list(self.eta_grid) != sorted(self.eta_grid)
        ):
            raise ConfigError("eta_grid must be positive ascending")
        EntryLaw.from_spec(self.law)


@dataclass(frozen=True)
class TrialRecord:
    experiment: str
    n: int
    law: str
    seed: int
    stream_id: int
    observable: str
    value: float
    wall_time: float = 0.0  # not persisted

    def to_json(self) -> str:
        return json.dumps(
            {
                "experiment": self.experiment,
                "n": self.n,
                "law": self.law,
                "seed": self.seed,
                "stream_id": self.stream_id,
                "observable": self.observable,
                "value": self.value,
            },
            sort_keys=True,
        )


def shift_matrix(spec: str, n: int) -> np.ndarray:
    if spec == "zero":
        return np.zeros((n, n), dtype=np.complex128)
    if spec.startswith("diagonal:"):
        c = float(spec.split(":", 1)[1])
        return c * n**0.51 * np.eye(n, dtype=np.complex128)
    if spec.startswith("file:"):
        return as_complex_matrix(np.load(spec.split(":", 1)[1]))
    raise ConfigError(f"unknown shift spec {spec!r}")


def unit_vector(spec: str, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.complex128)
    if spec == "e1":
        v[0] = 1.0
    elif spec == "e1+e2":
        v[0] = v[1] = 1.0
    elif spec == "ones":
        v[:] = 1.0
    else:
        import ast

        vals = ast.literal_eval(spec)
        v = np.asarray([complex(x) for x in vals], dtype=np.complex128)
        if v.size != n:
            raise ConfigError(f"vector length {v.size} != n = {n}")
    return v / np.linalg.norm(v)


# ----------------------------------------------------------------------
# tail experiment
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class TailCurve:
    etas: tuple[float, ...]
    probs: tuple[float, ...]
    counts: tuple[int, ...]
    intervals: tuple[tuple[float, float], ...]
    trials: int
    failures: int
    slope: float | None  # over well-populated points of the whole grid


def tail_experiment(cfg: ExperimentConfig) -> tuple[TailCurve, list[TrialRecord]]:
    """Per-trial least singular values of shift + noise, aggregated into an
    empirical lower-tail CDF on the eta grid with Wilson 99% intervals."""
    cfg.validate()
    law = EntryLaw.from_spec(cfg.law)
    n = cfg.n
    M = shift_matrix(cfg.shift, n)
    etas = cfg.eta_grid or tuple(np.geomspace(1e-4, 1e-1, 16))

    def one(stream_id: int):
        t0 = time.perf_counter()
        ens = sample_ensemble(n, M, law, RandomStream(cfg.seed, stream_id))
        try:
            s = spectral(ens.composite)
        except SpectralBackendError:
            return TrialRecord(cfg.kind, n, cfg.law, cfg.seed, stream_id, "failure", math.nan)
        return TrialRecord(
            cfg.kind, n, cfg.law, cfg.seed, stream_id, "s_min", s.s_min, time.perf_counter() - t0
        )

    records = run_trials(one, cfg.trials, cfg.threads)
    values = np.array([r.value for r in records if r.observable == "s_min"])
    failures = sum(1 for r in records if r.observable == "failure")
    counts = tuple(int((values <= e).sum()) for e in etas)
    m = values.size
    probs = tuple(c / m for c in counts)
    cis = tuple(wilson_interval(c, m) for c in counts)
    slope = fit_loglog_slope(etas, probs, counts)
    return TailCurve(tuple(etas), probs, counts, cis, m, failures, slope), records


# ----------------------------------------------------------------------
# single-vector invertibility
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SingleVectorReport:
    ns: tuple[int, ...]
    q_hats: tuple[float, ...]
    counts: tuple[int, ...]
    trials: int
    c_threshold: float
    slope: float | None  # of log q_n vs n over well-populated points


def single_vector_experiment(cfg: ExperimentConfig) -> tuple[SingleVectorReport, list[TrialRecord]]:
    """q_n = Pr(||(M+N)v||_2 <= c sqrt(n)) for each n; only the columns in
    supp(v) are ever touched, so sampling draws exactly those."""
    cfg.validate()
    law = EntryLaw.from_spec(cfg.law)
    ns = cfg.n_list or tuple(range(10, 41))
    records: list[TrialRecord] = []
    q_hats: list[float] = []
    counts: list[int] = []
    for idx, n in enumerate(ns):
        v = unit_vector(cfg.vector, n)
        supp = np.nonzero(v)[0]
        M = shift_matrix(cfg.shift, n)
        Mv = M @ v
        stream = RandomStream(cfg.seed, idx)
        draws = sample(law, stream, cfg.trials * n * supp.size).reshape(cfg.trials, n, supp.size)
        norms = np.linalg.norm(Mv[None, :] + draws @ v[supp], axis=1)
        k = int((norms <= cfg.c_threshold * math.sqrt(n)).sum())
        q = k / cfg.trials
        q_hats.append(q)
        counts.append(k)
        records.append(TrialRecord(cfg.kind, n, cfg.law, cfg.seed, idx, "q_n", q))
    eligible = [(n, q, c) for n, q, c in zip(ns, q_hats, counts) if c >= 20 and q > 0]
    slope = None
    if len(eligible) >= 2:
        xs = np.array([e[0] for e in eligible], dtype=float)
        ys = np.log([e[1] for e in eligible])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return SingleVectorReport(tuple(ns), tuple(q_hats), tuple(counts), cfg.trials, cfg.c_threshold, slope), records


# ----------------------------------------------------------------------
# empirical spectral distribution
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class EsdHistogram:
    eigenvalues: np.ndarray
    edges: np.ndarray  # shared x/y edges over [-1.5, 1.5]
    cell_counts: np.ndarray
    out_of_range: int
    discrepancy: float  # sup over cells of |empirical - uniform-disc| mass
    radial_r: tuple[float, ...]
    radial_F: tuple[float, ...]


def uniform_disc_cell_mass(x0: float, x1: float, y0: float, y1: float, sub: int = 200) -> float:
    """Mass of the uniform unit-disc law on a rectangle, by midpoint subgrid."""
    xs = np.linspace(x0, x1, sub, endpoint=False) + (x1 - x0) / (2 * sub)
    ys = np.linspace(y0, y1, sub, endpoint=False) + (y1 - y0) / (2 * sub)
    X, Y = np.meshgrid(xs, ys)
    return float((X * X + Y * Y <= 1.0).mean() * (x1 - x0) * (y1 - y0) / math.pi)


def esd_histogram(points: np.ndarray, cells: int = 10) -> EsdHistogram:
    edges = np.linspace(-1.5, 1.5, cells + 1)
    n = points.size
    counts = np.zeros((cells, cells), dtype=np.int64)
    disc = 0.0
    for i in range(cells):
        for j in range(cells):
            inside = (
                (points.real >= edges[i])
                & (points.real < edges[i + 1])
                & (points.imag >= edges[j])
                & (points.imag < edges[j + 1])
            )
            counts[i, j] = int(inside.sum())
            truth = uniform_disc_cell_mass(edges[i], edges[i + 1], edges[j], edges[j + 1])
            disc = max(disc, abs(counts[i, j] / n - truth))
    out = int(n - counts.sum())
    rs = tuple(np.linspace(0.1, 1.5, 15))
    Fs = tuple(float(np.mean(np.abs(points) <= r)) for r in rs)
    return EsdHistogram(points, edges, counts, out, disc, rs, Fs)


def esd_experiment(cfg: ExperimentConfig) -> tuple[EsdHistogram, list[TrialRecord]]:
    """Eigenvalues of noise/(sigma sqrt(n)) against the uniform disc law."""
    cfg.validate()
    if cfg.n > 1024:
        raise ConfigError("esd experiment is capped at n = 1024")
    law = EntryLaw.from_spec(cfg.law)
    ens = sample_ensemble(cfg.n, None, law, RandomStream(cfg.seed, 0))
    summary = spectral(ens.noise)
    sigma = math.sqrt(law.variance)
    lam = summary.eigenvalues / (sigma * math.sqrt(cfg.n))
    hist = esd_histogram(lam, cfg.grid_cells)
    records = [
        TrialRecord(cfg.kind, cfg.n, cfg.law, cfg.seed, k, "eigenvalue_re", float(z.real))
        for k, z in enumerate(lam)
    ]
    records += [
        TrialRecord(cfg.kind, cfg.n, cfg.law, cfg.seed, k, "eigenvalue_im", float(z.imag))
        for k, z in enumerate(lam)
    ]
    return hist, records


# ----------------------------------------------------------------------
# norm control
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class NormControlReport:
    n: int
    eps: float
    trials: int
    complement_ok_rate: float  # |I^c| <= 2 n^(1-eps)
    complement_max: int
    part1_norm_ok_rate: float  # row-l1 upper bound vs C n^(1+eps)
    part1_C: float
    part2: dict[float, tuple[float, float]]  # delta -> (ok rate, C used)
    perm_max_sign_norm: float
    perm_threshold: float
    perm_samples: int
    tail_ts: tuple[float, ...]
    tail_empirical: tuple[float, ...]
    tail_bounds: tuple[float, ...]


def conforming_matrix(n: int, m: int, eps: float, law: EntryLaw, stream: RandomStream) -> np.ndarray:
    """A fixed n x m sample adjusted to satisfy the row bounds: every row sum
    is zeroed and rows are rescaled onto the l2 budget when they exceed it."""
    b = sample(law, stream, n * m).reshape(n, m)
    b = b - b.mean(axis=1, keepdims=True)
    budget = n**eps * math.sqrt(m)
    norms = np.linalg.norm(b, axis=1)
    over = norms > budget
    b[over] = b[over] * (budget / norms[over, None])
    return b


def norm_control_experiment(cfg: ExperimentConfig) -> tuple[NormControlReport, list[TrialRecord]]:
    cfg.validate()
    law = EntryLaw.from_spec(cfg.law)
    n, eps = cfg.n, cfg.eps
    if n > 256:
        raise ConfigError("norm control part 1 is capped at n = 256")
    C1 = cfg.bound_C
    records: list[TrialRecord] = []

    comp_ok = 0
    comp_max = 0
    norm_ok = 0
    part2_ok = {cfg.delta1: 0, cfg.delta2: 0}
    for t in range(cfg.trials):
        stream = RandomStream(cfg.seed, t)
        ens = sample_ensemble(n, None, law, stream)
        sel = select_good_rows(ens.noise, eps)
        bad = sel.complement_size
        comp_max = max(comp_max, bad)
        comp_ok += bad <= 2 * n ** (1 - eps)
        up = inf_to_2_upper(project_rows(ens.noise, sel))
        norm_ok += up <= C1 * n ** (1 + eps)
        records.append(TrialRecord(cfg.kind, n, cfg.law, cfg.seed, t, "complement_size", bad))
        records.append(TrialRecord(cfg.kind, n, cfg.law, cfg.seed, t, "row_l1_upper", up))
        gen = stream.generator()
        for delta in (cfg.delta1, cfg.delta2):
            m = max(1, round(n ** (1 - delta)))
            J = np.sort(gen.choice(n, size=m, replace=False))
            sub = ens.noise[:, J]
            selJ = select_good_rows(sub, eps)
            upJ = inf_to_2_upper(project_rows(sub, selJ))
            part2_ok[delta] += upJ <= C1 * n ** (1 + eps - 0.5 * delta)
            records.append(
                TrialRecord(cfg.kind, n, cfg.law, cfg.seed, t, f"row_l1_upper_delta_{delta}", upJ)
            )

    # permutation sub-experiment at fixed 12x12 with exhaustive sign norms
    pm, pn = 12, 12
    B = conforming_matrix(pm, pn, eps, law, RandomStream(cfg.seed, 10**6))
    S = _sign_matrix(pn)
    perm_samples = min(10**4, max(cfg.trials, 100))
    mx = 0.0
    for t in range(perm_samples):
        Bt = permute_rows_independently(B, RandomStream(cfg.seed, 10**6 + 1 + t))
        prod = Bt @ S
        mx = max(mx, float(np.sqrt((prod.real**2 + prod.imag**2).sum(axis=0)).max()))
    perm_threshold = 20 * math.sqrt(pm * pn) * pn**eps

    # permutation tail domination for a fixed functional f(pi) = sum v_pi(j) y_j
    gen = RandomStream(cfg.seed, 10**6 - 1).generator()
    y = gen.standard_normal(pn) + 1j * gen.standard_normal(pn)
    v = np.where(gen.random(pn) < 0.5, 1.0, -1.0)
    perms = np.array([gen.permutation(pn) for _ in range(10**5)])
    f = (v[perms] * y[None, :]).sum(axis=1)
    dev = np.abs(f - f.mean())
    ny = float(np.linalg.norm(y))
    ts = tuple(k * ny for k in (1, 2, 3))
    emp = tuple(float(np.mean(dev >= t)) for t in ts)
    bounds = tuple(4 * math.exp(-t * t / (128 * ny * ny)) for t in ts)

    report = NormControlReport(
        n,
        eps,
        cfg.trials,
        comp_ok / cfg.trials,
        comp_max,
        norm_ok / cfg.trials,
        C1,
        {d: (k / cfg.trials, C1) for d, k in part2_ok.items()},
        mx,
        perm_threshold,
        perm_samples,
        ts,
        emp,
        bounds,
    )
    return report, records


# ----------------------------------------------------------------------
# gamma classification tail experiment
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GammaTailReport:
    n: int
    eta: float
    counts: dict[str, int]
    gamma1_checks: int
    gamma1_failures: int
    gamma1_vacuous: int
    gamma2_checks: int
    gamma2_failures: int


def gamma_tail_experiment(cfg: ExperimentConfig) -> tuple[GammaTailReport, list[TrialRecord]]:
    """Classify sampled unit vectors; certified gamma1 vectors get a
    directional concentration check against the LCD bound, gamma2 witnesses
    get the rounding decomposition invariants."""
    cfg.validate()
    n = cfg.n
    if n > 64:
        raise ConfigError("gamma experiment is capped at n = 64 (lcd search cost)")
    law = EntryLaw.from_spec(cfg.law)
    gamma, alpha = n**-0.5, n**0.01
    params = LcdParams(gamma, alpha, theta_max=16.0, radial_step=0.02, refine_depth=0)
    counts = {"gamma1": 0, "gamma2": 0, "undetermined": 0}
    g1_checks = g1_fail = g1_vac = 0
    g2_checks = g2_fail = 0
    records: list[TrialRecord] = []
    for t in range(cfg.trials):
        stream = RandomStream(cfg.seed, t)
        gen = stream.generator()
        if gen.random() < cfg.gamma2_fraction:
            a = lattice_adjacent_unit_vector(n, RandomStream(cfg.seed, 10**6 + t), gamma, alpha, support_size=max(4, n // 4))
        else:
            g = gen.standard_normal(n) + 1j * gen.standard_normal(n)
            a = g / np.linalg.norm(g)
        cls = classify_gamma(a, cfg.eta, params)
        counts[cls.klass] += 1
        records.append(TrialRecord(cfg.kind, n, cfg.law, cfg.seed, t, f"class_{cls.klass}", 1.0))
        if cls.klass == "gamma1":
            g1_checks += 1
            delta = 2 * math.sqrt(n) * cfg.eta
            lcd_val = max(cls.lcd.certified_lower, cls.threshold)
            bound = lcd_rho_bound(
                LcdBoundQuery(delta, alpha, gamma, lcd_val, n, cfg.bound_C)
            )
            g1_vac += bound.vacuous
            est = rho_mc(ConcentrationQuery(a, delta, law), 2000, RandomStream(cfg.seed, 2 * 10**6 + t))
            if est.rho_hat > bound.value + 1e-12:
                g1_fail += 1
        elif cls.klass == "gamma2":
            g2_checks += 1
            res = cls.lcd
            try:
                dec = rounding_decomposition(a, res.witness_theta, res.witness_w, gamma, alpha)
                e = res.witness_theta * a - res.witness_w
                ok = (
                    np.array_equal(dec.v_sp + dec.v_ss + dec.v_sm, e)
                    and np.linalg.norm(res.witness_w) >= abs(res.witness_theta) * (1 - gamma) - 1e-9
                )
            except Exception:
                ok = False
            if not ok:
                g2_fail += 1
    report = GammaTailReport(
        n, cfg.eta, counts, g1_checks, g1_fail, g1_vac, g2_checks, g2_fail
    )
    return report, records


# ----------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------


def write_jsonl(records: list[TrialRecord], path: str | Path) -> None:
    recs = sorted(records, key=lambda r: (r.stream_id, r.observable))
    Path(path).write_text("\n".join(r.to_json() for r in recs) + "\n")


def write_tail_csv(curve: TailCurve, path: str | Path) -> None:
    lines = ["eta,prob,count,ci_lo,ci_hi"]
    for e, p, c, (lo, hi) in zip(curve.etas, curve.probs, curve.counts, curve.intervals):
        lines.append(f"{e!r},{p!r},{c},{lo!r},{hi!r}")
    Path(path).write_text("\n".join(lines) + "\n")
