"""Seeded experiments and exact oracles for least-singular-value tails of
complex random matrices: entry-law anti-concentration, LCD lattice geometry,
the sparse rounding decomposition, inverse Littlewood-Offord counting,
restricted infinity-to-2 norms, and tail / circular-law experiments."""

from .anticonc import (
    ConcentrationEstimate,
    ConcentrationQuery,
    EsseenBound,
    EsseenInputs,
    FourierBoundResult,
    LcdBoundQuery,
    PzResult,
    QuadratureSpec,
    RhoBound,
    esseen_bound,
    fourier_integral_bound,
    lcd_rho_bound,
    p_z,
    rho_exact,
    rho_mc,
    torus_norm_sq,
)
from .core import nearest_gaussian_lattice, norm
from .counting import (
    CountingBound,
    CountingBoundParams,
    LevelSetResult,
    RhoBucket,
    SparseSplit,
    bucket_by_rho,
    counting_bound,
    enumerate_level_set,
    is_prime,
    next_prime,
    phi_p,
    split_sparse,
)
from .laws import EntryLaw, GoodnessEstimate, SymmetrizedLaw, estimate_goodness, sample, symmetrize
from .lcd import (
    GammaClassification,
    LcdParams,
    LcdResult,
    RoundingDecomposition,
    classify_gamma,
    default_lcd_params,
    lattice_adjacent_unit_vector,
    lcd_search,
    rounding_decomposition,
)
from .rng import RandomStream, seeded_stream
from .spectral import (
    EnsembleSample,
    ProjectionSelection,
    SignNormResult,
    SpectralSummary,
    inf_to_2_sign_norm,
    inf_to_2_upper,
    op_norm_2,
    permute_rows_independently,
    project_cols,
    project_rows,
    sample_ensemble,
    select_good_rows,
    spectral,
)
from .stats import fit_loglog_slope, wilson_interval

__version__ = "0.1.0"
