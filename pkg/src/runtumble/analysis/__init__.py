"""Functionals, fits and probes of the evolutions."""

__all__ = [
    'AVERAGING_HORIZON',
    'DEFAULT_ETA',
    'HORIZON_DECAY_TIMES',
    'AveragingReport',
    'ConvergenceReport',
    'DispersionReport',
    'DissipativityReport',
    'FitMode',
    'HypoNorms',
    'LyapunovReport',
    'Moments',
    'NormEquivalence',
    'NormKind',
    'NormReport',
    'PolyDecayReport',
    'ProbeReport',
    'RateFit',
    'SpectralGapReport',
    'SteadyMethod',
    'SteadyState',
    'Verdict',
    'averaging_leakage',
    'averaging_probe',
    'averaging_ratio',
    'averaging_refinement',
    'b1_poly_decay_probe',
    'convergence_probe',
    'dispersion_probe',
    'dissipativity_probe',
    'embed_in_wider_box',
    'fit_decay',
    'gaussian_blob',
    'hhalf_report',
    'hhalf_seminorm',
    'hypo_norms',
    'l1_distance',
    'lyapunov_functional',
    'lyapunov_monitor',
    'mass',
    'moments',
    'norm_equivalence',
    'poly_initial',
    'projection_perp',
    'random_probes',
    'read_series_csv',
    'residual_l1',
    'resolved_width',
    'rightmost_eigenvalues',
    'single_mode_ratio',
    'spectral_gap',
    'steady_state',
    'symmetry_defect',
    'tail_exponent',
    'to_jsonable',
    'two_velocity_steady_profile',
    'verdict_of',
    'weighted_norm',
    'write_series_csv',
]

from .averaging import (
    AVERAGING_HORIZON,
    AveragingReport,
    averaging_leakage,
    averaging_probe,
    averaging_ratio,
    averaging_refinement,
    embed_in_wider_box,
    hhalf_report,
    hhalf_seminorm,
    single_mode_ratio,
)
from .fitting import FitMode, RateFit, fit_decay
from .hypocoercivity import (
    DEFAULT_ETA,
    HORIZON_DECAY_TIMES,
    HypoNorms,
    NormEquivalence,
    hypo_norms,
    norm_equivalence,
    tail_exponent,
)
from .lyapunov import LyapunovReport, lyapunov_functional, lyapunov_monitor
from .norms import (
    Moments,
    NormKind,
    NormReport,
    l1_distance,
    mass,
    moments,
    projection_perp,
    weighted_norm,
)
from .probes import (
    ConvergenceReport,
    DispersionReport,
    DissipativityReport,
    PolyDecayReport,
    b1_poly_decay_probe,
    convergence_probe,
    dispersion_probe,
    dissipativity_probe,
    gaussian_blob,
    poly_initial,
    resolved_width,
)
from .report import (
    ProbeReport,
    Verdict,
    read_series_csv,
    to_jsonable,
    verdict_of,
    write_series_csv,
)
from .spectral import SpectralGapReport, random_probes, rightmost_eigenvalues, spectral_gap
from .steady import (
    SteadyMethod,
    SteadyState,
    residual_l1,
    steady_state,
    symmetry_defect,
    two_velocity_steady_profile,
)
