"""Phase-space discretization, turning kernels, weights and closed-form constants."""

__all__ = [
    'DistributionField',
    'DriftCertificate',
    'Exponential',
    'KernelSpec',
    'KernelVariant',
    'ModelConstants',
    'Mu',
    'Nu',
    'PhaseFunction',
    'PhaseGrid',
    'Polynomial',
    'Regularized',
    'Sharp',
    'Surgical',
    'TildeExp',
    'TildePoly',
    'TruncatedGainComplement',
    'WeightSpec',
    'ball_radius',
    'check_sandwich',
    'cutoff_phi',
    'decay_exponent',
    'drift_alpha',
    'drift_certificate',
    'drift_probe_points',
    'dual_generator_on_tilde',
    'first_abs_moment',
    'kernel_eval',
    'make_grid',
    'max_confinement_gamma',
    'model_constants',
    'phi_annulus',
    'psi_velocity',
    'theta_rate',
    'tilde_sandwich_delta',
    'two_velocity_grid',
    'weight_eval',
    'weight_on_grid',
    'weight_to_dict',
    'zeta_reg',
]

from .constants import (
    ModelConstants,
    ball_radius,
    decay_exponent,
    first_abs_moment,
    model_constants,
)
from .drift import (
    DriftCertificate,
    drift_alpha,
    drift_certificate,
    drift_probe_points,
    dual_generator_on_tilde,
    max_confinement_gamma,
)
from .field import DistributionField, PhaseFunction
from .grid import PhaseGrid, make_grid, two_velocity_grid
from .kernel import (
    KernelSpec,
    KernelVariant,
    Regularized,
    Sharp,
    Surgical,
    TruncatedGainComplement,
    cutoff_phi,
    kernel_eval,
    phi_annulus,
    psi_velocity,
    zeta_reg,
)
from .weight import (
    Exponential,
    Mu,
    Nu,
    Polynomial,
    TildeExp,
    TildePoly,
    WeightSpec,
    check_sandwich,
    theta_rate,
    tilde_sandwich_delta,
    weight_eval,
    weight_on_grid,
    weight_to_dict,
)
