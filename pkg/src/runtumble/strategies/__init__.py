"""Hypothesis strategies for grids, kernels, weights, fields and particles."""

__all__ = [
    'chis',
    'distribution_fields',
    'kernel_specs',
    'kernel_variants',
    'none_or',
    'particle_ensembles',
    'phase_grids',
    'weight_specs',
]

from .model import (
    chis,
    distribution_fields,
    kernel_specs,
    kernel_variants,
    none_or,
    phase_grids,
    weight_specs,
)
from .particles import particle_ensembles
