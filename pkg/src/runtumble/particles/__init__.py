"""Monte Carlo simulation of the velocity-jump process."""

__all__ = [
    'BLOCK_SIZE',
    'ConfinementSeries',
    'EnsembleHistogram',
    'JumpStatistics',
    'Marginal',
    'ParticleEnsemble',
    'block_rng',
    'confinement_series',
    'ensemble_histogram',
    'jump_statistics',
    'particles_step',
    'poisson_thinning',
    'read_binary',
    'uniform_ball_sample',
    'velocity_bins',
    'write_binary',
    'write_csv',
]

from .confinement import ConfinementSeries, confinement_series
from .ensemble import ParticleEnsemble, block_rng, uniform_ball_sample
from .histogram import EnsembleHistogram, Marginal, ensemble_histogram, velocity_bins
from .io import read_binary, write_binary, write_csv
from .thinning import (
    BLOCK_SIZE,
    JumpStatistics,
    jump_statistics,
    particles_step,
    poisson_thinning,
)
