"""Spectral gap of the discrete generator, measured two ways.

The dynamic estimate evolves random fields of zero mass (projected away from the
steady state) and fits their exponential decay; the worst (largest) slope is the
gap estimate. The Krylov estimate runs shift-invert Arnoldi on the assembled
sparse generator and reports its rightmost eigenvalues.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import linalg as splinalg

from runtumble.errors import ConfigError
from runtumble.model import DistributionField
from runtumble.semigroup import DtPolicy, GeneratorMatrix, evolve

from .fitting import RateFit, fit_decay
from .norms import projection_perp
from .steady import SteadyState

logger = logging.getLogger(__name__)

DEFAULT_NCV = 60


@dataclass(frozen=True)
class SpectralGapReport:
    """Both estimates of the spectral gap.

    Attributes
    ----------
    fits
        Decay fit of each probe.
    dynamic_gap
        Largest fitted slope, the dynamic gap estimate (negative when decaying).
    flagged
        Probes whose fitted slope is nonnegative.
    eigenvalues
        Rightmost eigenvalues of the sparse generator, by decreasing real part;
        empty if the Krylov estimate was skipped.
    """

    fits: list[RateFit]
    dynamic_gap: float
    flagged: list[int] = field(default_factory=list)
    eigenvalues: list[complex] = field(default_factory=list)

    @property
    def krylov_gap(self) -> float | None:
        """Real part of the second rightmost eigenvalue."""
        if len(self.eigenvalues) < 2:
            return None
        return float(self.eigenvalues[1].real)

    @property
    def relative_disagreement(self) -> float | None:
        gap = self.krylov_gap
        if gap is None or gap == 0:
            return None
        return abs(self.dynamic_gap - gap) / abs(gap)

    def to_dict(self) -> dict[str, object]:
        return {
            'slopes': [fit.slope for fit in self.fits],
            'r_squared': [fit.r_squared for fit in self.fits],
            'dynamic_gap': self.dynamic_gap,
            'flagged': list(self.flagged),
            'eigenvalues': [[z.real, z.imag] for z in self.eigenvalues],
            'krylov_gap': self.krylov_gap,
            'relative_disagreement': self.relative_disagreement,
        }


def rightmost_eigenvalues(
    gen: GeneratorMatrix, k: int = 6, *, sigma: float = 1e-3, ncv: int = DEFAULT_NCV
) -> list[complex]:
    """The `k` eigenvalues of the sparse generator nearest `sigma`, rightmost first.

    With a small positive shift these include the eigenvalue near 0 and the next
    ones to its left.
    """
    A = gen.to_sparse().tocsc()
    n = A.shape[0]
    if not 1 <= k < n - 1:
        raise ConfigError(f'k must lie in [1, {n - 2}], got {k}', field='k')
    ncv = min(max(ncv, 2 * k + 1), n - 1)
    values = splinalg.eigs(A, k=k, sigma=sigma, which='LM', ncv=ncv, return_eigenvectors=False)
    ordered = sorted((complex(z) for z in values), key=lambda z: -z.real)
    logger.debug('rightmost eigenvalues: %s', ordered[:2])
    return ordered


def random_probes(
    steady: SteadyState, n_probes: int, seed: int = 0
) -> list[DistributionField]:
    """Random zero-mass fields `f - <<f>> G` under a Gaussian envelope."""
    G = steady.field
    grid = G.grid
    rng = np.random.default_rng(seed)
    r2 = np.sum(grid.x_nodes**2, axis=-1)
    envelope = np.exp(-r2 / (2.0 * (grid.L / 4.0) ** 2))[:, None]
    probes = []
    for _ in range(n_probes):
        f = G.with_values(rng.random(grid.shape) * envelope)
        probes.append(projection_perp(f, G))
    return probes


def spectral_gap(
    gen: GeneratorMatrix,
    steady: SteadyState,
    n_probes: int = 4,
    *,
    T: float = 60.0,
    seed: int = 0,
    krylov: bool = True,
    dt_policy: DtPolicy | None = None,
) -> SpectralGapReport:
    """Estimate the spectral gap of `gen`.

    Parameters
    ----------
    gen
        Generator with tag `L`.
    steady
        Its steady state.
    n_probes
        Number of random zero-mass probes.
    T
        Evolution time of each probe.
    seed
        Seed of the probe fields.
    krylov
        Also compute the rightmost eigenvalues (upwind generators only).
    dt_policy
        Time stepping of the probes.
    """
    if gen.tag != 'L':
        raise ConfigError(f'the spectral gap needs the full generator L, got {gen.tag}', field='tag')
    fits = []
    for probe in random_probes(steady, n_probes, seed):
        trace = evolve(gen, probe, T, dt_policy)
        fits.append(fit_decay(trace.times, trace.series['l1']))
    slopes = [fit.slope for fit in fits]
    flagged = [i for i, s in enumerate(slopes) if s >= 0]
    if flagged:
        logger.warning('probes %s do not decay (slopes %s)', flagged, [slopes[i] for i in flagged])
    eigenvalues = rightmost_eigenvalues(gen) if krylov and gen.is_linear else []
    report = SpectralGapReport(
        fits=fits, dynamic_gap=max(slopes), flagged=flagged, eigenvalues=eigenvalues
    )
    logger.info(
        'spectral gap: dynamic=%g krylov=%s', report.dynamic_gap, report.krylov_gap
    )
    return report
