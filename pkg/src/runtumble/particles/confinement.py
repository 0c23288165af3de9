import logging
from dataclasses import dataclass

import numpy as np

from runtumble.errors import DomainError
from runtumble.model import KernelSpec
from runtumble.util import japanese_bracket

from .ensemble import ParticleEnsemble
from .thinning import particles_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfinementSeries:
    """Empirical exponential moment `<exp(gamma <x>)>` of an ensemble along time.

    Attributes
    ----------
    times
        Sampling times.
    mean
        Ensemble average at each time.
    stderr
        Monte Carlo standard error of `mean`.
    gamma
        Moment rate.
    """

    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    gamma: float

    def excess(self, t_ref: float) -> float:
        """Running maximum after `t_ref` minus the value at `t_ref`, in standard errors."""
        i = int(np.searchsorted(self.times, t_ref - 1e-12))
        if i >= self.times.size:
            raise DomainError(f't_ref = {t_ref:g} is past the last sample')
        after = self.mean[i:]
        scale = float(np.max(self.stderr[i:]))
        if scale == 0:
            return 0.0
        return float((after.max() - self.mean[i]) / scale)

    def bounded(self, t_ref: float, n_sigma: float = 3.0) -> bool:
        """Whether the moment stays within `n_sigma` standard errors of its value at `t_ref`."""
        return self.excess(t_ref) < n_sigma


def confinement_series(
    e: ParticleEnsemble,
    times: np.ndarray,
    kernel: KernelSpec | float,
    gamma: float,
    *,
    threads: int = 1,
) -> ConfinementSeries:
    """Step `e` through `times` and record `<exp(gamma <x>)>` at each.

    Parameters
    ----------
    e
        Initial ensemble, at a time not after `times[0]`.
    times
        Increasing sampling times.
    kernel
        Turning kernel or bias `chi`.
    gamma
        Moment rate, positive.
    threads
        Worker threads for `particles_step()`.
    """
    times = np.asarray(times, dtype=float)
    if not gamma > 0:
        raise DomainError(f'gamma must be positive, got {gamma!r}')
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < e.time:
        raise DomainError('times must be increasing and start at or after the ensemble time')
    mean = np.empty(times.size)
    stderr = np.empty(times.size)
    for k, t in enumerate(times):
        e = particles_step(e, float(t - e.time), kernel, threads=threads)
        m = np.exp(gamma * japanese_bracket(e.positions))
        mean[k] = m.mean()
        stderr[k] = m.std(ddof=1) / np.sqrt(e.n) if e.n > 1 else np.nan
        logger.debug('t=%g <m>=%g +- %g', t, mean[k], stderr[k])
    return ConfinementSeries(times=times, mean=mean, stderr=stderr, gamma=gamma)
