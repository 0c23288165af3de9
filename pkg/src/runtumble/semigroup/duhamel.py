"""Time convolution `(S_a * C S_b)(t) f = int_0^t S_a(t - s) C S_b(s) f ds`.

With `u_n = S_b(t_n) f` sampled on a uniform grid of step `h`, the trapezoid rule
gives the recursion

    I_(n+1) = S_a(h) [I_n + (h/2) C u_n] + (h/2) C u_(n+1),    I_0 = 0,

one application of `S_a(h)` per step.
"""

import logging
from collections.abc import Callable

import numpy as np

from runtumble.errors import ConfigError
from runtumble.model import DistributionField

from .generator import GeneratorMatrix
from .integrator import EvolutionTrace

logger = logging.getLogger(__name__)

Evolution = Callable[[DistributionField, float], DistributionField]
Operator = GeneratorMatrix | Callable[[DistributionField], DistributionField]


def duhamel_convolve(
    outer: Evolution,
    inner: Operator,
    trace: EvolutionTrace,
    *,
    include_free: bool = True,
) -> EvolutionTrace:
    """Convolve an evolution with `inner` applied to the snapshots of `trace`.

    Parameters
    ----------
    outer
        `S_a`, called as `outer(f, t)`; for instance `semigroup_of(gen)` or
        `functools.partial(b0_evolve_exact, chi=chi)`.
    inner
        `C`: a generator (its `apply` is used) or any linear map on fields.
    trace
        Evolution `u = S_b f` with snapshots at uniform times starting at 0.
    include_free
        Add the free term `S_a(t) f`, so that the result is the right-hand side
        of `S_b = S_a + S_a * C S_b` when `b = a + C`.

    Returns
    -------
    EvolutionTrace
        Snapshots at the times of `trace.snapshots`, with the `mass` and `l1`
        series of the result (`min` and `leak` are left `nan`).

    Raises
    ------
    ConfigError
        If `trace` has fewer than one snapshot, does not start at 0, or its
        snapshot times are not uniform.
    """
    times = np.asarray(trace.snapshot_times, dtype=float)
    if len(trace.snapshots) == 0 or times.size == 0:
        raise ConfigError('the trace holds no snapshots', field='trace')
    if times[0] != 0.0:
        raise ConfigError('the snapshots must start at t = 0', field='trace')
    steps = np.diff(times)
    h = float(steps[0]) if steps.size else 0.0
    if steps.size and not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ConfigError('the snapshot times are not uniformly spaced', field='trace')

    def C(f: DistributionField) -> DistributionField:
        if isinstance(inner, GeneratorMatrix):
            if inner.grid != f.grid:
                raise ConfigError('inner operator and trace live on different grids')
            return f.with_values(inner.apply(f.values))
        return inner(f)

    f0 = trace.snapshots[0]
    total = f0 if include_free else DistributionField.zeros(f0.grid)
    results = [total]
    Cu = C(f0)
    for n, u_next in enumerate(trace.snapshots[1:], start=1):
        carried = outer(total + (0.5 * h) * Cu, h)
        Cu = C(u_next)
        total = carried + (0.5 * h) * Cu
        results.append(total)
        logger.debug('duhamel step %d/%d', n, len(trace.snapshots) - 1)

    mass = np.asarray([f.integrate() for f in results])
    l1 = np.asarray([abs(f).integrate() for f in results])
    nan = np.full(len(results), np.nan)
    return EvolutionTrace(
        times=times.copy(),
        series={'mass': mass, 'l1': l1, 'min': nan, 'leak': nan.copy()},
        final=results[-1],
        dt=h,
        steps=len(results) - 1,
        snapshot_times=times.copy(),
        snapshots=results,
    )
