"""Exact simulation of the velocity-jump process by thinning.

Candidate jump times come from a Poisson clock at the majorant rate
`1 + chi >= K`. A candidate at state `(x, v)` is accepted with probability
`K(x, v) / (1 + chi)`; on acceptance the velocity is redrawn uniformly on the
ball. Between candidates particles fly in straight lines.

Particles are processed in blocks of `BLOCK_SIZE`. Block `b` at step `c` draws
from its own stream keyed by `(seed, b, c)`, so results do not depend on the
number of threads.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import awkward as ak
import numpy as np

from runtumble.errors import DomainError
from runtumble.model import KernelSpec, kernel_eval
from runtumble.util import any_nonfinite_in_awkward_array, event_count, jagged_from_events

from .ensemble import ParticleEnsemble, block_rng, uniform_ball_sample

logger = logging.getLogger(__name__)

BLOCK_SIZE = 8192

RateFunction = Callable[[np.ndarray], np.ndarray]


def _next_candidates(
    rng: np.random.Generator, t: np.ndarray, majorant: float
) -> np.ndarray:
    """Next candidate times of independent Poisson clocks at rate `majorant`."""
    return t + rng.exponential(1.0 / majorant, size=t.shape)


def _accept(rng: np.random.Generator, rates: np.ndarray, majorant: float) -> np.ndarray:
    """Thinning acceptance mask for candidates with the given rates."""
    if np.any(rates > majorant * (1.0 + 1e-12)) or np.any(rates < 0):
        raise DomainError(f'rates must lie in [0, {majorant:g}]')
    return rng.random(rates.shape) * majorant < rates


def poisson_thinning(
    rate: RateFunction,
    majorant: float,
    horizon: float,
    n: int,
    rng: np.random.Generator,
) -> ak.Array:
    """Event times of `n` independent Poisson processes with a bounded rate.

    Parameters
    ----------
    rate
        Intensity as a function of time, vectorized, with values in
        `[0, majorant]`.
    majorant
        Upper bound of `rate`.
    horizon
        Simulate on `[0, horizon)`.
    n
        Number of independent realizations.
    rng
        Random generator.

    Returns
    -------
    ak.Array
        `n` sorted lists of event times.

    Examples
    --------
    >>> rng = np.random.default_rng(0)
    >>> events = poisson_thinning(lambda t: np.full(t.shape, 0.5), 1.0, 10.0, 3, rng)
    >>> len(events), bool(ak.all(events < 10.0))
    (3, True)
    """
    if not majorant > 0:
        raise DomainError(f'majorant must be positive, got {majorant!r}')
    if horizon < 0:
        raise DomainError(f'horizon must be nonnegative, got {horizon!r}')
    t = np.zeros(n)
    active = np.arange(n)
    owners: list[np.ndarray] = []
    times: list[np.ndarray] = []
    while active.size:
        candidates = _next_candidates(rng, t[active], majorant)
        alive = candidates < horizon
        active = active[alive]
        t[active] = candidates[alive]
        accepted = _accept(rng, np.asarray(rate(t[active]), dtype=float), majorant)
        owners.append(active[accepted])
        times.append(t[active[accepted]])
    return jagged_from_events(
        np.concatenate(owners) if owners else np.zeros(0, dtype=np.int64),
        np.concatenate(times) if times else np.zeros(0),
        n,
    )


def _advance_block(
    positions: np.ndarray,
    velocities: np.ndarray,
    T: float,
    kernel: KernelSpec,
    v_max: float,
    rng: np.random.Generator,
    record_jumps: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    x = positions.copy()
    v = velocities.copy()
    n, dim = x.shape
    majorant = 1.0 + kernel.chi
    t = np.zeros(n)
    active = np.arange(n)
    owners: list[np.ndarray] = []
    times: list[np.ndarray] = []
    while active.size:
        candidates = _next_candidates(rng, t[active], majorant)
        done = candidates >= T
        finished = active[done]
        x[finished] += v[finished] * (T - t[finished])[:, None]
        t[finished] = T
        active = active[~done]
        candidates = candidates[~done]
        x[active] += v[active] * (candidates - t[active])[:, None]
        t[active] = candidates
        rates = kernel_eval(kernel, x[active], v[active], v_max=v_max)
        jumped = active[_accept(rng, rates, majorant)]
        v[jumped] = uniform_ball_sample(rng, dim, jumped.size, v0=v_max)
        if record_jumps:
            owners.append(jumped)
            times.append(t[jumped])
    if owners:
        return x, v, np.concatenate(owners), np.concatenate(times)
    return x, v, np.zeros(0, dtype=np.int64), np.zeros(0)


def particles_step(
    e: ParticleEnsemble,
    T: float,
    kernel: KernelSpec | float,
    *,
    record_jumps: bool = False,
    threads: int = 1,
) -> ParticleEnsemble:
    """Advance every particle of `e` by time `T`.

    Parameters
    ----------
    e
        The ensemble.
    T
        Time increment, nonnegative. `T = 0` returns `e` unchanged.
    kernel
        Turning kernel, or the bias `chi` of the sharp kernel.
    record_jumps
        Store the absolute jump times of each particle in `jumps` of the result.
    threads
        Number of worker threads. Does not affect the result.

    Returns
    -------
    ParticleEnsemble
        With `time` advanced by `T` and `counter` by one.

    Examples
    --------
    >>> e = ParticleEnsemble.at_origin(100, 1, seed=3)
    >>> a = particles_step(e, 2.0, 0.5, record_jumps=True)
    >>> b = particles_step(e, 2.0, 0.5, record_jumps=True, threads=4)
    >>> bool(np.array_equal(a.positions, b.positions)), a.time, a.counter
    (True, 2.0, 1)
    >>> bool(np.all(np.abs(a.positions) <= 2.0 * 0.5))
    True
    """
    if T < 0:
        raise DomainError(f'T must be nonnegative, got {T!r}')
    if threads < 1:
        raise DomainError(f'threads must be positive, got {threads!r}')
    if T == 0:
        return e
    spec = kernel if isinstance(kernel, KernelSpec) else KernelSpec(float(kernel))
    v_max = float(e.v_max) if e.v_max is not None else 0.0
    starts = list(range(0, e.n, BLOCK_SIZE))

    def run(block: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        lo = starts[block]
        hi = min(lo + BLOCK_SIZE, e.n)
        rng = block_rng(e.seed, block, e.counter)
        x, v, owner, t = _advance_block(
            e.positions[lo:hi], e.velocities[lo:hi], T, spec, v_max, rng, record_jumps
        )
        return x, v, owner + lo, t

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run, range(len(starts))))

    positions = np.concatenate([r[0] for r in results]) if results else e.positions
    velocities = np.concatenate([r[1] for r in results]) if results else e.velocities
    jumps = None
    if record_jumps:
        owner = np.concatenate([r[2] for r in results]) if results else np.zeros(0, int)
        t = np.concatenate([r[3] for r in results]) if results else np.zeros(0)
        jumps = jagged_from_events(owner, e.time + t, e.n)
        logger.debug('recorded %d jumps of %d particles', event_count(jumps), e.n)
    logger.info('advanced %d particles from t=%g to t=%g', e.n, e.time, e.time + T)
    return replace(
        e,
        positions=positions,
        velocities=velocities,
        counter=e.counter + 1,
        time=e.time + T,
        jumps=jumps,
    )


@dataclass(frozen=True)
class JumpStatistics:
    """Summary of recorded jump times over a window of length `T`.

    Attributes
    ----------
    n_particles
        Number of particles.
    total
        Total number of jumps.
    rate
        Jumps per particle per unit time.
    stderr
        Standard error of `rate` from the spread of per-particle counts.
    """

    n_particles: int
    total: int
    rate: float
    stderr: float


def jump_statistics(jumps: ak.Array, T: float) -> JumpStatistics:
    """Empirical jump rate of a jagged array of jump times.

    Examples
    --------
    >>> s = jump_statistics(ak.Array([[0.5, 1.0], [0.2, 0.3]]), 2.0)
    >>> s.total, s.rate
    (4, 1.0)
    """
    if not T > 0:
        raise DomainError(f'T must be positive, got {T!r}')
    if any_nonfinite_in_awkward_array(jumps):
        raise DomainError('jump times must be finite')
    counts = ak.to_numpy(ak.num(jumps, axis=1)).astype(float)
    n = counts.size
    rate = float(counts.mean() / T) if n else 0.0
    stderr = float(counts.std(ddof=1) / T / np.sqrt(n)) if n > 1 else float('nan')
    return JumpStatistics(n_particles=n, total=int(counts.sum()), rate=rate, stderr=stderr)
