import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from runtumble.errors import ConfigError, DomainError, NumericalError, StabilityError
from runtumble.model import DistributionField
from runtumble.util import any_nonfinite_in_numpy_array

from .generator import CFL_POSITIVITY, GeneratorMatrix

logger = logging.getLogger(__name__)

Functional = Callable[[DistributionField], float]

BUILTIN_FUNCTIONALS = ('mass', 'l1', 'min', 'leak')


@dataclass(frozen=True)
class DtPolicy:
    """How `evolve()` chooses and records its time steps.

    Attributes
    ----------
    cfl
        CFL number in `(0, 1/2]` used when `dt` is not given.
    dt
        Requested step. Must satisfy the CFL bound of the generator.
    record_every
        Record the functionals every this many steps (and at the final time).
    snapshot_every
        Keep a copy of the field every this many steps (and at times 0 and `T`).
        No snapshots if `None`.
    """

    cfl: float = CFL_POSITIVITY
    dt: float | None = None
    record_every: int = 1
    snapshot_every: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.cfl <= CFL_POSITIVITY:
            raise StabilityError(
                f'cfl must lie in (0, {CFL_POSITIVITY:g}], got {self.cfl!r}',
                field='cfl',
            )
        if self.dt is not None and not self.dt > 0:
            raise ConfigError(f'dt must be positive, got {self.dt!r}', field='dt')
        if self.record_every < 1:
            raise ConfigError(
                f'record_every must be positive, got {self.record_every!r}',
                field='record_every',
            )
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ConfigError(
                f'snapshot_every must be positive, got {self.snapshot_every!r}',
                field='snapshot_every',
            )


@dataclass
class EvolutionTrace:
    """Recorded functionals and snapshots of one evolution.

    Attributes
    ----------
    times
        Recording times, strictly increasing, starting at 0.
    series
        Functional name to values at `times`. Always holds `mass`, `l1` (the
        integral of `|f|`), `min` and `leak` (mass lost through the boundary up
        to that time).
    snapshot_times
        Times of `snapshots`.
    snapshots
        Copies of the field.
    final
        The field at the final time.
    dt
        The uniform step.
    steps
        Number of steps.
    """

    times: np.ndarray
    series: dict[str, np.ndarray]
    final: DistributionField
    dt: float
    steps: int
    snapshot_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    snapshots: list[DistributionField] = field(default_factory=list)

    @property
    def mass(self) -> np.ndarray:
        return self.series['mass']

    @property
    def leak(self) -> np.ndarray:
        return self.series['leak']

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def functional(self, name: str) -> np.ndarray:
        try:
            return self.series[name]
        except KeyError:
            raise ConfigError(f'no recorded functional {name!r}') from None


def step_size(gen: GeneratorMatrix, T: float, policy: DtPolicy) -> tuple[float, int]:
    """The uniform step `T / n` and the number of steps `n`.

    Raises
    ------
    StabilityError
        If `policy.dt` exceeds the CFL bound.
    """
    if policy.dt is not None:
        gen.check_dt(policy.dt)
        target = policy.dt
    else:
        target = gen.max_stable_dt(policy.cfl)
    if not math.isfinite(target):
        return T, 1
    n = max(1, math.ceil(T / target - 1e-9))
    return T / n, n


def _ssp_rk3(
    gen: GeneratorMatrix, u: np.ndarray, dt: float
) -> tuple[np.ndarray, float]:
    """One Shu-Osher SSP-RK3 step and the mass leaked during it."""
    k1 = gen.apply(u)
    u1 = u + dt * k1
    k2 = gen.apply(u1)
    u2 = 0.75 * u + 0.25 * (u1 + dt * k2)
    k3 = gen.apply(u2)
    new = u / 3.0 + 2.0 / 3.0 * (u2 + dt * k3)
    leak = dt * (gen.outflux(u) / 6.0 + gen.outflux(u1) / 6.0 + 2.0 * gen.outflux(u2) / 3.0)
    return new, leak


def evolve(
    gen: GeneratorMatrix,
    f0: DistributionField,
    T: float,
    dt_policy: DtPolicy | None = None,
    *,
    functionals: Mapping[str, Functional] | None = None,
) -> EvolutionTrace:
    """Evolve `f0` under `gen` up to time `T` with SSP-RK3.

    The step is uniform and at most the CFL bound, so a nonnegative `f0` stays
    nonnegative whenever the generator's gain is nonnegative.

    Parameters
    ----------
    gen
        The discrete generator.
    f0
        Initial field on `gen.grid`.
    T
        Final time, nonnegative.
    dt_policy
        Step selection and recording; defaults to `DtPolicy()`.
    functionals
        Extra functionals recorded alongside the built-in ones.

    Returns
    -------
    EvolutionTrace

    Raises
    ------
    ConfigError
        If `f0` lives on another grid or a functional shadows a built-in one.
    StabilityError
        If the requested step violates the CFL bound.
    NumericalError
        If a non-finite value appears.

    Examples
    --------
    >>> from runtumble.model import KernelSpec, make_grid
    >>> from runtumble.semigroup import assemble_generator
    >>> grid = make_grid(1, L=4.0, n_x=32, n_v=4)
    >>> gen = assemble_generator('L', grid, KernelSpec(0.5))
    >>> f0 = DistributionField.from_function(grid, lambda x, v: np.exp(-x[..., 0] ** 2))
    >>> trace = evolve(gen, f0, 2.0)
    >>> trace.steps, round(trace.dt, 6)
    (6, 0.333333)
    >>> drift = trace.mass[-1] - trace.mass[0] + trace.leak[-1]
    >>> bool(abs(drift) < 1e-12), bool(trace.series['min'].min() >= 0)
    (True, True)
    """
    policy = dt_policy if dt_policy is not None else DtPolicy()
    if f0.grid != gen.grid:
        raise ConfigError('initial field and generator live on different grids')
    if T < 0:
        raise DomainError(f'T must be nonnegative, got {T!r}')
    extra = dict(functionals or {})
    clash = set(extra) & set(BUILTIN_FUNCTIONALS)
    if clash:
        raise ConfigError(f'functional names {sorted(clash)} are reserved')

    dt, n_steps = step_size(gen, T, policy) if T > 0 else (0.0, 0)
    grid = gen.grid
    abs_weight = grid.v_weights * grid.cell_volume

    times: list[float] = []
    records: dict[str, list[float]] = {name: [] for name in (*BUILTIN_FUNCTIONALS, *extra)}
    snapshot_times: list[float] = []
    snapshots: list[DistributionField] = []

    def record(u: np.ndarray, t: float, leaked: float) -> None:
        times.append(t)
        records['mass'].append(float(u.sum(axis=0) @ abs_weight))
        records['l1'].append(float(np.abs(u).sum(axis=0) @ abs_weight))
        records['min'].append(float(u.min()))
        records['leak'].append(leaked)
        if extra:
            f = f0.with_values(u)
            for name, fn in extra.items():
                records[name].append(float(fn(f)))

    def snapshot(u: np.ndarray, t: float) -> None:
        snapshot_times.append(t)
        snapshots.append(f0.with_values(u.copy()))

    u = f0.values.copy()
    leaked = 0.0
    record(u, 0.0, leaked)
    if policy.snapshot_every is not None:
        snapshot(u, 0.0)
    progress = max(1, n_steps // 10)
    for step in range(1, n_steps + 1):
        u, leak = _ssp_rk3(gen, u, dt)
        leaked += leak
        last = step == n_steps
        t = float(T) if last else step * dt
        if any_nonfinite_in_numpy_array(u):
            raise NumericalError(
                f'non-finite values under {gen.tag} (mass so far {records["mass"][-1]:g})',
                step=step,
                time=t,
            )
        if last or step % policy.record_every == 0:
            record(u, t, leaked)
        if policy.snapshot_every is not None and (last or step % policy.snapshot_every == 0):
            snapshot(u, t)
        if step % progress == 0:
            logger.debug('%s: step %d/%d t=%g', gen.tag, step, n_steps, t)

    logger.info(
        'evolved %s to T=%g in %d steps of %g (mass %g -> %g, leak %g)',
        gen.tag,
        T,
        n_steps,
        dt,
        records['mass'][0],
        records['mass'][-1],
        leaked,
    )
    return EvolutionTrace(
        times=np.asarray(times),
        series={name: np.asarray(values) for name, values in records.items()},
        final=f0.with_values(u),
        dt=dt,
        steps=n_steps,
        snapshot_times=np.asarray(snapshot_times),
        snapshots=snapshots,
    )


def semigroup_of(
    gen: GeneratorMatrix, dt_policy: DtPolicy | None = None
) -> Callable[[DistributionField, float], DistributionField]:
    """`(f, t) -> S(t) f` for the discrete evolution of `gen`."""

    def apply(f: DistributionField, t: float) -> DistributionField:
        return evolve(gen, f, t, dt_policy).final

    return apply
