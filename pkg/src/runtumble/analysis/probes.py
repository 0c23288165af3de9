"""Decay and dispersion experiments built on the evolutions and functionals.

- `dispersion_probe()`: the `t^-d` gain of the velocity average of `S_B0(t)`.
- `b1_poly_decay_probe()`: polynomial decay of `S_B1(t)` from `L1_k` into `L1_l`.
- `convergence_probe()`: exponential relaxation to `<<f0>> G`, with a rate
  independent of `f0`.
- `dissipativity_probe()`: `N(f)` along the evolution of the dissipative part.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from runtumble.errors import ConfigError, DomainError
from runtumble.model import (
    DistributionField,
    Exponential,
    KernelSpec,
    PhaseGrid,
    Polynomial,
    WeightSpec,
    model_constants,
    weight_on_grid,
)
from runtumble.semigroup import (
    DtPolicy,
    GeneratorMatrix,
    Scheme,
    assemble_generator,
    averaging_apply,
    b0_evolve_exact,
    evolve,
    step_size,
)
from runtumble.semigroup.generator import SpatialWeight

from .fitting import RateFit, fit_decay
from .hypocoercivity import DEFAULT_ETA, hypo_norms
from .norms import l1_distance, mass, weighted_norm
from .steady import SteadyState

logger = logging.getLogger(__name__)

POLY_DECAY_SLACK = 0.3
DISPERSION_BOUND_FACTOR = 3.0
CONVERGENCE_SPREAD = 0.1
CONVERGENCE_R_SQUARED = 0.99


def gaussian_blob(
    grid: PhaseGrid, center: Sequence[float] | float, width: float
) -> DistributionField:
    """A velocity-independent Gaussian of mass 1 centered at `center`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=4.0, n_x=64, n_v=4)
    >>> round(mass(gaussian_blob(grid, 1.0, 0.5)), 12)
    1.0
    """
    c = np.zeros(grid.dim)
    c[:] = np.asarray(center, dtype=float)
    if not width > 0:
        raise DomainError(f'width must be positive, got {width!r}')

    def profile(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        r2 = np.sum((x - c) ** 2, axis=-1)
        return np.exp(-r2 / (2.0 * width**2)) * np.ones(v.shape[:-1])

    f = DistributionField.from_function(grid, profile)
    return f * (1.0 / mass(f))


def _velocity_spacing(grid: PhaseGrid) -> float:
    match grid.dim:
        case 1:
            return 2.0 * grid.v0 / grid.n_v
        case 2:
            return 2.0 * np.pi * grid.v0 / grid.n_theta
        case _:  # pragma: no cover
            assert False


def resolved_width(grid: PhaseGrid, T: float) -> float:
    """Smallest blob width whose velocity translates still overlap at time `T`.

    Below it the discrete velocity average splits into separate copies of the
    blob and stops dispersing.
    """
    return max(2.0 * grid.dx, T * _velocity_spacing(grid))


@dataclass(frozen=True)
class DispersionReport:
    """The dispersion statistic `Q(t)` per blob.

    Attributes
    ----------
    times
        Log-spaced sample times.
    centers
        Distance of each blob center from the origin, along the first axis.
    widths
        Width of each blob.
    Q
        `Q[b, n]` for blob `b` at `times[n]`.
    a_star
        `chi + gamma V0 - 1`.
    """

    times: np.ndarray
    centers: list[float]
    widths: list[float]
    Q: np.ndarray
    a_star: float

    @property
    def max_Q(self) -> np.ndarray:
        """Largest `Q` over time, per blob."""
        return self.Q.max(axis=1)

    @property
    def bounded(self) -> bool:
        """Whether every blob stays below `DISPERSION_BOUND_FACTOR` times the first."""
        return bool(np.all(self.max_Q <= DISPERSION_BOUND_FACTOR * self.max_Q[0]))

    def smoothing_monotone(self) -> dict[float, bool]:
        """Per center, whether wider blobs give smaller `max Q`. Reported only."""
        result = {}
        for c in sorted(set(self.centers)):
            idx = [i for i, ci in enumerate(self.centers) if ci == c]
            ordered = sorted(idx, key=lambda i: self.widths[i])
            values = [self.max_Q[i] for i in ordered]
            result[c] = bool(all(b <= a for a, b in zip(values, values[1:])))
        return result

    def to_dict(self) -> dict[str, object]:
        return {
            'times': self.times,
            'centers': list(self.centers),
            'widths': list(self.widths),
            'max_Q': self.max_Q,
            'a_star': self.a_star,
            'bounded': self.bounded,
            'smoothing_monotone': {str(k): v for k, v in self.smoothing_monotone().items()},
        }


def dispersion_probe(
    grid: PhaseGrid,
    chi: float,
    gamma: float,
    *,
    centers: Sequence[float] = (2.0, 1.0, 0.0),
    widths: Sequence[float] | None = None,
    T: float = 20.0,
    n_times: int = 24,
    phi: SpatialWeight | np.ndarray | float = 1.0,
) -> DispersionReport:
    """`Q(t) = sup_x |m rho(t)| t^d e^(-a* t) / ||f0||_(L1_x Linf_v(m))` per blob.

    `rho(t)` is the velocity average of `phi S_B0(t) f0`, evolved exactly along
    characteristics; `m = exp(gamma <x>)`. Times are log-spaced in `[0.25, T]`.

    Parameters
    ----------
    grid
        Phase grid; the box must contain the blobs transported for time `T`.
    chi, gamma
        Bias and weight rate, `gamma < (1 - chi) / V0`.
    centers
        Distance of each blob from the origin, along the first axis. The first
        blob is the reference of `DispersionReport.bounded`.
    widths
        Blob widths; each center is probed with each width. Defaults to
        `resolved_width(grid, T)`.
    T
        Final time.
    n_times
        Number of sample times.
    phi
        Velocity weight of the average.

    Raises
    ------
    DomainError
        If `gamma >= gamma*`.
    """
    constants = model_constants(chi, grid.dim)
    if not gamma < constants.gamma_star:
        raise DomainError(
            f'gamma = {gamma:g} must be below gamma* = {constants.gamma_star:g}'
        )
    if not T > 0.25:
        raise DomainError(f'T must exceed 0.25, got {T!r}')
    a_star = constants.a_star(gamma)
    times = np.geomspace(0.25, T, n_times)
    if widths is None:
        widths = (resolved_width(grid, T),)
    m = weight_on_grid(Exponential(gamma), grid)[:, 0]
    spatial_m = m.reshape(grid.spatial_shape)

    rows, row_centers, row_widths = [], [], []
    for c in centers:
        for w in widths:
            f0 = gaussian_blob(grid, [c] + [0.0] * (grid.dim - 1), w)
            norm0 = float(np.sum(np.abs(f0.values).max(axis=1) * m) * grid.cell_volume)
            Q = np.empty(n_times)
            for n, t in enumerate(times):
                rho = averaging_apply(phi, b0_evolve_exact(f0, float(t), chi))
                sup = float(np.max(np.abs(spatial_m * rho)))
                Q[n] = sup * t**grid.dim * np.exp(-a_star * t) / norm0
            rows.append(Q)
            row_centers.append(float(c))
            row_widths.append(float(w))
            logger.debug('dispersion blob at %g (width %g): max Q=%g', c, w, Q.max())
    report = DispersionReport(
        times=times,
        centers=row_centers,
        widths=row_widths,
        Q=np.asarray(rows),
        a_star=a_star,
    )
    logger.info('dispersion probe: max Q=%s bounded=%s', report.max_Q, report.bounded)
    return report


@dataclass(frozen=True)
class PolyDecayReport:
    """Result of `b1_poly_decay_probe()`.

    Attributes
    ----------
    fit
        Polynomial-mode fit of `||S_B1(t) f0||_(L1_l)`.
    k, ell
        Moment orders.
    passed
        Whether the fitted exponent is at most `-(k - ell) + POLY_DECAY_SLACK`.
    """

    fit: RateFit
    k: float
    ell: float
    passed: bool

    def to_dict(self) -> dict[str, object]:
        return {'fit': self.fit.to_dict(), 'k': self.k, 'ell': self.ell, 'passed': self.passed}


def poly_initial(grid: PhaseGrid, k: float) -> DistributionField:
    """`<x>^-(d + k + 1/2)`, independent of `v`, whose moment of order `k` is finite."""
    power = grid.dim + k + 0.5
    return DistributionField.from_function(
        grid, lambda x, v: (1.0 + np.sum(x * x, axis=-1)) ** (-power / 2.0)
    )


def b1_poly_decay_probe(
    grid: PhaseGrid,
    chi: float,
    R: float,
    k: float,
    ell: float,
    T: float,
    *,
    f0: DistributionField | None = None,
    window: tuple[float, float] | None = None,
    scheme: Scheme = 'upwind',
    dt_policy: DtPolicy | None = None,
) -> PolyDecayReport:
    """Fit the polynomial decay of `||S_B1(t) f0||_(L1_l)` for `f0` in `L1_k`.

    Parameters
    ----------
    grid
        Phase grid.
    chi
        Tumbling bias.
    R
        Truncation radius of `B1`.
    k, ell
        Moment orders, `0 < ell < k`.
    T
        Final time.
    f0
        Initial field; `poly_initial(grid, k)` by default.
    window
        Fit window; `(min(5, T/3), T)` by default.
    scheme, dt_policy
        Discretization of the evolution.

    Raises
    ------
    DomainError
        If not `0 < ell < k`.
    """
    if not 0 < ell < k:
        raise DomainError(f'the orders must satisfy 0 < ell < k, got ell={ell!r}, k={k!r}')
    gen = assemble_generator('B1', grid, KernelSpec(chi), R, scheme=scheme)
    if f0 is None:
        f0 = poly_initial(grid, k)
    weight = Polynomial(ell)

    def l1_ell(f: DistributionField) -> float:
        return weighted_norm(f, 'L1_k', weight).value

    trace = evolve(gen, f0, T, dt_policy, functionals={'L1_ell': l1_ell})
    if window is None:
        window = (min(5.0, T / 3.0), T)
    fit = fit_decay(trace.times, trace.series['L1_ell'], window, mode='polynomial')
    passed = fit.slope <= -(k - ell) + POLY_DECAY_SLACK
    logger.info('B1 polynomial decay: exponent %g (k=%g, ell=%g) passed=%s', fit.slope, k, ell, passed)
    return PolyDecayReport(fit=fit, k=k, ell=ell, passed=passed)


@dataclass(frozen=True)
class ConvergenceReport:
    """Result of `convergence_probe()`.

    Attributes
    ----------
    fits
        Exponential fit of `||f(t) - <<f0>> G||_L1` per initial field.
    spread
        `(max - min) / |mean|` of the slopes.
    passed
        Whether every slope is negative with `r^2 >= CONVERGENCE_R_SQUARED` and the
        spread is at most `CONVERGENCE_SPREAD`.
    """

    fits: list[RateFit]
    spread: float
    passed: bool

    @property
    def slopes(self) -> list[float]:
        return [fit.slope for fit in self.fits]

    def to_dict(self) -> dict[str, object]:
        return {
            'slopes': self.slopes,
            'r_squared': [fit.r_squared for fit in self.fits],
            'spread': self.spread,
            'passed': self.passed,
        }


def convergence_probe(
    gen: GeneratorMatrix,
    steady: SteadyState,
    initial_fields: Sequence[DistributionField],
    T: float,
    *,
    dt_policy: DtPolicy | None = None,
) -> ConvergenceReport:
    """Relaxation of each `f0` towards `<<f0>> G` under the full generator."""
    if gen.tag != 'L':
        raise ConfigError(f'convergence needs the full generator L, got {gen.tag}', field='tag')
    if not initial_fields:
        raise ConfigError('convergence needs at least one initial field')
    G = steady.field
    fits = []
    for f0 in initial_fields:
        target = mass(f0) * G

        def distance(f: DistributionField, target: DistributionField = target) -> float:
            return l1_distance(f, target)

        trace = evolve(gen, f0, T, dt_policy, functionals={'distance': distance})
        fits.append(fit_decay(trace.times, trace.series['distance']))
    slopes = np.asarray([fit.slope for fit in fits])
    mean = float(slopes.mean())
    spread = float(np.ptp(slopes) / abs(mean)) if mean != 0 else float('inf')
    passed = bool(
        np.all(slopes < 0)
        and all(fit.r_squared >= CONVERGENCE_R_SQUARED for fit in fits)
        and spread <= CONVERGENCE_SPREAD
    )
    logger.info('convergence: slopes %s spread %g passed=%s', slopes, spread, passed)
    return ConvergenceReport(fits=fits, spread=spread, passed=passed)


@dataclass(frozen=True)
class DissipativityReport:
    """`N(f(t))` along the evolution of the dissipative part `B`.

    Attributes
    ----------
    times
        Sample times.
    N
        `N(f(t))`.
    transient
        Start of the checked range.
    passed
        Whether `N` is non-increasing from `transient` on.
    """

    times: np.ndarray
    N: np.ndarray
    transient: float
    passed: bool

    def to_dict(self) -> dict[str, object]:
        return {
            'times': self.times,
            'N': self.N,
            'transient': self.transient,
            'passed': self.passed,
        }


def dissipativity_probe(
    gen_b: GeneratorMatrix,
    gen_b1: GeneratorMatrix,
    f0: DistributionField,
    weight: WeightSpec,
    T: float,
    *,
    n_samples: int = 8,
    T_max: float | None = None,
    eta1: float = DEFAULT_ETA,
    eta2: float = DEFAULT_ETA,
    dt_policy: DtPolicy | None = None,
) -> DissipativityReport:
    """Sample `N(S_B(t) f0)` at about `n_samples` times in `[0, T]`."""
    if gen_b.tag != 'B':
        raise ConfigError(f'dissipativity needs the generator B, got {gen_b.tag}', field='tag')
    policy = dt_policy or DtPolicy()
    _, steps = step_size(gen_b, T, policy)
    every = max(1, steps // max(n_samples - 1, 1))
    trace = evolve(
        gen_b,
        f0,
        T,
        DtPolicy(cfl=policy.cfl, dt=policy.dt, record_every=steps, snapshot_every=every),
    )
    N = np.asarray(
        [
            hypo_norms(f, gen_b1, weight, T_max, eta1=eta1, eta2=eta2, dt_policy=dt_policy).N
            for f in trace.snapshots
        ]
    )
    times = trace.snapshot_times
    transient = T / 3.0
    tail = N[times >= transient]
    passed = bool(np.all(np.diff(tail) <= 1e-9 * np.abs(tail[:-1])))
    logger.info('dissipativity: N from %g to %g, passed=%s', N[0], N[-1], passed)
    return DissipativityReport(times=times, N=N, transient=transient, passed=passed)
