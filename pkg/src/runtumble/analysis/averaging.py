"""The velocity-averaging functional of the damped free transport.

For a field `f0` evolved exactly by `S_T(t) f0 = f0(x - v t, v) e^(-t)`, the
probe measures

    J = int_0^T ||rho(t)||^2_(H^1/2) e^(2t) dt / ||f0||^2_L2,

where `rho(t)` is the average of `phi S_T(t) f0` over velocities.
"""

import dataclasses
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from runtumble.errors import DomainError
from runtumble.model import DistributionField, PhaseGrid
from runtumble.semigroup import averaging_apply, transport_damped_evolve
from runtumble.semigroup.generator import SpatialWeight

from .norms import NormReport

logger = logging.getLogger(__name__)

AVERAGING_HORIZON = 10.0


def hhalf_seminorm(rho: np.ndarray, L: float) -> float:
    """Homogeneous `H^1/2` seminorm of `rho` on the periodic box `[-L, L]^d`.

    `||rho||^2 = sum_k |xi_k| |rho_k|^2 dxi` with `xi_k = pi k / L`, `dxi = (pi/L)^d`
    and `rho_k = dx^d FFT(rho)_k / (2 pi)^(d/2)`.

    Examples
    --------
    >>> L = 3.0
    >>> x = -L + (np.arange(64) + 0.5) * (2 * L / 64)
    >>> round(hhalf_seminorm(np.cos(np.pi * x / L), L) ** 2, 10)
    3.1415926536
    >>> hhalf_seminorm(np.ones(64), L) < 1e-12
    True
    """
    rho = np.asarray(rho, dtype=float)
    if not L > 0:
        raise DomainError(f'L must be positive, got {L!r}')
    dim = rho.ndim
    n = rho.shape[0]
    dx = 2.0 * L / n
    freqs = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    xi = np.meshgrid(*([freqs] * dim), indexing='ij')
    xi_abs = np.sqrt(sum(np.square(component) for component in xi))
    rho_hat = dx**dim * np.fft.fftn(rho) / (2.0 * np.pi) ** (dim / 2.0)
    dxi = (np.pi / L) ** dim
    value = float(np.sum(xi_abs * np.abs(rho_hat) ** 2) * dxi)
    return float(np.sqrt(max(value, 0.0)))


def hhalf_report(rho: np.ndarray, L: float) -> NormReport:
    return NormReport(kind='HhalfSeminorm', value=hhalf_seminorm(rho, L), parameters={'L': L})


@dataclass(frozen=True)
class AveragingReport:
    """Result of `averaging_probe()`.

    Attributes
    ----------
    J
        The averaging ratio of each initial field.
    T_max
        Time horizon.
    n_times
        Number of quadrature times.
    """

    J: list[float]
    T_max: float
    n_times: int

    @property
    def max_J(self) -> float:
        return max(self.J) if self.J else 0.0

    def to_dict(self) -> dict[str, object]:
        return {'J': list(self.J), 'max_J': self.max_J, 'T_max': self.T_max, 'n_times': self.n_times}


def averaging_ratio(
    f0: DistributionField,
    phi: SpatialWeight | np.ndarray | float,
    T_max: float,
    n_times: int = 129,
) -> float:
    """`J` for one initial field; 0 for the zero field."""
    l2_squared = f0.with_values(f0.values**2).integrate()
    if l2_squared == 0:
        return 0.0
    times = np.linspace(0.0, T_max, n_times)
    integrand = np.empty(n_times)
    for i, t in enumerate(times):
        rho = averaging_apply(phi, transport_damped_evolve(f0, float(t)))
        integrand[i] = hhalf_seminorm(rho, f0.grid.L) ** 2 * np.exp(2.0 * t)
    return float(integrate.trapezoid(integrand, times)) / l2_squared


def averaging_probe(
    fields: Sequence[DistributionField],
    phi: SpatialWeight | np.ndarray | float = 1.0,
    T_max: float = AVERAGING_HORIZON,
    *,
    n_times: int = 129,
) -> AveragingReport:
    """The averaging ratio `J` of each field, with the exact periodic evolution."""
    if not T_max > 0:
        raise DomainError(f'T_max must be positive, got {T_max!r}')
    J = [averaging_ratio(f0, phi, T_max, n_times) for f0 in fields]
    logger.info('averaging probe: max J = %g over %d fields', max(J, default=0.0), len(J))
    return AveragingReport(J=J, T_max=T_max, n_times=n_times)


def averaging_refinement(
    build: Callable[[PhaseGrid], Sequence[DistributionField]],
    grid: PhaseGrid,
    phi: SpatialWeight | np.ndarray | float = 1.0,
    T_max: float = AVERAGING_HORIZON,
    *,
    n_times: int = 129,
) -> tuple[float, float]:
    """`max J` on `grid` and on the grid with twice as many cells per axis."""
    fine = dataclasses.replace(grid, n_x=2 * grid.n_x)
    coarse_J = averaging_probe(build(grid), phi, T_max, n_times=n_times).max_J
    fine_J = averaging_probe(build(fine), phi, T_max, n_times=n_times).max_J
    return coarse_J, fine_J


def single_mode_ratio(grid: PhaseGrid, T_max: float, n_times: int = 129) -> float:
    """`J` of `f0 = cos(pi x / L)` with `phi = 1`, from the mode-damping factor.

    The average of the transported mode is `e^(-t) cos(pi x / L) s(t)` with
    `s(t) = sum_j w_j cos(pi v_j t / L)`, so that `J = (pi / L) int_0^T s(t)^2 dt`.
    """
    if grid.dim != 1:
        raise DomainError('the single-mode formula is implemented in dimension 1')
    times = np.linspace(0.0, T_max, n_times)
    phase = np.pi * grid.v_nodes[:, 0][None, :] * times[:, None] / grid.L
    s = np.cos(phase) @ grid.v_weights
    return float(np.pi / grid.L * integrate.trapezoid(s**2, times))


def embed_in_wider_box(f: DistributionField) -> DistributionField:
    """`f` extended by zero to the box of half width `2 L` with the same cells.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> f = DistributionField.constant(make_grid(1, L=1.0, n_x=4, n_v=2), 1.0)
    >>> wide = embed_in_wider_box(f)
    >>> wide.grid.L, wide.grid.n_x, wide.integrate() == f.integrate()
    (2.0, 8, True)
    """
    grid = f.grid
    wide = dataclasses.replace(grid, L=2.0 * grid.L, n_x=2 * grid.n_x)
    before = grid.n_x // 2
    pad = [(before, grid.n_x - before)] * grid.dim + [(0, 0)]
    values = np.pad(f.spatial_view(), pad)
    return DistributionField(wide, values.reshape(wide.shape))


def averaging_leakage(
    fields: Sequence[DistributionField],
    phi: SpatialWeight | np.ndarray | float = 1.0,
    T_max: float = AVERAGING_HORIZON,
    *,
    n_times: int = 129,
) -> float:
    """Relative change of `max J` when every field is embedded in the box `[-2L, 2L]^d`.

    The seminorm is periodic on the box, so a small value means the periodic
    embedding does not distort the ratio. Zero when `max J` vanishes on both boxes.
    """
    base = averaging_probe(fields, phi, T_max, n_times=n_times).max_J
    wide = averaging_probe(
        [embed_in_wider_box(f) for f in fields], phi, T_max, n_times=n_times
    ).max_J
    if base == 0:
        return 0.0 if wide == 0 else float('inf')
    leakage = abs(wide - base) / base
    logger.info('averaging leakage: max J %g on [-L, L], %g on [-2L, 2L]', base, wide)
    return leakage
