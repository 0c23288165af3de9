"""Stationary states of the full generator `L`."""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import sparse
from scipy.sparse import linalg as splinalg

from runtumble.errors import ConfigError, ConvergenceError, DomainError
from runtumble.model import DistributionField, PhaseGrid
from runtumble.model.constants import check_chi
from runtumble.semigroup import DtPolicy, GeneratorMatrix, evolve

from .norms import mass

logger = logging.getLogger(__name__)

SteadyMethod = Literal['long_time', 'power_iteration', 'direct']


@dataclass(frozen=True, eq=False)
class SteadyState:
    """A numerical stationary state.

    Attributes
    ----------
    field
        `G`, nonnegative with mass 1.
    residual
        `||L_h G||_L1`.
    method
        How it was computed.
    iterations
        Steps (or evolution chunks) used; 1 for the direct solve.
    history
        Residuals along the iteration.
    """

    field: DistributionField
    residual: float
    method: SteadyMethod
    iterations: int
    history: list[float] = dataclasses.field(default_factory=list)

    @property
    def mass(self) -> float:
        return mass(self.field)


def residual_l1(gen: GeneratorMatrix, f: DistributionField) -> float:
    """`||L_h f||_L1`."""
    return f.with_values(np.abs(gen.apply(f.values))).integrate()


def _default_initial(grid: PhaseGrid) -> DistributionField:
    f = DistributionField.from_function(
        grid, lambda x, v: np.exp(-np.sum(x * x, axis=-1) / 2.0)
    )
    return f * (1.0 / mass(f))


def _normalized(f: DistributionField) -> DistributionField:
    m = mass(f)
    if not m > 0:
        raise ConvergenceError(f'the iterate lost its mass (mass {m:g})')
    return f * (1.0 / m)


def steady_state(
    gen: GeneratorMatrix,
    method: SteadyMethod = 'long_time',
    *,
    f0: DistributionField | None = None,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    chunk: float = 10.0,
    dt_policy: DtPolicy | None = None,
) -> SteadyState:
    """Compute the stationary state of the full generator.

    Parameters
    ----------
    gen
        Generator with tag `L`.
    method
        `'long_time'` evolves in chunks of time `chunk`, renormalizing the mass
        after each, until the residual is below `tol`. `'power_iteration'`
        iterates `f <- (I + tau L_h) f` with `tau` the CFL step, renormalizing
        each time. `'direct'` solves the bordered system `L_h G + lambda w = 0`,
        `<<G>> = 1` (upwind only).
    f0
        Nonnegative starting field; a Gaussian in `x` by default.
    tol
        Residual tolerance.
    max_iter
        Largest number of chunks or iterations.
    chunk
        Evolution time between residual checks (`'long_time'`).
    dt_policy
        Time stepping of `'long_time'`.

    Raises
    ------
    ConfigError
        If the generator is not `L` or the method is unknown.
    ConvergenceError
        If the residual is not below `tol` after `max_iter`; carries the history.
    """
    if gen.tag != 'L':
        raise ConfigError(f'steady states need the full generator L, got {gen.tag}', field='tag')
    grid = gen.grid
    if f0 is None:
        f0 = _default_initial(grid)
    elif not f0.is_nonnegative():
        raise DomainError('the starting field must be nonnegative')
    history: list[float] = []

    match method:
        case 'long_time':
            f = _normalized(f0)
            for it in range(1, max_iter + 1):
                f = _normalized(evolve(gen, f, chunk, dt_policy).final)
                r = residual_l1(gen, f)
                history.append(r)
                logger.debug('long_time chunk %d: residual=%g', it, r)
                if r < tol:
                    return _done(gen, f, method, it, history)
        case 'power_iteration':
            tau = gen.max_stable_dt()
            f = _normalized(f0)
            values = f.values
            for it in range(1, max_iter + 1):
                step = gen.apply(values)
                values = values + tau * step
                values = values / mass(f.with_values(values))
                if it % 100 == 0 or it == max_iter:
                    r = residual_l1(gen, f.with_values(values))
                    history.append(r)
                    logger.debug('power iteration %d: residual=%g', it, r)
                    if r < tol:
                        return _done(gen, f.with_values(values), method, it, history)
        case 'direct':
            G = _direct_solve(gen)
            return _done(gen, G, method, 1, [residual_l1(gen, G)])
        case _:
            raise ConfigError(f'unknown steady-state method {method!r}', field='method')
    raise ConvergenceError(
        f'{method} did not reach residual {tol:g} in {max_iter} iterations '
        f'(last {history[-1]:g})',
        history=history,
    )


def _done(
    gen: GeneratorMatrix,
    f: DistributionField,
    method: SteadyMethod,
    iterations: int,
    history: list[float],
) -> SteadyState:
    f = _normalized(f)
    r = residual_l1(gen, f)
    logger.info('steady state (%s) after %d iterations: residual=%g', method, iterations, r)
    return SteadyState(field=f, residual=r, method=method, iterations=iterations, history=history)


def _direct_solve(gen: GeneratorMatrix) -> DistributionField:
    grid = gen.grid
    A = gen.to_sparse()
    w = np.tile(grid.v_weights, grid.n_cells) * grid.cell_volume
    col = sparse.csr_array(w[:, None])
    row = sparse.csr_array(w[None, :])
    bordered = sparse.bmat([[A, col], [row, None]], format='csc')
    rhs = np.zeros(A.shape[0] + 1)
    rhs[-1] = 1.0
    solution = splinalg.spsolve(bordered, rhs)
    values = np.maximum(solution[:-1], 0.0).reshape(grid.shape)
    logger.debug('direct solve: multiplier=%g', solution[-1])
    return DistributionField(grid, values)


def two_velocity_steady_profile(chi: float, x: ArrayLike) -> np.ndarray:
    """`G(x, +-1) = (chi / 2) exp(-chi |x|)` of the two-velocity model.

    With velocity weights `1/2` this has mass 1; the mass density of each of the
    two populations is `(chi / 4) exp(-chi |x|)`.

    Examples
    --------
    >>> float(two_velocity_steady_profile(0.5, 0.0))
    0.25
    """
    check_chi(chi)
    return 0.5 * chi * np.exp(-chi * np.abs(np.asarray(x, dtype=float)))


def symmetry_defect(f: DistributionField) -> float:
    """L1 distance between `f` and its image under a symmetry of the equation.

    In dimension 1 the map is `(x, v) -> (-x, -v)`; in dimension 2 it is the
    rotation by a quarter turn of both `x` and `v`.
    """
    grid = f.grid
    spatial = f.spatial_view()
    match grid.dim:
        case 1:
            image = spatial[::-1, ::-1]
        case 2:
            rotated = np.rot90(spatial, k=1, axes=(0, 1))
            # Velocity nodes turn too: same ring, sector shifted by n_theta / 4.
            n_r, n_theta = grid.n_r, grid.n_theta
            by_ring = rotated.reshape(*rotated.shape[:2], n_r, n_theta)
            image = np.roll(by_ring, n_theta // 4, axis=-1).reshape(rotated.shape)
        case _:  # pragma: no cover
            assert False
    return abs(f - f.with_values(image.reshape(grid.shape))).integrate()
