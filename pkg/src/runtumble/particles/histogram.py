from dataclasses import dataclass
from typing import Literal

import numpy as np

from runtumble.errors import ConfigError
from runtumble.model import DistributionField, PhaseGrid

from .ensemble import ParticleEnsemble

Marginal = Literal['x', 'xv']


@dataclass(frozen=True, eq=False)
class EnsembleHistogram:
    """Normalized histogram of an ensemble on a phase grid.

    Attributes
    ----------
    grid
        The grid binned on.
    marginal
        `'x'` for the spatial density, `'xv'` for the phase-space density.
    density
        Shape `grid.spatial_shape` for `'x'` and `grid.shape` for `'xv'`.
    overflow
        Fraction of particles outside the box.
    """

    grid: PhaseGrid
    marginal: Marginal
    density: np.ndarray
    overflow: float

    @property
    def mass(self) -> float:
        """Total mass including the overflow, 1 up to rounding."""
        grid = self.grid
        if self.marginal == 'x':
            inside = float(self.density.sum()) * grid.cell_volume
        else:
            inside = float(self.density.sum(axis=0) @ grid.v_weights) * grid.cell_volume
        return inside + self.overflow

    def to_field(self) -> DistributionField:
        """The phase-space density as a field (`'xv'` only)."""
        if self.marginal != 'xv':
            raise ConfigError('only the phase-space histogram is a field', field='marginal')
        return DistributionField(self.grid, self.density)


def _spatial_bins(grid: PhaseGrid, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flat cell index of each particle and the mask of those inside the box."""
    idx = np.floor((positions + grid.L) / grid.dx).astype(np.int64)
    inside = np.all((idx >= 0) & (idx < grid.n_x), axis=-1)
    flat = np.ravel_multi_index(
        tuple(np.clip(idx, 0, grid.n_x - 1).T), grid.spatial_shape
    )
    return np.asarray(flat), inside


def velocity_bins(grid: PhaseGrid, velocities: np.ndarray) -> np.ndarray:
    """Index of the quadrature cell containing each velocity."""
    if grid.velocity_set == 'two_velocity':
        return (velocities[:, 0] > 0).astype(np.int64)
    v0 = grid.v0
    if grid.dim == 1:
        h = 2.0 * v0 / grid.n_v
        return np.clip(np.floor((velocities[:, 0] + v0) / h), 0, grid.n_v - 1).astype(np.int64)
    speed = np.linalg.norm(velocities, axis=-1)
    ring = np.clip(np.floor(speed / v0 * grid.n_r), 0, grid.n_r - 1).astype(np.int64)
    angle = np.mod(np.arctan2(velocities[:, 1], velocities[:, 0]), 2.0 * np.pi)
    sector = np.clip(
        np.floor(angle / (2.0 * np.pi) * grid.n_theta), 0, grid.n_theta - 1
    ).astype(np.int64)
    return ring * grid.n_theta + sector


def ensemble_histogram(
    e: ParticleEnsemble, grid: PhaseGrid, marginal: Marginal = 'x'
) -> EnsembleHistogram:
    """Bin the ensemble on `grid`, normalized to total mass 1.

    The density of a bin is `count / (N dx^d)` for `'x'` and
    `count / (N dx^d w_j)` for `'xv'`, so that quadrature against the grid
    recovers the bin fractions.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=2.0, n_x=8, n_v=4)
    >>> h = ensemble_histogram(ParticleEnsemble.at_origin(10, 1, seed=0), grid)
    >>> h.density.tolist(), h.overflow
    ([0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0], 0.0)
    """
    if e.dim != grid.dim:
        raise ConfigError(f'ensemble of dim {e.dim} does not fit a grid of dim {grid.dim}')
    if e.n == 0:
        raise ConfigError('cannot bin an empty ensemble')
    cell, inside = _spatial_bins(grid, e.positions)
    overflow = float(np.count_nonzero(~inside)) / e.n
    match marginal:
        case 'x':
            counts = np.bincount(cell[inside], minlength=grid.n_cells).astype(float)
            density = (counts / (e.n * grid.cell_volume)).reshape(grid.spatial_shape)
        case 'xv':
            node = velocity_bins(grid, e.velocities)
            flat = cell[inside] * grid.n_velocities + node[inside]
            counts = np.bincount(flat, minlength=grid.n_cells * grid.n_velocities)
            counts = counts.reshape(grid.shape).astype(float)
            density = counts / (e.n * grid.cell_volume * grid.v_weights[None, :])
        case _:
            raise ConfigError(f'unknown marginal {marginal!r}', field='marginal')
    return EnsembleHistogram(grid=grid, marginal=marginal, density=density, overflow=overflow)
