from collections.abc import Callable
from dataclasses import dataclass
from typing import Union

import numpy as np

from runtumble.errors import ConfigError

from .grid import PhaseGrid

PhaseFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class DistributionField:
    """Values of a phase-space density on the nodes of a `PhaseGrid`.

    `values[i, j]` is the density at cell center `grid.x_nodes[i]` and velocity
    `grid.v_nodes[j]`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=1.0, n_x=4, n_v=2)
    >>> f = DistributionField.constant(grid, 1.0)
    >>> float((2 * f - f).values.sum())
    8.0
    """

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ConfigError(
                f'values of shape {values.shape} do not match the grid {self.grid.shape}'
            )
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, grid: PhaseGrid) -> 'DistributionField':
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: PhaseGrid, value: float) -> 'DistributionField':
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: PhaseGrid, fn: PhaseFunction) -> 'DistributionField':
        """Sample `fn(x, v)` on the grid.

        `x` has shape `(n_cells, 1, dim)` and `v` has shape `(1, n_velocities, dim)`.
        """
        x, v = grid.phase_points()
        return cls(grid, np.broadcast_to(fn(x, v), grid.shape).copy())

    @classmethod
    def from_spatial(cls, grid: PhaseGrid, rho: np.ndarray) -> 'DistributionField':
        """A velocity-independent field from values per cell."""
        rho = np.asarray(rho, dtype=float).reshape(grid.n_cells)
        return cls(grid, np.repeat(rho[:, None], grid.n_velocities, axis=1))

    def with_values(self, values: np.ndarray) -> 'DistributionField':
        return DistributionField(self.grid, values)

    def integrate(self, weight: np.ndarray | float = 1.0) -> float:
        """Phase-space quadrature of `values * weight`."""
        integrand = self.values * weight
        return float(integrand.sum(axis=0) @ self.grid.v_weights) * self.grid.cell_volume

    def positive_part(self) -> 'DistributionField':
        return self.with_values(np.maximum(self.values, 0.0))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def spatial_view(self) -> np.ndarray:
        """Values reshaped to `(*grid.spatial_shape, n_velocities)`."""
        return self.values.reshape(*self.grid.spatial_shape, self.grid.n_velocities)

    def _check_same_grid(self, other: 'DistributionField') -> None:
        if other.grid != self.grid:
            raise ConfigError('fields live on different grids')

    def __add__(self, other: 'DistributionField') -> 'DistributionField':
        self._check_same_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: 'DistributionField') -> 'DistributionField':
        self._check_same_grid(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scale: Union[float, np.floating]) -> 'DistributionField':
        return self.with_values(self.values * float(scale))

    __rmul__ = __mul__

    def __neg__(self) -> 'DistributionField':
        return self.with_values(-self.values)

    def __abs__(self) -> 'DistributionField':
        return self.with_values(np.abs(self.values))
