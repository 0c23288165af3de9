import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from runtumble.errors import DomainError

from .constants import ball_radius

VelocitySet = Literal['ball', 'two_velocity']

# Speed bound of the two-velocity set; every ball radius is smaller.
MAX_SPEED = 1.0


@dataclass(frozen=True)
class PhaseGrid:
    """Discrete phase space: a position box times a velocity quadrature.

    The position box is `[-L, L]^dim` split into `n_x` cells per axis. Field values
    live on cell centers. The velocity quadrature is, for `velocity_set='ball'`, a
    positive rule on the centered ball of unit volume; for `'two_velocity'` (`dim`
    must be 1) it is the set `{-1, +1}` with weights `1/2`.

    Parameters
    ----------
    dim
        Spatial dimension, 1 or 2.
    L
        Box half width.
    n_x
        Cells per axis.
    n_v
        Number of velocity nodes in dimension 1 (midpoint rule).
    n_r
        Number of radial rings in dimension 2.
    n_theta
        Number of angles per ring in dimension 2. A multiple of 4 so that the
        quadrature is invariant under quarter turns.
    velocity_set
        `'ball'` or `'two_velocity'`.

    Examples
    --------
    >>> grid = PhaseGrid(dim=1, L=30.0, n_x=1200, n_v=32)
    >>> grid.dx, grid.v0, grid.shape
    (0.05, 0.5, (1200, 32))
    >>> round(float(grid.v_weights.sum()), 13)
    1.0
    """

    dim: int
    L: float
    n_x: int
    n_v: int = 32
    n_r: int = 8
    n_theta: int = 16
    velocity_set: VelocitySet = 'ball'

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise DomainError(f'dim must be 1 or 2, got {self.dim!r}')
        if not self.L > 0:
            raise DomainError(f'L must be positive, got {self.L!r}')
        if self.n_x < 2:
            raise DomainError(f'n_x must be at least 2, got {self.n_x!r}')
        match self.velocity_set:
            case 'ball':
                if self.dim == 1 and self.n_v < 2:
                    raise DomainError(f'n_v must be at least 2, got {self.n_v!r}')
                if self.dim == 2:
                    if self.n_r < 1:
                        raise DomainError(f'n_r must be positive, got {self.n_r!r}')
                    if self.n_theta < 4 or self.n_theta % 4:
                        raise DomainError(
                            f'n_theta must be a positive multiple of 4, got {self.n_theta!r}'
                        )
            case 'two_velocity':
                if self.dim != 1:
                    raise DomainError('the two-velocity set exists only in dim 1')
            case _:
                raise DomainError(f'unknown velocity set {self.velocity_set!r}')

    @property
    def v0(self) -> float:
        """Speed bound of the velocity set."""
        if self.velocity_set == 'two_velocity':
            return MAX_SPEED
        return ball_radius(self.dim)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n_x

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.n_x,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.n_x**self.dim

    @property
    def n_velocities(self) -> int:
        return len(self.v_weights)

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of the value array of a field on this grid."""
        return (self.n_cells, self.n_velocities)

    @cached_property
    def x_centers(self) -> np.ndarray:
        """Cell centers along one axis."""
        return -self.L + (np.arange(self.n_x) + 0.5) * self.dx

    @cached_property
    def x_nodes(self) -> np.ndarray:
        """Cell centers, shape `(n_cells, dim)`, first axis index slowest."""
        axes = np.meshgrid(*([self.x_centers] * self.dim), indexing='ij')
        return np.stack([a.ravel() for a in axes], axis=-1)

    @cached_property
    def v_nodes(self) -> np.ndarray:
        """Velocity nodes, shape `(n_velocities, dim)`."""
        return self._velocity_quadrature[0]

    @cached_property
    def v_weights(self) -> np.ndarray:
        """Velocity quadrature weights, summing to 1."""
        return self._velocity_quadrature[1]

    @cached_property
    def _velocity_quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        if self.velocity_set == 'two_velocity':
            return np.array([[-1.0], [1.0]]), np.array([0.5, 0.5])
        v0 = self.v0
        if self.dim == 1:
            h = 2.0 * v0 / self.n_v
            nodes = -v0 + (np.arange(self.n_v) + 0.5) * h
            return nodes[:, None], np.full(self.n_v, 1.0 / self.n_v)
        edges = v0 * np.arange(self.n_r + 1) / self.n_r
        # Node radii split each ring into two halves of equal area.
        radii = np.sqrt(0.5 * (edges[:-1] ** 2 + edges[1:] ** 2))
        areas = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
        angles = 2.0 * math.pi * (np.arange(self.n_theta) + 0.5) / self.n_theta
        r, a = np.meshgrid(radii, angles, indexing='ij')
        nodes = np.stack([(r * np.cos(a)).ravel(), (r * np.sin(a)).ravel()], axis=-1)
        weights = np.repeat(areas / self.n_theta, self.n_theta)
        return nodes, weights

    def phase_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Positions and velocities broadcastable to `(n_cells, n_velocities, dim)`."""
        return self.x_nodes[:, None, :], self.v_nodes[None, :, :]

    def to_dict(self) -> dict[str, object]:
        """Parameters that reconstruct this grid."""
        return {
            'dim': self.dim,
            'L': self.L,
            'n_x': self.n_x,
            'n_v': self.n_v,
            'n_r': self.n_r,
            'n_theta': self.n_theta,
            'velocity_set': self.velocity_set,
        }


def make_grid(
    dim: int,
    L: float,
    n_x: int,
    *,
    n_v: int = 32,
    n_r: int = 8,
    n_theta: int = 16,
) -> PhaseGrid:
    """A phase grid with the unit-volume velocity ball.

    Examples
    --------
    >>> grid = make_grid(2, L=4.0, n_x=16, n_r=4, n_theta=8)
    >>> grid.shape
    (256, 32)
    >>> bool(abs(grid.v_weights.sum() - 1) < 1e-13)
    True
    """
    return PhaseGrid(dim=dim, L=L, n_x=n_x, n_v=n_v, n_r=n_r, n_theta=n_theta)


def two_velocity_grid(L: float, n_x: int) -> PhaseGrid:
    """A one-dimensional grid with the velocity set `{-1, +1}`.

    Examples
    --------
    >>> grid = two_velocity_grid(L=30.0, n_x=1200)
    >>> grid.v_nodes.ravel(), grid.v_weights
    (array([-1.,  1.]), array([0.5, 0.5]))
    """
    return PhaseGrid(dim=1, L=L, n_x=n_x, velocity_set='two_velocity')
