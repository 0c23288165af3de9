from dataclasses import dataclass

import awkward as ak
import numpy as np

from runtumble.errors import ConfigError, DomainError
from runtumble.model import DistributionField, PhaseGrid, ball_radius

# Streams of the particle blocks are keyed by (block, step counter); the initial
# sampling uses its own one-element key so the two never collide.
_SAMPLING_KEY = (0,)


def block_rng(seed: int, *key: int) -> np.random.Generator:
    """A counter-based Philox generator for the stream `(seed, key)`.

    Examples
    --------
    >>> a = block_rng(7, 0, 1).random(3)
    >>> b = block_rng(7, 0, 1).random(3)
    >>> bool(np.array_equal(a, b))
    True
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def uniform_ball_sample(
    rng: np.random.Generator, dim: int, size: int, *, v0: float | None = None
) -> np.ndarray:
    """`size` velocities drawn uniformly from the ball of radius `v0`.

    `v0` defaults to the radius of the unit-volume ball. Returns shape `(size, dim)`.

    Examples
    --------
    >>> v = uniform_ball_sample(np.random.default_rng(0), 2, 1000)
    >>> v.shape, bool(np.all(np.hypot(v[:, 0], v[:, 1]) <= ball_radius(2)))
    ((1000, 2), True)
    """
    if v0 is None:
        v0 = ball_radius(dim)
    match dim:
        case 1:
            return rng.uniform(-v0, v0, size=(size, 1))
        case 2:
            r = v0 * np.sqrt(rng.random(size))
            a = 2.0 * np.pi * rng.random(size)
            return np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
        case 3:
            direction = rng.standard_normal((size, 3))
            direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
            return v0 * np.cbrt(rng.random(size))[:, None] * direction
        case _:
            raise DomainError(f'dim must be 1, 2 or 3, got {dim!r}')


@dataclass(frozen=True, eq=False)
class ParticleEnsemble:
    """Independent run-and-tumble particles.

    Attributes
    ----------
    positions
        Shape `(n, dim)`.
    velocities
        Shape `(n, dim)`, with speeds at most `v_max`.
    seed
        Root seed of the random streams.
    counter
        Number of completed calls to `particles_step()`; part of the stream key.
    time
        Current time.
    v_max
        Speed bound, by default the radius of the unit-volume ball.
    jumps
        Jump times of each particle during the last step, if recorded.
    """

    positions: np.ndarray
    velocities: np.ndarray
    seed: int
    counter: int = 0
    time: float = 0.0
    v_max: float | None = None
    jumps: ak.Array | None = None

    def __post_init__(self) -> None:
        positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if positions.shape != velocities.shape:
            raise ConfigError(
                f'positions {positions.shape} and velocities {velocities.shape} differ in shape'
            )
        v_max = self.v_max if self.v_max is not None else ball_radius(positions.shape[1])
        speeds = np.linalg.norm(velocities, axis=-1)
        if speeds.size and float(speeds.max()) > v_max * (1.0 + 1e-12):
            raise DomainError(
                f'|v| = {float(speeds.max()):g} exceeds the speed bound {v_max:g}'
            )
        object.__setattr__(self, 'positions', positions)
        object.__setattr__(self, 'velocities', velocities)
        object.__setattr__(self, 'v_max', v_max)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @classmethod
    def from_positions(cls, positions: np.ndarray, seed: int) -> 'ParticleEnsemble':
        """Particles at `positions` with velocities uniform on the ball."""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        n, dim = positions.shape
        rng = block_rng(seed, *_SAMPLING_KEY)
        return cls(positions, uniform_ball_sample(rng, dim, n), seed=seed)

    @classmethod
    def at_origin(cls, n: int, dim: int, seed: int) -> 'ParticleEnsemble':
        """`n` particles at the origin with uniform velocities.

        Examples
        --------
        >>> e = ParticleEnsemble.at_origin(5, 2, seed=1)
        >>> e.n, e.dim, e.time
        (5, 2, 0.0)
        """
        return cls.from_positions(np.zeros((n, dim)), seed)

    @classmethod
    def from_density(
        cls, f: DistributionField, n: int, seed: int
    ) -> 'ParticleEnsemble':
        """Sample `n` particles from a nonnegative field.

        A phase cell `(i, j)` is chosen with probability proportional to its mass
        `f[i, j] w_j`; the position is uniform in the spatial cell and the velocity
        uniform in the quadrature cell of node `j`.
        """
        if not f.is_nonnegative():
            raise DomainError('cannot sample particles from a field with negative values')
        grid = f.grid
        mass = f.values * grid.v_weights[None, :]
        total = float(mass.sum())
        if not total > 0:
            raise DomainError('cannot sample particles from a field of zero mass')
        rng = block_rng(seed, *_SAMPLING_KEY)
        flat = rng.choice(mass.size, size=n, p=(mass / total).ravel())
        cell, node = np.divmod(flat, grid.n_velocities)
        offsets = rng.random((n, grid.dim)) - 0.5
        positions = grid.x_nodes[cell] + grid.dx * offsets
        velocities = _velocity_in_cell(grid, node, rng)
        return cls(positions, velocities, seed=seed, v_max=grid.v0)


def _velocity_in_cell(
    grid: PhaseGrid, node: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Velocities uniform in the quadrature cell around each velocity node."""
    nodes = grid.v_nodes[node]
    if grid.velocity_set == 'two_velocity':
        return nodes
    v0 = grid.v0
    if grid.dim == 1:
        h = 2.0 * v0 / grid.n_v
        return np.clip(nodes + h * (rng.random(nodes.shape) - 0.5), -v0, v0)
    ring, sector = np.divmod(node, grid.n_theta)
    inner = v0 * ring / grid.n_r
    outer = v0 * (ring + 1) / grid.n_r
    r = np.sqrt(inner**2 + rng.random(node.size) * (outer**2 - inner**2))
    a = 2.0 * np.pi * (sector + rng.random(node.size)) / grid.n_theta
    return np.minimum(r, v0)[:, None] * np.stack([np.cos(a), np.sin(a)], axis=-1)
