"""Discrete generators on a phase grid.

Every tag is a combination of three pieces acting on the value array `f[i, j]`
(cell `i`, velocity node `j`):

- transport `-v.grad(f)`: conservative finite volumes, first-order upwind or
  MUSCL with the minmod limiter, outflow boundaries (nothing enters the box);
- loss `-K(x_i, v_j) f[i, j]`;
- gain `c(x_i) sum_k w_k G(x_i, v_k) f[i, k]`, the same for every `j`, with the
  velocity quadrature weights `w_k` of the grid.

| tag          | transport | loss | gain kernel `G`        | gain factor `c` |
| ------------ | --------- | ---- | ---------------------- | --------------- |
| `L`          | yes       | `K`  | `K`                    | 1               |
| `B0`         | yes       | `K`  | none                   |                 |
| `B1`         | yes       | `K`  | `K`                    | `1 - phi_R`     |
| `B`          | yes       | `K`  | `K - K_surgical`       | 1               |
| `A1`         | no        | none | `K`                    | `phi_R`         |
| `A0c`        | no        | none | `K`                    | `1 - phi_R`     |
| `A_surgical` | no        | none | `K_surgical`           | 1               |

Loss and gain share the quadrature, so for `L` the collision part conserves
`sum_ij w_j f[i, j]` exactly.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal, get_args

import numpy as np
from scipy import sparse

from runtumble.errors import ConfigError, StabilityError
from runtumble.model import (
    DistributionField,
    KernelSpec,
    PhaseGrid,
    Sharp,
    Surgical,
    cutoff_phi,
    kernel_eval,
)
from runtumble.util import minmod

logger = logging.getLogger(__name__)

OperatorTag = Literal['L', 'B0', 'B1', 'B', 'A1', 'A0c', 'A_surgical']
OPERATOR_TAGS: tuple[str, ...] = get_args(OperatorTag)

Scheme = Literal['upwind', 'muscl']

# Largest CFL number for which a forward Euler step keeps nonnegative fields
# nonnegative; SSP-RK3 inherits it.
CFL_POSITIVITY = 0.5

_TRUNCATED_TAGS = ('B1', 'A1', 'A0c')
_NO_TRANSPORT_TAGS = ('A1', 'A0c', 'A_surgical')


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A discrete generator: transport, diagonal loss and a velocity-coupling gain.

    Build with `assemble_generator()`.

    Attributes
    ----------
    tag
        Which operator.
    grid
        The phase grid.
    kernel
        The turning kernel `K`. For `B` and `A_surgical` its variant is the
        surgical kernel; the sharp kernel with the same `chi` is `K`.
    R
        Truncation radius of `phi_R`, for the truncated tags.
    scheme
        `'upwind'` or `'muscl'`.
    transport
        Whether `-v.grad` is part of the operator.
    loss
        Loss rates, shape `grid.shape`.
    gain_source
        `w_k G(x_i, v_k)`, shape `grid.shape`.
    gain_factor
        `c(x_i)`, shape `(n_cells,)`.
    """

    tag: OperatorTag
    grid: PhaseGrid
    kernel: KernelSpec
    R: float | None
    scheme: Scheme
    transport: bool
    loss: np.ndarray
    gain_source: np.ndarray
    gain_factor: np.ndarray

    @property
    def gain_nonnegative(self) -> bool:
        return bool(np.all(self.gain_source >= 0) and np.all(self.gain_factor >= 0))

    @property
    def is_linear(self) -> bool:
        return self.scheme == 'upwind' or not self.transport

    def apply(self, values: np.ndarray) -> np.ndarray:
        """The action of the generator on a value array of shape `grid.shape`."""
        out = self.collision(values)
        if self.transport:
            out += self._transport(values)[0]
        return out

    def __call__(self, f: DistributionField) -> DistributionField:
        return f.with_values(self.apply(f.values))

    def outflux(self, values: np.ndarray) -> float:
        """Mass per unit time leaving the box through its boundary."""
        if not self.transport:
            return 0.0
        return self._transport(values)[1]

    def collision(self, values: np.ndarray) -> np.ndarray:
        """Loss and gain only."""
        gain = np.einsum('ik,ik->i', self.gain_source, values) * self.gain_factor
        return -self.loss * values + gain[:, None]

    def _transport(self, values: np.ndarray) -> tuple[np.ndarray, float]:
        grid = self.grid
        spatial = values.reshape(*grid.spatial_shape, grid.n_velocities)
        div = np.zeros_like(spatial)
        leak = 0.0
        face_area = grid.dx ** (grid.dim - 1)
        for axis in range(grid.dim):
            c = self.grid.v_nodes[:, axis]
            flux = _face_fluxes(spatial, c, axis, self.scheme)
            div -= np.diff(flux, axis=axis) / grid.dx
            right = np.take(flux, -1, axis=axis)
            left = np.take(flux, 0, axis=axis)
            # Outward flux at both ends, integrated over the face and velocities.
            out = (right - left).reshape(-1, grid.n_velocities) @ grid.v_weights
            leak += float(out.sum()) * face_area
        return div.reshape(grid.shape), leak

    def to_sparse(self) -> sparse.csr_array:
        """The assembled matrix acting on `values.ravel()` (upwind only)."""
        if not self.is_linear:
            raise ConfigError('the MUSCL scheme has no matrix representation')
        grid = self.grid
        n_v = grid.n_velocities
        n = grid.n_cells * n_v
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        data: list[np.ndarray] = []

        diag = -self.loss.ravel().copy()
        if self.transport:
            cell = np.arange(grid.n_cells)
            multi = np.unravel_index(cell, grid.spatial_shape)
            for axis in range(grid.dim):
                stride = grid.n_x ** (grid.dim - 1 - axis)
                for j, c in enumerate(self.grid.v_nodes[:, axis]):
                    if c == 0:
                        continue
                    idx = cell * n_v + j
                    diag[idx] -= abs(c) / grid.dx
                    if c > 0:
                        has = multi[axis] > 0
                        upwind = cell[has] - stride
                    else:
                        has = multi[axis] < grid.n_x - 1
                        upwind = cell[has] + stride
                    rows.append(idx[has])
                    cols.append(upwind * n_v + j)
                    data.append(np.full(int(has.sum()), abs(c) / grid.dx))
        rows.append(np.arange(n))
        cols.append(np.arange(n))
        data.append(diag)

        block = self.gain_factor[:, None, None] * self.gain_source[:, None, :]
        nz = np.nonzero(np.broadcast_to(block, (grid.n_cells, n_v, n_v)))
        rows.append(nz[0] * n_v + nz[1])
        cols.append(nz[0] * n_v + nz[2])
        data.append(np.broadcast_to(block, (grid.n_cells, n_v, n_v))[nz])

        matrix = sparse.coo_array(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )
        return matrix.tocsr()

    def max_stable_dt(self, cfl: float = CFL_POSITIVITY) -> float:
        """Largest time step at CFL number `cfl`.

        `cfl * min(dx / V, 1 / r)` where `V` is the largest l1 speed of the
        velocity nodes (halved cell width for MUSCL) and `r` the largest loss or
        gain rate.
        """
        _check_cfl(cfl)
        grid = self.grid
        gain_rate = np.abs(self.gain_source).sum(axis=1) * np.abs(self.gain_factor)
        rate = max(float(np.max(self.loss)), float(np.max(gain_rate)))
        bounds = [1.0 / rate] if rate > 0 else [np.inf]
        if self.transport:
            speed = float(np.max(np.sum(np.abs(grid.v_nodes), axis=-1)))
            width = grid.dx / (2.0 if self.scheme == 'muscl' else 1.0)
            bounds.append(width / speed)
        return cfl * float(min(bounds))

    def check_dt(self, dt: float) -> None:
        bound = self.max_stable_dt(CFL_POSITIVITY)
        if not 0 < dt <= bound * (1.0 + 1e-12):
            raise StabilityError(
                f'dt = {dt:g} violates the CFL bound {bound:g}', field='dt'
            )


def _face_fluxes(
    spatial: np.ndarray, c: np.ndarray, axis: int, scheme: Scheme
) -> np.ndarray:
    """Numerical fluxes on the `n + 1` faces along `axis`, with zero inflow."""
    pad = [(0, 0)] * spatial.ndim
    pad[axis] = (1, 1)
    padded = np.pad(spatial, pad)
    n = spatial.shape[axis]
    lower = np.take(padded, np.arange(0, n + 1), axis=axis)
    upper = np.take(padded, np.arange(1, n + 2), axis=axis)
    if scheme == 'muscl':
        diffs = np.diff(padded, axis=axis)
        slopes = minmod(
            np.take(diffs, np.arange(0, n), axis=axis),
            np.take(diffs, np.arange(1, n + 1), axis=axis),
        )
        slopes = np.pad(slopes, pad)
        lower = lower + 0.5 * np.take(slopes, np.arange(0, n + 1), axis=axis)
        upper = upper - 0.5 * np.take(slopes, np.arange(1, n + 2), axis=axis)
    return np.maximum(c, 0.0) * lower + np.minimum(c, 0.0) * upper


def assemble_generator(
    tag: OperatorTag,
    grid: PhaseGrid,
    kernel: KernelSpec,
    R: float | None = None,
    *,
    scheme: Scheme = 'upwind',
) -> GeneratorMatrix:
    """Assemble the discrete generator `tag` on `grid`.

    Parameters
    ----------
    tag
        One of `L`, `B0`, `B1`, `B`, `A1`, `A0c`, `A_surgical`.
    grid
        The phase grid.
    kernel
        For `B` and `A_surgical`, a kernel with the `Surgical` variant; otherwise
        the turning kernel `K` (any variant).
    R
        Truncation radius for `B1`, `A1` and `A0c`.
    scheme
        `'upwind'` (default) or `'muscl'`.

    Raises
    ------
    ConfigError
        If a required radius is missing, the kernel does not fit the tag, or the
        regularizing part does not fit in the box (`2R > L`) for `A1`, `A0c`,
        `A_surgical` and `B`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=1.0, n_x=16, n_v=2)
    >>> gen = assemble_generator('L', grid, KernelSpec(0.5))
    >>> gen.transport, gen.gain_nonnegative, gen.max_stable_dt()
    (True, True, 0.25)
    >>> gen.to_sparse().shape
    (32, 32)
    >>> assemble_generator('A1', grid, KernelSpec(0.5), R=0.75)
    Traceback (most recent call last):
    ...
    runtumble.errors.ConfigError: R: 2R = 1.5 exceeds the box half width L = 1
    """
    if tag not in OPERATOR_TAGS:
        raise ConfigError(f'unknown operator tag {tag!r}', field='tag')
    if scheme not in ('upwind', 'muscl'):
        raise ConfigError(f'unknown transport scheme {scheme!r}', field='scheme')
    x, v = grid.phase_points()

    def evaluate(spec: KernelSpec) -> np.ndarray:
        return np.broadcast_to(kernel_eval(spec, x, v, v_max=grid.v0), grid.shape)

    surgical = tag in ('B', 'A_surgical')
    if surgical:
        if not isinstance(kernel.variant, Surgical):
            raise ConfigError(f'tag {tag} needs a surgical kernel', field='kernel')
        R = kernel.variant.R
        K = evaluate(KernelSpec(kernel.chi, Sharp()))
        K_surgical = evaluate(kernel)
    else:
        K = evaluate(kernel)
    if tag in _TRUNCATED_TAGS and R is None:
        raise ConfigError(f'tag {tag} needs a truncation radius R', field='R')
    if R is not None and tag not in ('L', 'B0', 'B1') and 2.0 * R > grid.L:
        raise ConfigError(
            f'2R = {2.0 * R:g} exceeds the box half width L = {grid.L:g}', field='R'
        )

    zeros = np.zeros(grid.shape)
    w = grid.v_weights[None, :]
    ones = np.ones(grid.n_cells)
    phi_R = cutoff_phi(R, grid.x_nodes) if R is not None else ones
    match tag:
        case 'L':
            loss, source, factor = K, w * K, ones
        case 'B0':
            loss, source, factor = K, zeros, ones
        case 'B1':
            loss, source, factor = K, w * K, 1.0 - phi_R
        case 'B':
            loss, source, factor = K, w * (K - K_surgical), ones
        case 'A1':
            loss, source, factor = zeros, w * K, phi_R
        case 'A0c':
            loss, source, factor = zeros, w * K, 1.0 - phi_R
        case 'A_surgical':
            loss, source, factor = zeros, w * K_surgical, ones
        case _:  # pragma: no cover
            assert False
    gen = GeneratorMatrix(
        tag=tag,
        grid=grid,
        kernel=kernel,
        R=R,
        scheme=scheme,
        transport=tag not in _NO_TRANSPORT_TAGS,
        loss=np.ascontiguousarray(loss, dtype=float),
        gain_source=np.ascontiguousarray(source, dtype=float),
        gain_factor=np.ascontiguousarray(factor, dtype=float),
    )
    logger.debug(
        'assembled %s on %s cells x %s velocities (%s)',
        tag,
        grid.n_cells,
        grid.n_velocities,
        scheme,
    )
    return gen


SpatialWeight = Callable[[np.ndarray, np.ndarray], np.ndarray]


def averaging_apply(
    phi: SpatialWeight | np.ndarray | float, f: DistributionField
) -> np.ndarray:
    """Velocity average `rho(x_i) = sum_j w_j phi(x_i, v_j) f(x_i, v_j)`.

    Parameters
    ----------
    phi
        A function of `(x, v)` evaluated on `grid.phase_points()`, an array
        broadcastable to `grid.shape`, or a constant.
    f
        The field.

    Returns
    -------
    numpy.ndarray
        The average, shape `grid.spatial_shape`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=1.0, n_x=4, n_v=6)
    >>> f = DistributionField.constant(grid, 1.0)
    >>> averaging_apply(1.0, f)
    array([1., 1., 1., 1.])
    >>> bool(np.allclose(averaging_apply(lambda x, v: v[..., 0], f), 0.0))
    True
    """
    grid = f.grid
    if callable(phi):
        x, v = grid.phase_points()
        phi_values = phi(x, v)
    else:
        phi_values = phi
    weighted = np.broadcast_to(phi_values, grid.shape) * f.values
    return (weighted @ grid.v_weights).reshape(grid.spatial_shape)


def max_stable_dt(
    grid: PhaseGrid, chi: float, scheme: Scheme = 'upwind', cfl: float = CFL_POSITIVITY
) -> float:
    """CFL bound `cfl * min(dx / V, 1 / (1 + chi))` for any tag on `grid`.

    `V` is the largest l1 speed of the velocity nodes; MUSCL halves `dx`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> max_stable_dt(make_grid(1, L=1.0, n_x=16, n_v=2), 0.5)
    0.25
    >>> max_stable_dt(make_grid(1, L=1.0, n_x=16, n_v=2), 0.5, 'muscl')
    0.125
    """
    _check_cfl(cfl)
    speed = float(np.max(np.sum(np.abs(grid.v_nodes), axis=-1)))
    width = grid.dx / (2.0 if scheme == 'muscl' else 1.0)
    return cfl * min(width / speed, 1.0 / (1.0 + chi))


def _check_cfl(cfl: float) -> None:
    if not 0.0 < cfl <= CFL_POSITIVITY:
        raise StabilityError(
            f'cfl must lie in (0, {CFL_POSITIVITY:g}], got {cfl!r}', field='cfl'
        )
