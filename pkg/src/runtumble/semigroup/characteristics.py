"""Exact evolution along characteristics for the damped free transport.

Both `B0 f = -v.grad(f) - K f` (sharp kernel) and `T f = -v.grad(f) - f` are
solved by

    f(t, x, v) = f0(x - v t, v) exp(-int_0^t k(x - v s, v) ds)

with `k = K` or `k = 1`. For the sharp kernel `sign((x - v s).v)` switches at most
once, at `s* = (x.v)/|v|^2`, so the damping integral is a two-piece exact sum.
"""

from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import ndimage

from runtumble.errors import DomainError
from runtumble.model import DistributionField, PhaseGrid
from runtumble.model.constants import check_chi

Extension = Literal['zero', 'edge', 'periodic']


def damping_integral(chi: float, x: ArrayLike, v: ArrayLike, t: float) -> np.ndarray:
    """`int_0^t K(x - v s, v) ds` for the sharp kernel, in closed form.

    The last axis of `x` and `v` holds the components; scalars are 1-vectors.

    Examples
    --------
    No switch: `x - v s > 0` throughout.

    >>> float(damping_integral(0.5, 2.0, 0.25, 1.0))
    1.5

    Switch at `s* = 0.4`: `1.5 * 0.4 + 0.5 * 0.6`.

    >>> round(float(damping_integral(0.5, 0.1, 0.25, 1.0)), 12)
    0.9
    """
    if t < 0:
        raise DomainError(f't must be nonnegative, got {t!r}')
    x_ = np.asarray(x, dtype=float)
    v_ = np.asarray(v, dtype=float)
    if x_.ndim == 0:
        x_ = x_[None]
    if v_.ndim == 0:
        v_ = v_[None]
    a = np.sum(x_ * v_, axis=-1)
    b = np.sum(v_ * v_, axis=-1)
    s_star = np.divide(a, b, out=np.zeros(np.broadcast(a, b).shape), where=b > 0)
    plus_time = np.clip(s_star, 0.0, t)
    # v = 0 keeps sign(x.v) = 0 for the whole flight.
    return np.where(b > 0, t + chi * (2.0 * plus_time - t), t)


def _shift_interpolate(
    grid: PhaseGrid, values: np.ndarray, t: float, extension: Extension
) -> np.ndarray:
    """Values of `f0(x - v t, v)` at every node."""
    spatial = values.reshape(*grid.spatial_shape, grid.n_velocities)
    if extension == 'periodic':
        return _fourier_shift(grid, spatial, t).reshape(grid.shape)
    mode = 'grid-constant' if extension == 'zero' else 'nearest'
    out = np.empty(grid.shape)
    for j, v in enumerate(grid.v_nodes):
        foot = grid.x_nodes - v * t
        # Index coordinates: cell i has its center at -L + (i + 1/2) dx.
        coords = (foot + grid.L) / grid.dx - 0.5
        out[:, j] = ndimage.map_coordinates(
            spatial[..., j], coords.T, order=1, mode=mode, cval=0.0
        )
    return out


def _fourier_shift(grid: PhaseGrid, spatial: np.ndarray, t: float) -> np.ndarray:
    axes = tuple(range(grid.dim))
    freqs = 2.0 * np.pi * np.fft.fftfreq(grid.n_x, d=grid.dx)
    xi = np.meshgrid(*([freqs] * grid.dim), indexing='ij')
    spectrum = np.fft.fftn(spatial, axes=axes)
    phase = sum(xi[a][..., None] * grid.v_nodes[:, a] for a in range(grid.dim))
    shifted = np.fft.ifftn(spectrum * np.exp(-1j * phase * t), axes=axes)
    return shifted.real


def b0_evolve_exact(
    f0: DistributionField,
    t: float,
    chi: float,
    *,
    extension: Extension = 'zero',
) -> DistributionField:
    """`S_B0(t) f0` by the characteristics formula, for the sharp kernel.

    Parameters
    ----------
    f0
        Initial field.
    t
        Time, nonnegative.
    chi
        Tumbling bias.
    extension
        How `f0` is continued outside the box: `'zero'` (linear decay to zero over
        one cell), `'edge'` (constant continuation) or `'periodic'` (period `2L`,
        shifted exactly in Fourier space). Spatial lookup is linear interpolation
        except in the periodic case.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=2.0, n_x=8, n_v=2)
    >>> f0 = DistributionField.constant(grid, 1.0)
    >>> bool(np.array_equal(b0_evolve_exact(f0, 0.0, 0.5).values, f0.values))
    True
    """
    check_chi(chi)
    if t < 0:
        raise DomainError(f't must be nonnegative, got {t!r}')
    if t == 0:
        return f0.with_values(f0.values.copy())
    grid = f0.grid
    x, v = grid.phase_points()
    shifted = _shift_interpolate(grid, f0.values, t, extension)
    return f0.with_values(shifted * np.exp(-damping_integral(chi, x, v, t)))


def transport_damped_evolve(
    f0: DistributionField,
    t: float,
    *,
    extension: Extension = 'periodic',
) -> DistributionField:
    """`S_T(t) f0 = f0(x - v t, v) exp(-t)`, the damped free transport.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=2.0, n_x=8, n_v=4)
    >>> f = transport_damped_evolve(DistributionField.constant(grid, 1.0), 1.0)
    >>> bool(np.allclose(f.values, np.exp(-1.0)))
    True
    """
    if t < 0:
        raise DomainError(f't must be nonnegative, got {t!r}')
    if t == 0:
        return f0.with_values(f0.values.copy())
    shifted = _shift_interpolate(f0.grid, f0.values, t, extension)
    return f0.with_values(shifted * np.exp(-t))
