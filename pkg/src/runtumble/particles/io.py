"""Ensemble snapshots on disk.

The binary dump is columnar little-endian: two 64-bit integers `dim` and `n`, the
speed bound `v_max` as a 64-bit float, then the `n x dim` positions and the
`n x dim` velocities as 64-bit floats.
"""

from pathlib import Path

import numpy as np

from runtumble.errors import ConfigError

from .ensemble import ParticleEnsemble

_HEADER = np.dtype('<i8')
_VALUES = np.dtype('<f8')
_HEADER_SIZE = 2 * _HEADER.itemsize + _VALUES.itemsize


def write_binary(e: ParticleEnsemble, path: str | Path) -> Path:
    """Write the binary dump of `e` to `path`."""
    path = Path(path)
    with path.open('wb') as f:
        f.write(np.asarray([e.dim, e.n], dtype=_HEADER).tobytes())
        f.write(np.asarray([e.v_max], dtype=_VALUES).tobytes())
        f.write(np.ascontiguousarray(e.positions, dtype=_VALUES).tobytes())
        f.write(np.ascontiguousarray(e.velocities, dtype=_VALUES).tobytes())
    return path


def read_binary(path: str | Path, *, seed: int = 0, time: float = 0.0) -> ParticleEnsemble:
    """Read a binary dump written by `write_binary()`.

    The dump holds no random state; `seed` and `time` set those of the result.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_SIZE:
        raise ConfigError(f'{path}: truncated particle dump')
    dim, n = (int(a) for a in np.frombuffer(raw, dtype=_HEADER, count=2))
    (v_max,) = np.frombuffer(raw, dtype=_VALUES, count=1, offset=2 * _HEADER.itemsize)
    if not v_max > 0:
        raise ConfigError(f'{path}: speed bound must be positive, got {v_max:g}')
    payload = len(raw) - _HEADER_SIZE
    if dim < 1 or n < 0 or payload != 2 * n * dim * _VALUES.itemsize:
        raise ConfigError(
            f'{path}: expected {2 * n * dim} values for n={n}, dim={dim}, found '
            f'{payload / _VALUES.itemsize:g}'
        )
    values = np.frombuffer(raw, dtype=_VALUES, offset=_HEADER_SIZE)
    positions = values[: n * dim].reshape(n, dim).astype(float)
    velocities = values[n * dim :].reshape(n, dim).astype(float)
    return ParticleEnsemble(
        positions, velocities, seed=seed, time=time, v_max=float(v_max)
    )


def write_csv(e: ParticleEnsemble, path: str | Path) -> Path:
    """Write `x1..xd,v1..vd` rows with full double precision."""
    path = Path(path)
    header = ','.join(
        [f'x{a + 1}' for a in range(e.dim)] + [f'v{a + 1}' for a in range(e.dim)]
    )
    np.savetxt(
        path,
        np.hstack([e.positions, e.velocities]),
        fmt='%.17g',
        delimiter=',',
        header=header,
        comments='',
    )
    return path
