from pathlib import Path

import numpy as np
import pytest

from runtumble.errors import ConfigError
from runtumble.particles import (
    ParticleEnsemble,
    particles_step,
    read_binary,
    write_binary,
    write_csv,
)


@pytest.fixture
def ensemble() -> ParticleEnsemble:
    e = ParticleEnsemble.at_origin(25, 2, seed=6)
    return particles_step(e, 1.5, 0.4)


def test_binary_dump(ensemble: ParticleEnsemble, tmp_path: Path) -> None:
    path = write_binary(ensemble, tmp_path / 'e.bin')
    assert path.stat().st_size == 24 + 2 * 25 * 2 * 8
    back = read_binary(path, seed=6, time=1.5)
    assert np.array_equal(back.positions, ensemble.positions)
    assert np.array_equal(back.velocities, ensemble.velocities)
    assert (back.seed, back.time, back.v_max) == (6, 1.5, ensemble.v_max)


@pytest.mark.parametrize('cut', [4, 16 + 3, 24 + 8 * 10])
def test_truncated_dump(ensemble: ParticleEnsemble, tmp_path: Path, cut: int) -> None:
    path = write_binary(ensemble, tmp_path / 'e.bin')
    path.write_bytes(path.read_bytes()[:cut])
    with pytest.raises(ConfigError):
        read_binary(path)


def test_binary_dump_keeps_the_speed_bound(tmp_path: Path) -> None:
    velocities = np.asarray([[1.0], [-1.0], [1.0]])
    e = ParticleEnsemble(np.zeros((3, 1)), velocities, seed=2, v_max=1.0)
    back = read_binary(write_binary(e, tmp_path / 'e.bin'))
    assert back.v_max == 1.0
    assert np.array_equal(back.velocities, velocities)


def test_dump_with_a_bad_speed_bound(ensemble: ParticleEnsemble, tmp_path: Path) -> None:
    path = write_binary(ensemble, tmp_path / 'e.bin')
    raw = bytearray(path.read_bytes())
    raw[16:24] = np.asarray([-1.0], dtype='<f8').tobytes()
    path.write_bytes(bytes(raw))
    with pytest.raises(ConfigError, match='speed bound'):
        read_binary(path)


def test_csv(ensemble: ParticleEnsemble, tmp_path: Path) -> None:
    path = write_csv(ensemble, tmp_path / 'e.csv')
    lines = path.read_text().splitlines()
    assert lines[0] == 'x1,x2,v1,v2'
    table = np.loadtxt(path, delimiter=',', skiprows=1)
    assert np.array_equal(table[:, :2], ensemble.positions)
    assert np.array_equal(table[:, 2:], ensemble.velocities)
