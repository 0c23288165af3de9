import math
from pathlib import Path
from typing import Any

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from runtumble.cli import (
    InitialCondition,
    ModelSection,
    ProbeSection,
    RunSection,
    Scenario,
    load_scenario,
)
from runtumble.errors import ConfigError
from runtumble.model import Sharp, Surgical, make_grid, two_velocity_grid

SMALL = {'L': 8.0, 'n_x': 64, 'n_v': 4}
CONFIGS = sorted((Path(__file__).parents[2] / 'configs').glob('*.toml'))


def test_defaults() -> None:
    scenario = Scenario()
    assert scenario.pipeline == 'simulate'
    assert scenario.model.chi == 0.5
    assert scenario.model.n_x == 1200
    assert scenario.run.T == 50.0
    assert scenario.probe.probes == ()
    assert scenario.particles.times == (20.0,)


def test_hash_is_stable() -> None:
    one = Scenario.from_dict({'pipeline': 'steady', 'model': {'chi': 0.4}})
    two = Scenario.from_dict({'model': {'chi': 0.4}, 'pipeline': 'steady'})
    assert one == two
    assert one.scenario_hash() == two.scenario_hash()
    assert len(one.scenario_hash()) == 64
    assert one.scenario_hash() != Scenario(pipeline='steady').scenario_hash()


def test_canonical_json() -> None:
    text = Scenario().canonical_json()
    assert ' ' not in text
    assert text.startswith('{"initial":')
    assert Scenario.from_dict(Scenario().to_dict()) == Scenario()


def test_coercion() -> None:
    scenario = Scenario.from_dict(
        {
            'model': {'L': 10, 'R': 2},
            'probe': {'probes': ['lyapunov'], 'window': [1, 5], 'blobs': [3, 0]},
            'particles': {'times': [1, 2.5]},
        }
    )
    assert scenario.model.L == 10.0 and isinstance(scenario.model.L, float)
    assert scenario.model.R == 2.0
    assert scenario.probe.probes == ('lyapunov',)
    assert scenario.probe.window_or_none() == (1.0, 5.0)
    assert scenario.probe.blobs == (3.0, 0.0)
    assert scenario.particles.times == (1.0, 2.5)


@pytest.mark.parametrize(
    ('data', 'field', 'match'),
    [
        ({'color': 'red'}, 'color', 'unknown key'),
        ({'model': {'colour': 1}}, 'model.colour', 'unknown key'),
        ({'model': 3}, 'model', 'expected a table'),
        ({'model': {'chi': 'half'}}, 'model.chi', 'expected float'),
        ({'model': {'chi': True}}, 'model.chi', 'expected float'),
        ({'model': {'n_x': 12.5}}, 'model.n_x', 'expected int'),
        ({'model': {'tag': 'C'}}, 'model.tag', 'expected one of'),
        ({'pipeline': 'plot'}, 'pipeline', 'expected one of'),
        ({'seed': -1}, 'seed', 'nonnegative'),
        ({'probe': {'probes': 'lyapunov'}}, 'probe.probes', 'expected a list'),
        ({'model': {'chi': 1.5}}, 'model.chi', r'\(0, 1\)'),
        ({'model': {'dim': 3}}, 'model.dim', '1 or 2'),
        ({'model': {'tag': 'B1'}}, 'model.R', 'truncation radius'),
        ({'model': {'tag': 'B', 'R': 1.0}}, 'model.kernel', 'surgical'),
        ({'model': {'kernel': 'surgical'}}, 'model.R', 'needs R'),
        (
            {'model': {'kernel': 'surgical', 'tag': 'B', 'R': 20.0}},
            'model.R',
            'box half width',
        ),
        ({'model': {'dim': 2, 'velocity_set': 'two_velocity'}}, 'model', 'dim 1'),
        ({'run': {'T': 0}}, 'run.T', 'positive'),
        ({'run': {'cfl': 0.9}}, 'run', 'cfl'),
        ({'run': {'evolve': 'no'}}, 'run.evolve', 'expected bool'),
        ({'initial': {'skew': 1.0}}, 'initial.skew', 'skew'),
        ({'probe': {'window': [5, 1]}}, 'probe.window', 't1 < t2'),
        ({'probe': {'ell': 2.0}}, 'probe.ell', 'ell < k'),
        ({'probe': {'T_max': 0.0}}, 'probe.T_max', 'positive'),
        ({'particles': {'times': [2, 1]}}, 'particles.times', 'increasing'),
    ],
)
def test_invalid(data: dict[str, Any], field: str, match: str) -> None:
    with pytest.raises(ConfigError, match=match) as info:
        Scenario.from_dict(data)
    assert info.value.field == field
    assert str(info.value).startswith(f'{field}: ')


def test_load_scenario(tmp_path: Path) -> None:
    path = tmp_path / 'steady.toml'
    path.write_text(
        'pipeline = "steady"\n'
        'seed = 7\n'
        '\n'
        '[model]\n'
        'chi = 0.5\n'
        'L = 20\n'
        'n_x = 400\n'
        'velocity_set = "two_velocity"\n'
        '\n'
        '[probe]\n'
        'method = "power_iteration"\n',
        encoding='utf-8',
    )

    # Call the test subject
    scenario = load_scenario(path)

    assert scenario.pipeline == 'steady'
    assert scenario.seed == 7
    assert scenario.model.L == 20.0
    grid = scenario.model.grid()
    assert grid.velocity_set == 'two_velocity' and grid.n_x == 400
    assert scenario.probe.method == 'power_iteration'


def test_load_missing_scenario(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match='cannot read') as info:
        load_scenario(tmp_path / 'absent.toml')
    assert info.value.field == 'config'


def test_load_malformed_scenario(tmp_path: Path) -> None:
    path = tmp_path / 'bad.toml'
    path.write_text('[model\nchi = 0.5\n', encoding='utf-8')
    with pytest.raises(ConfigError) as info:
        load_scenario(path)
    assert info.value.field == 'config'


def test_with_overrides() -> None:
    scenario = Scenario()

    # Call the test subject
    changed = scenario.with_overrides(
        **{'model.chi': 0.3, 'run.T': 2.0, 'seed': 5, 'probe.probes': ('lyapunov',), 'model.L': None}
    )

    assert changed.model.chi == 0.3
    assert changed.model.L == scenario.model.L
    assert changed.run.T == 2.0
    assert changed.seed == 5
    assert changed.probe.probes == ('lyapunov',)
    assert scenario == Scenario()
    assert changed.scenario_hash() != scenario.scenario_hash()
    with pytest.raises(ConfigError, match='model.chi'):
        scenario.with_overrides(**{'model.chi': 1.0})


def test_model_generator() -> None:
    model = ModelSection(**SMALL)
    gen = model.generator()
    assert gen.tag == 'L'
    assert gen.grid == model.grid()
    assert gen.grid.n_x == 64 and gen.grid.n_v == 4
    assert model.generator('B0').tag == 'B0'


def test_surgical_model() -> None:
    model = ModelSection(**SMALL, kernel='surgical', R=1.5, tag='B')
    assert model.kernel_spec().variant == Surgical(1.5, 0.1, 0.1, 0.1)
    assert model.generator().tag == 'B'
    # The untruncated operators run on the sharp kernel.
    assert model.generator('L').kernel.variant == Sharp()


def test_run_section() -> None:
    policy = RunSection(T=4.0, dt=0.01, record_every=2).dt_policy()
    assert policy.dt == 0.01
    assert policy.record_every == 2


@pytest.mark.parametrize('shape', ['gaussian_blob', 'indicator', 'noise'])
@given(skew=st.floats(min_value=-0.9, max_value=0.9))
def test_initial_conditions_have_unit_mass(shape: Any, skew: float) -> None:
    grid = make_grid(1, L=4.0, n_x=32, n_v=4)
    f = InitialCondition(shape, x0=1.0, sigma=0.8, skew=skew).build(grid, 0.5, seed=3)
    assert math.isclose(f.integrate(), 1.0, rel_tol=1e-12)
    assert f.is_nonnegative()


def test_narrow_indicator_takes_one_cell() -> None:
    grid = make_grid(1, L=4.0, n_x=32, n_v=4)
    f = InitialCondition('indicator', x0=0.1, r=1e-6).build(grid, 0.5)
    assert np.count_nonzero(f.values[:, 0]) == 1


def test_noise_is_seeded() -> None:
    grid = make_grid(1, L=4.0, n_x=32, n_v=4)
    noise = InitialCondition('noise')
    assert np.array_equal(noise.build(grid, 0.5, 1).values, noise.build(grid, 0.5, 1).values)
    assert not np.array_equal(noise.build(grid, 0.5, 1).values, noise.build(grid, 0.5, 2).values)
    pinned = InitialCondition('noise', seed=9)
    assert np.array_equal(pinned.build(grid, 0.5, 1).values, pinned.build(grid, 0.5, 2).values)


def test_two_velocity_exact() -> None:
    grid = two_velocity_grid(L=10.0, n_x=100)
    f = InitialCondition('two_velocity_exact').build(grid, 0.5)
    x = grid.x_centers
    assert np.allclose(f.values[:, 0], 0.25 * np.exp(-0.5 * np.abs(x)), rtol=1e-14)
    assert np.array_equal(f.values[:, 0], f.values[:, 1])
    with pytest.raises(ConfigError, match='two_velocity') as info:
        InitialCondition('two_velocity_exact').build(make_grid(1, L=4.0, n_x=8, n_v=4), 0.5)
    assert info.value.field == 'initial.shape'


def test_probe_section_window() -> None:
    assert ProbeSection().window_or_none() is None
    assert ProbeSection(window=(2.0, 3.0)).window_or_none() == (2.0, 3.0)


@pytest.mark.parametrize('path', CONFIGS, ids=[p.stem for p in CONFIGS])
def test_shipped_configs_load(path: Path) -> None:
    scenario = load_scenario(path)
    assert scenario.pipeline in path.read_text(encoding='utf-8')
