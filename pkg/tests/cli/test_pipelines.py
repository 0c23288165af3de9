import math
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from runtumble.analysis import write_series_csv
from runtumble.cli import PIPELINE_RUNNERS, PIPELINES, Scenario, pipelines, run_pipeline
from runtumble.cli.pipelines import (
    SYMMETRY_TOLERANCE,
    initial_shapes,
    regression_family,
    white_noise_family,
)
from runtumble.errors import ConfigError
from runtumble.model import make_grid


def _scenario(pipeline: str, **sections: Any) -> Scenario:
    return Scenario.from_dict({'pipeline': pipeline, **sections})


SMALL = {'L': 4.0, 'n_x': 32, 'n_v': 4}
TWO_VELOCITY = {'velocity_set': 'two_velocity', 'chi': 0.9, 'L': 15.0, 'n_x': 150}


def test_every_pipeline_has_a_runner() -> None:
    assert tuple(PIPELINE_RUNNERS) == PIPELINES


def test_drift_check() -> None:
    # Call the test subject
    result = run_pipeline(_scenario('drift-check', model={'chi': 0.5, 'gamma': 0.1}))

    (report,) = result.reports
    assert report.probe == 'drift-check'
    assert report.verdict == 'PASS'
    assert result.passed
    alpha = report.values['alpha']
    assert abs(alpha - report.values['alpha_closed_form']) <= 1e-6
    assert abs(alpha - 4.1667e-4) <= 1e-6
    assert report.values['violations'] == 0


def test_drift_check_fails_for_large_gamma() -> None:
    result = run_pipeline(_scenario('drift-check', model={'gamma': 0.9}))
    (report,) = result.reports
    assert report.verdict == 'FAIL'
    assert not result.passed
    assert 0 < report.values['gamma_max'] < 0.9


def test_simulate() -> None:
    scenario = _scenario(
        'simulate',
        model=SMALL,
        run={'T': 2.0},
        probe={'probes': ['positivity', 'lyapunov', 'hypo-norms'], 'R': 1.0},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    assert [r.probe for r in result.reports] == ['simulate', 'positivity', 'lyapunov', 'hypo-norms']
    assert result.passed
    simulate = result.reports[0]
    assert simulate.values['relative_mass_drift'] <= 1e-10
    assert math.isclose(simulate.values['mass_0'], 1.0, rel_tol=1e-12)
    assert result.reports[1].values['interior_min'] > 0
    assert result.reports[3].verdict is None
    assert set(result.series) == {'mass', 'l1', 'min', 'leak', 'lyapunov'}
    t, mass = result.series['mass']
    assert t[0] == 0.0 and t[-1] == 2.0
    assert len(t) == len(mass)


def test_simulate_without_evolution() -> None:
    scenario = _scenario(
        'simulate',
        model=SMALL,
        run={'evolve': False},
        probe={'probes': ['hypo-norms'], 'R': 1.0},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    (report,) = result.reports
    assert report.probe == 'hypo-norms'
    assert result.series == {}
    a_star = report.values['a_star']
    assert a_star < 0
    assert math.isclose(report.parameters['T_max'], 20.0 / abs(a_star))
    assert math.isclose(
        report.values['tail'], report.values['X_final'] ** 2 / (2.0 * abs(a_star))
    )


@pytest.mark.parametrize('probe', ['positivity', 'lyapunov', 'weighted-decay'])
def test_trace_probes_need_the_evolution(probe: str) -> None:
    scenario = _scenario(
        'simulate', model=SMALL, run={'evolve': False}, probe={'probes': [probe]}
    )
    with pytest.raises(ConfigError, match='read the evolution trace') as info:
        run_pipeline(scenario)
    assert info.value.field == 'run.evolve'


def test_lyapunov_shapes() -> None:
    scenario = _scenario(
        'simulate',
        model={'L': 8.0, 'n_x': 64, 'n_v': 8},
        run={'T': 10.0, 'evolve': False},
        probe={'probes': ['lyapunov-shapes']},
    )

    # Call the test subject
    (report,) = run_pipeline(scenario).reports

    assert report.probe == 'lyapunov-shapes'
    assert report.values['shapes'] == [
        'gaussian_blob',
        'gaussian_blob',
        'indicator',
        'noise',
        'gaussian_blob',
    ]
    assert report.values['passed'] == [True] * 5
    assert report.verdict == 'PASS'
    for bound, W_max in zip(report.values['bound'], report.values['W_max']):
        assert W_max <= bound


def test_dissipativity() -> None:
    scenario = _scenario(
        'simulate',
        model={**SMALL, 'tag': 'B', 'kernel': 'surgical', 'R': 1.0},
        run={'T': 2.0, 'evolve': False},
        probe={'probes': ['dissipativity'], 'n_times': 4, 'T_max': 4.0},
    )

    # Call the test subject
    (report,) = run_pipeline(scenario).reports

    assert report.probe == 'dissipativity'
    assert report.verdict in ('PASS', 'FAIL')
    N = np.asarray(report.values['N'])
    assert len(N) >= 2
    assert np.all(np.isfinite(N))
    assert np.all(N > 0)


def test_dissipativity_needs_tag_b() -> None:
    scenario = _scenario(
        'simulate',
        model=SMALL,
        run={'evolve': False},
        probe={'probes': ['dissipativity']},
    )
    with pytest.raises(ConfigError, match='needs tag B') as info:
        run_pipeline(scenario)
    assert info.value.field == 'model.tag'


def test_norm_equivalence() -> None:
    scenario = _scenario(
        'simulate',
        model=SMALL,
        run={'evolve': False},
        probe={
            'probes': ['norm-equivalence'],
            'R': 1.0,
            'family_size': 3,
            'T_max': 2.0,
        },
    )

    # Call the test subject
    (report,) = run_pipeline(scenario).reports

    assert report.probe == 'norm-equivalence'
    assert report.verdict == 'PASS'
    assert len(report.values['ratios']) == 3
    assert 0 < report.values['c'] <= report.values['C'] < math.inf


def test_weighted_decay_on_b1() -> None:
    scenario = _scenario(
        'simulate',
        model={**SMALL, 'tag': 'B1', 'R': 1.0},
        run={'T': 4.0},
        probe={'probes': ['weighted-decay'], 'r_squared': 0.0},
    )
    result = run_pipeline(scenario)
    report = result.reports[-1]
    assert report.probe == 'weighted-decay'
    assert report.values['fit']['slope'] < 0
    assert report.passed == report.values['non_increasing']


@pytest.mark.parametrize(
    ('model', 'probe'),
    [
        ({**SMALL, 'tag': 'B1', 'R': 1.0}, 'lyapunov'),
        (SMALL, 'weighted-decay'),
    ],
)
def test_trace_probes_need_their_operator(model: dict[str, Any], probe: str) -> None:
    scenario = _scenario('simulate', model=model, run={'T': 1.0}, probe={'probes': [probe]})
    with pytest.raises(ConfigError, match='needs tag') as info:
        run_pipeline(scenario)
    assert info.value.field == 'model.tag'


def test_steady_two_velocity() -> None:
    scenario = _scenario(
        'steady',
        model={'velocity_set': 'two_velocity', 'chi': 0.5, 'L': 20.0, 'n_x': 400},
        probe={'steady_tolerance': 0.1},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    (report,) = result.reports
    assert report.verdict == 'PASS'
    assert 0 < report.values['l1_error'] < 0.1
    assert math.isclose(report.values['mass'], 1.0, rel_tol=1e-9)
    assert 'residual' in result.series


def test_steady_strict_tolerance_fails_upwind() -> None:
    scenario = _scenario(
        'steady',
        model={'velocity_set': 'two_velocity', 'chi': 0.5, 'L': 20.0, 'n_x': 400},
        probe={'steady_tolerance': 1e-4},
    )
    assert not run_pipeline(scenario).passed


def test_steady_ball() -> None:
    result = run_pipeline(_scenario('steady', model=SMALL))
    (report,) = result.reports
    assert 'l1_error' not in report.values
    assert report.values['min'] >= 0
    assert report.values['symmetry_defect'] <= 1e-10
    assert report.passed


def test_steady_ball_fails_on_asymmetry(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(pipelines, 'symmetry_defect', lambda f: 5 * SYMMETRY_TOLERANCE)
    (report,) = run_pipeline(_scenario('steady', model=SMALL)).reports
    assert report.values['symmetry_defect'] == 5 * SYMMETRY_TOLERANCE
    assert report.verdict == 'FAIL'


def test_spectrum_with_convergence() -> None:
    scenario = _scenario(
        'spectrum',
        model=TWO_VELOCITY,
        run={'T': 30.0},
        probe={'n_probes': 2, 'probes': ['convergence']},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    spectrum, convergence = result.reports
    assert spectrum.probe == 'spectrum'
    assert spectrum.parameters['a_star'] < 0
    assert spectrum.verdict in ('PASS', 'FAIL')
    assert convergence.probe == 'convergence'
    assert len(convergence.values['slopes']) == 10
    assert all(slope < 0 for slope in convergence.values['slopes'])
    assert convergence.values['krylov_relative_disagreement'] >= 0


def test_disperse() -> None:
    scenario = _scenario(
        'disperse',
        model={'L': 30.0, 'n_x': 300, 'n_v': 16, 'gamma': 0.0},
        run={'T': 10.0},
        probe={'n_times': 8},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    disperse, contraction = result.reports
    assert disperse.probe == 'disperse'
    assert disperse.verdict == 'PASS'
    assert contraction.probe == 'b0-contraction'
    assert set(result.series) == {'Q_blob0', 'Q_blob1', 'Q_blob2', 'b0_norm'}
    t, norms = result.series['b0_norm']
    assert len(t) == len(norms) == 8
    assert np.all(np.diff(norms) <= 0)


def test_average_probe() -> None:
    scenario = _scenario(
        'average-probe',
        model={'L': 3.0, 'n_x': 32, 'n_v': 8},
        probe={'family_size': 3, 'T_max': 2.0, 'n_quadrature': 33},
    )
    (report,) = run_pipeline(scenario).reports
    values = report.values
    assert values['max_J'] > 0
    assert math.isclose(values['ratio'], values['max_J_refined'] / values['max_J'])
    assert values['leakage'] >= 0
    assert report.passed == (abs(values['ratio'] - 1.0) <= 0.2)


def test_particles() -> None:
    scenario = _scenario(
        'particles',
        seed=4,
        model=SMALL,
        run={'T': 1.0},
        probe={'probes': ['confinement']},
        particles={'n': 2000, 'times': [0.5, 1.0], 'tolerance': 10.0},
    )

    # Call the test subject
    result = run_pipeline(scenario)

    particles, confinement = result.reports
    assert particles.verdict == 'PASS'
    assert len(particles.values['l1_distance']) == 2
    assert all(0 <= d <= 2 for d in particles.values['l1_distance'])
    assert len(particles.values['overflow']) == 2
    assert confinement.probe == 'confinement'
    assert result.stochastic == {
        'particles.json': 3.0 / math.sqrt(2000),
        'confinement.json': 3.0 / math.sqrt(2000),
    }


def test_particles_without_comparison() -> None:
    scenario = _scenario(
        'particles',
        model=SMALL,
        particles={'n': 500, 'times': [0.5], 'compare': False},
    )
    (report,) = run_pipeline(scenario).reports
    assert report.verdict is None
    assert 'l1_distance' not in report.values


def test_particles_need_the_ball() -> None:
    scenario = _scenario('particles', model=TWO_VELOCITY, particles={'n': 10})
    with pytest.raises(ConfigError, match='velocity ball'):
        run_pipeline(scenario)


def test_fit_decay(tmp_path: Path) -> None:
    t = np.linspace(0.0, 20.0, 201)
    path = write_series_csv(tmp_path / 'l1.csv', t, 2.0 * np.exp(-0.3 * t), 'abc')
    scenario = _scenario('fit-decay', probe={'input': str(path)})

    # Call the test subject
    (report,) = run_pipeline(scenario).reports

    assert report.verdict == 'PASS'
    assert math.isclose(report.values['slope'], -0.3, rel_tol=1e-9)
    assert report.parameters['input_scenario_hash'] == 'abc'
    assert report.parameters['mode'] == 'exponential'


def test_fit_decay_input(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match='input CSV') as info:
        run_pipeline(_scenario('fit-decay'))
    assert info.value.field == 'probe.input'
    missing = _scenario('fit-decay', probe={'input': str(tmp_path / 'absent.csv')})
    with pytest.raises(ConfigError, match='cannot read'):
        run_pipeline(missing)


def test_regression_family() -> None:
    grid = make_grid(1, L=12.0, n_x=96, n_v=4)
    fields = regression_family(grid, 0.5, seed=1)
    assert len(fields) == 10
    for f in fields:
        assert math.isclose(f.integrate(), 1.0, rel_tol=1e-12)
        assert f.is_nonnegative()


def test_white_noise_family() -> None:
    grid = make_grid(1, L=3.0, n_x=16, n_v=4)
    build = white_noise_family(3, seed=2)
    one, two = build(grid), build(grid)
    assert len(one) == 3
    for a, b in zip(one, two):
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.values[:, 0], a.values[:, -1])
    assert not np.array_equal(one[0].values, one[1].values)


def test_initial_shapes() -> None:
    grid = make_grid(1, L=12.0, n_x=96, n_v=4)
    shapes = initial_shapes(grid, seed=1)
    assert len(shapes) == 5
    assert all(shape.skew == 0.0 for shape in shapes)
    for shape in shapes:
        assert math.isclose(shape.build(grid, 0.5, 1).integrate(), 1.0, rel_tol=1e-12)
