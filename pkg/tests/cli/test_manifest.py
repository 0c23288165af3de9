import json
from pathlib import Path

import numpy as np
import pytest

from runtumble.__about__ import __version__
from runtumble.analysis import ProbeReport
from runtumble.cli import PipelineResult, Scenario, read_manifest, reproduce, run_pipeline, write_run
from runtumble.cli.manifest import MANIFEST_NAME, run_directory, sha256_of
from runtumble.errors import ConfigError

DRIFT = Scenario(pipeline='drift-check')
SIMULATE = Scenario.from_dict(
    {'model': {'L': 4.0, 'n_x': 32, 'n_v': 4}, 'run': {'T': 1.0}}
)


def _stochastic(value: float) -> PipelineResult:
    report = ProbeReport('particles', {'n': 100}, {'l1_distance': value, 'label': 'x'}, 'PASS')
    return PipelineResult(
        reports=[report],
        series={'count': (np.array([0.0, 1.0]), np.array([3.0, 2.0]))},
        stochastic={'particles.json': 0.1},
    )


def test_write_run(tmp_path: Path) -> None:
    result = run_pipeline(DRIFT)

    # Call the test subject
    directory = write_run(DRIFT, result, tmp_path)

    scenario_hash = DRIFT.scenario_hash()
    assert directory == run_directory(tmp_path, DRIFT) == tmp_path / scenario_hash[:12]
    assert sorted(p.name for p in directory.iterdir()) == ['drift-check.json', MANIFEST_NAME]
    manifest = read_manifest(directory / MANIFEST_NAME)
    assert manifest['code_version'] == __version__
    assert manifest['scenario_hash'] == scenario_hash
    assert Scenario.from_dict(manifest['scenario']) == DRIFT
    assert manifest['outputs'] == {'drift-check.json': sha256_of(directory / 'drift-check.json')}
    assert manifest['passed'] is True
    assert manifest['stochastic'] == {}
    report = json.loads((directory / 'drift-check.json').read_text(encoding='utf-8'))
    assert report['scenario_hash'] == scenario_hash


def test_reproduce(tmp_path: Path) -> None:
    directory = write_run(SIMULATE, run_pipeline(SIMULATE), tmp_path)

    # Call the test subject
    outcome = reproduce(directory / MANIFEST_NAME)

    assert outcome.ok
    assert outcome.divergence is None


def test_reproduce_detects_an_edited_scenario(tmp_path: Path) -> None:
    directory = write_run(DRIFT, run_pipeline(DRIFT), tmp_path)
    path = directory / MANIFEST_NAME
    manifest = json.loads(path.read_text(encoding='utf-8'))
    manifest['scenario']['model']['gamma'] = 0.05
    path.write_text(json.dumps(manifest), encoding='utf-8')

    outcome = reproduce(path)

    assert not outcome.ok
    assert outcome.divergence is not None
    assert outcome.divergence.startswith('scenario_hash: recorded')


def test_reproduce_detects_edited_outputs(tmp_path: Path) -> None:
    directory = write_run(SIMULATE, run_pipeline(SIMULATE), tmp_path)
    path = directory / MANIFEST_NAME
    series = directory / 'mass.csv'
    lines = series.read_text(encoding='utf-8').splitlines(keepends=True)
    lines[2] = '0,2\n'
    series.write_text(''.join(lines), encoding='utf-8')
    manifest = json.loads(path.read_text(encoding='utf-8'))
    manifest['outputs']['mass.csv'] = sha256_of(series)
    path.write_text(json.dumps(manifest), encoding='utf-8')

    outcome = reproduce(path)

    assert not outcome.ok
    assert outcome.divergence is not None
    assert outcome.divergence.startswith("mass.csv: line 3 recorded '0,2'")


def test_stochastic_outputs_compare_within_tolerance(tmp_path: Path) -> None:
    scenario = Scenario(pipeline='particles')
    directory = write_run(scenario, _stochastic(0.5), tmp_path)
    path = directory / MANIFEST_NAME
    assert read_manifest(path)['stochastic'] == {'particles.json': 0.1}

    # Call the test subject
    close = reproduce(path, run=lambda s, n: _stochastic(0.52))
    far = reproduce(path, run=lambda s, n: _stochastic(0.9))

    assert close.ok
    assert not far.ok
    assert far.divergence == 'particles.json: values.l1_distance recorded 0.5, reproduced 0.9'


def test_reproduce_detects_missing_outputs(tmp_path: Path) -> None:
    scenario = Scenario(pipeline='particles')
    directory = write_run(scenario, _stochastic(0.5), tmp_path)

    outcome = reproduce(directory / MANIFEST_NAME, run=lambda s, n: PipelineResult())

    assert not outcome.ok
    assert outcome.divergence == 'count.csv: not produced by the rerun'


def test_reproduce_uses_recorded_threads(tmp_path: Path) -> None:
    seen = []

    def run(scenario: Scenario, threads: int) -> PipelineResult:
        seen.append(threads)
        return _stochastic(0.5)

    directory = write_run(Scenario(pipeline='particles'), _stochastic(0.5), tmp_path, threads=3)
    assert reproduce(directory / MANIFEST_NAME, run=run).ok
    assert reproduce(directory / MANIFEST_NAME, threads=1, run=run).ok
    assert seen == [3, 1]


@pytest.mark.parametrize(
    ('text', 'match'),
    [
        (None, 'cannot read'),
        ('{"scenario"', 'not JSON'),
        ('[1, 2]', 'does not hold an object'),
        ('{"scenario": {}}', 'missing keys'),
    ],
)
def test_invalid_manifest(tmp_path: Path, text: str | None, match: str) -> None:
    path = tmp_path / MANIFEST_NAME
    if text is not None:
        path.write_text(text, encoding='utf-8')
    with pytest.raises(ConfigError, match=match) as info:
        read_manifest(path)
    assert info.value.field == 'manifest'
