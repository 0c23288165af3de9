import json
from pathlib import Path

import numpy as np
import pytest

from runtumble.__about__ import __version__
from runtumble.analysis import write_series_csv
from runtumble.cli import Scenario, build_parser, main
from runtumble.cli.main import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, OUT_ENV, resolve_scenario
from runtumble.cli.manifest import MANIFEST_NAME, run_directory


@pytest.fixture
def out(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    root = tmp_path / 'out'
    monkeypatch.setenv(OUT_ENV, str(root))
    return root


def test_drift_check_passes(out: Path) -> None:
    # Call the test subject
    code = main(['drift-check', '--chi', '0.5', '--gamma', '0.1'])

    assert code == EXIT_OK
    scenario = Scenario(pipeline='drift-check')
    directory = run_directory(out, scenario)
    assert (directory / MANIFEST_NAME).exists()
    report = json.loads((directory / 'drift-check.json').read_text(encoding='utf-8'))
    assert report['verdict'] == 'PASS'


def test_drift_check_fails(out: Path) -> None:
    assert main(['drift-check', '--gamma', '0.9']) == EXIT_FAIL


def test_out_option(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(OUT_ENV, raising=False)
    assert main(['--out', str(tmp_path), 'drift-check']) == EXIT_OK
    assert main(['drift-check', '--out', str(tmp_path / 'after')]) == EXIT_OK
    scenario = Scenario(pipeline='drift-check')
    assert (run_directory(tmp_path, scenario) / MANIFEST_NAME).exists()
    assert (run_directory(tmp_path / 'after', scenario) / MANIFEST_NAME).exists()


def test_environment_overrides_out(out: Path, tmp_path: Path) -> None:
    assert main(['--out', str(tmp_path / 'ignored'), 'drift-check']) == EXIT_OK
    assert out.exists()
    assert not (tmp_path / 'ignored').exists()


def test_missing_config(out: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = main(['--config', str(tmp_path / 'absent.toml'), 'run'])
    assert code == EXIT_CONFIG
    assert 'runtumble: error: config: cannot read' in capsys.readouterr().err


def test_malformed_config(out: Path, tmp_path: Path) -> None:
    path = tmp_path / 'bad.toml'
    path.write_text('pipeline = \n', encoding='utf-8')
    assert main(['--config', str(path), 'run']) == EXIT_CONFIG


def test_invalid_override(out: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(['drift-check', '--chi', '1.5']) == EXIT_CONFIG
    assert 'model.chi' in capsys.readouterr().err
    assert not out.exists()


def test_run_from_config(out: Path, tmp_path: Path) -> None:
    path = tmp_path / 'drift.toml'
    path.write_text('pipeline = "drift-check"\n\n[model]\ngamma = 0.05\n', encoding='utf-8')

    assert main(['--config', str(path), 'run']) == EXIT_OK

    scenario = Scenario.from_dict({'pipeline': 'drift-check', 'model': {'gamma': 0.05}})
    assert (run_directory(out, scenario) / 'drift-check.json').exists()


def test_fit_decay(out: Path, tmp_path: Path) -> None:
    t = np.linspace(0.0, 10.0, 101)
    csv = write_series_csv(tmp_path / 'l1.csv', t, np.exp(-t), 'feed')
    assert main(['fit-decay', '--input', str(csv)]) == EXIT_OK


def test_fit_outside_its_domain_fails(
    out: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    t = np.linspace(0.0, 10.0, 101)
    csv = write_series_csv(tmp_path / 'l1.csv', t, -np.exp(-t), 'feed')
    assert main(['fit-decay', '--input', str(csv)]) == EXIT_FAIL
    assert 'positive and finite' in capsys.readouterr().err


def test_missing_certificate_fails(out: Path) -> None:
    argv = ['simulate', '--gamma', '0.9', '--L', '4', '--n-x', '32', '--n-v', '4']
    assert main([*argv, '--T', '0.5', '--probe', 'lyapunov']) == EXIT_FAIL


def test_reproduce(out: Path) -> None:
    assert main(['drift-check']) == EXIT_OK
    manifest = run_directory(out, Scenario(pipeline='drift-check')) / MANIFEST_NAME

    assert main(['reproduce', str(manifest)]) == EXIT_OK

    data = json.loads(manifest.read_text(encoding='utf-8'))
    data['scenario_hash'] = '0' * 64
    manifest.write_text(json.dumps(data), encoding='utf-8')
    assert main(['reproduce', str(manifest)]) == EXIT_FAIL


def test_reproduce_needs_a_manifest(out: Path, tmp_path: Path) -> None:
    assert main(['reproduce', str(tmp_path / MANIFEST_NAME)]) == EXIT_CONFIG


def test_resolve_scenario() -> None:
    args = build_parser().parse_args(
        ['--seed', '4', 'simulate', '--chi', '0.3', '--probe', 'lyapunov', '--probe', 'positivity']
    )

    # Call the test subject
    scenario = resolve_scenario(args)

    assert scenario.pipeline == 'simulate'
    assert scenario.seed == 4
    assert scenario.model.chi == 0.3
    assert scenario.probe.probes == ('lyapunov', 'positivity')
    assert scenario.model.L == Scenario().model.L


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as info:
        main(['--version'])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_subcommand_is_required() -> None:
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
