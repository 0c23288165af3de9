"""Run directories, manifests and reproduction of recorded runs."""

import dataclasses
import hashlib
import json
import logging
import math
import tempfile
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from runtumble.__about__ import __version__
from runtumble.analysis import write_series_csv
from runtumble.errors import ConfigError

from .config import Scenario
from .pipelines import PipelineResult, run_pipeline

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
MANIFEST_KEYS = (
    'code_version',
    'scenario',
    'scenario_hash',
    'seed',
    'threads',
    'outputs',
    'stochastic',
)


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_directory(out_root: Path | str, scenario: Scenario) -> Path:
    """`<out_root>/<first 12 hex digits of the scenario hash>`."""
    return Path(out_root) / scenario.scenario_hash()[:12]


def write_run(
    scenario: Scenario, result: PipelineResult, out_root: Path | str, threads: int = 1
) -> Path:
    """Write reports, series and `manifest.json`; return the run directory."""
    scenario_hash = scenario.scenario_hash()
    directory = run_directory(out_root, scenario)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for report in result.reports:
        stamped = dataclasses.replace(report, scenario_hash=scenario_hash)
        written.append(stamped.write_json(directory))
    for name, (t, values) in result.series.items():
        written.append(write_series_csv(directory / f'{name}.csv', t, values, scenario_hash))
    manifest = {
        'code_version': __version__,
        'scenario': scenario.to_dict(),
        'scenario_hash': scenario_hash,
        'seed': scenario.seed,
        'threads': threads,
        'outputs': {path.name: sha256_of(path) for path in written},
        'stochastic': dict(result.stochastic),
        'passed': result.passed,
    }
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    logger.info('wrote %d outputs to %s', len(written), directory)
    return directory


def read_manifest(path: Path | str) -> dict[str, Any]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except OSError as e:
        raise ConfigError(f'cannot read {path}: {e.strerror}', field='manifest') from e
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path} is not JSON: {e}', field='manifest') from e
    if not isinstance(data, dict):
        raise ConfigError(f'{path} does not hold an object', field='manifest')
    missing = [key for key in MANIFEST_KEYS if key not in data]
    if missing:
        raise ConfigError(f'missing keys {missing}', field='manifest')
    return data


@dataclass(frozen=True)
class Reproduction:
    """Outcome of `reproduce()`.

    Attributes
    ----------
    ok
        Whether every recorded output was reproduced.
    divergence
        The first divergent record, if any.
    directory
        Where the rerun wrote its outputs (removed after the comparison).
    """

    ok: bool
    divergence: str | None = None
    directory: Path | None = None


def _numbers(obj: Any, prefix: str = '') -> Iterator[tuple[str, Any]]:
    match obj:
        case dict():
            for key in sorted(obj):
                yield from _numbers(obj[key], f'{prefix}.{key}' if prefix else str(key))
        case list():
            for i, value in enumerate(obj):
                yield from _numbers(value, f'{prefix}[{i}]')
        case _:
            yield prefix, obj


def _compare_json(name: str, recorded: Path, rerun: Path, tolerance: float) -> str | None:
    old = list(_numbers(json.loads(recorded.read_text(encoding='utf-8'))))
    new = list(_numbers(json.loads(rerun.read_text(encoding='utf-8'))))
    if [k for k, _ in old] != [k for k, _ in new]:
        return f'{name}: the records differ in structure'
    for (key, a), (_, b) in zip(old, new):
        numeric = isinstance(a, int | float) and not isinstance(a, bool)
        if numeric and isinstance(b, int | float) and not isinstance(b, bool):
            if not math.isclose(a, b, rel_tol=tolerance, abs_tol=tolerance):
                return f'{name}: {key} recorded {a!r}, reproduced {b!r}'
        elif a != b:
            return f'{name}: {key} recorded {a!r}, reproduced {b!r}'
    return None


def _compare_lines(name: str, recorded: Path, rerun: Path) -> str:
    old = recorded.read_text(encoding='utf-8').splitlines()
    new = rerun.read_text(encoding='utf-8').splitlines()
    for i, (a, b) in enumerate(zip(old, new), start=1):
        if a != b:
            return f'{name}: line {i} recorded {a!r}, reproduced {b!r}'
    return f'{name}: recorded {len(old)} lines, reproduced {len(new)}'


def reproduce(
    manifest_path: Path | str,
    *,
    threads: int | None = None,
    run: Callable[[Scenario, int], PipelineResult] = run_pipeline,
) -> Reproduction:
    """Rerun a recorded scenario and compare its outputs with the recorded ones.

    Deterministic outputs must have the recorded SHA-256. Outputs listed under
    `stochastic` are compared number by number within their tolerance, against the
    files next to the manifest.

    Raises
    ------
    ConfigError
        If the manifest is unreadable or its scenario is invalid.
    """
    manifest_path = Path(manifest_path)
    data = read_manifest(manifest_path)
    scenario = Scenario.from_dict(data['scenario'])
    recomputed = scenario.scenario_hash()
    if recomputed != data['scenario_hash']:
        return Reproduction(
            ok=False,
            divergence=(
                f'scenario_hash: recorded {data["scenario_hash"]}, recomputed {recomputed}'
            ),
        )
    n_threads = threads if threads is not None else int(data['threads'])
    recorded_dir = manifest_path.parent
    with tempfile.TemporaryDirectory(prefix='runtumble-') as tmp:
        directory = write_run(scenario, run(scenario, n_threads), tmp, n_threads)
        for name, digest in sorted(data['outputs'].items()):
            rerun = directory / name
            if not rerun.exists():
                return Reproduction(False, f'{name}: not produced by the rerun', directory)
            if name in data['stochastic']:
                recorded = recorded_dir / name
                if not recorded.exists():
                    return Reproduction(False, f'{name}: recorded file is missing', directory)
                divergence = _compare_json(name, recorded, rerun, float(data['stochastic'][name]))
                if divergence is not None:
                    return Reproduction(False, divergence, directory)
            elif sha256_of(rerun) != digest:
                recorded = recorded_dir / name
                if recorded.exists():
                    return Reproduction(False, _compare_lines(name, recorded, rerun), directory)
                return Reproduction(False, f'{name}: sha256 differs', directory)
    logger.info('reproduced %d outputs of %s', len(data['outputs']), manifest_path)
    return Reproduction(ok=True, directory=directory)
