"""JSON probe reports and CSV time series."""

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from runtumble.errors import ConfigError

Verdict = Literal['PASS', 'FAIL']


def to_jsonable(obj: object) -> object:
    """Convert numpy scalars and arrays, complex numbers and tuples for `json`.

    Non-finite floats become the strings `'nan'`, `'inf'` and `'-inf'`.

    Examples
    --------
    >>> to_jsonable({'a': np.float64(0.5), 'b': np.arange(2), 'c': 1 + 2j})
    {'a': 0.5, 'b': [0, 1], 'c': [1.0, 2.0]}
    >>> to_jsonable(float('nan'))
    'nan'
    """
    match obj:
        case None | bool() | str():
            return obj
        case np.bool_():
            return bool(obj)
        case int() | np.integer():
            return int(obj)
        case float() | np.floating():
            value = float(obj)
            return value if math.isfinite(value) else str(value)
        case complex() | np.complexfloating():
            return [to_jsonable(obj.real), to_jsonable(obj.imag)]
        case np.ndarray():
            return [to_jsonable(x) for x in obj.tolist()]
        case Mapping():
            return {str(k): to_jsonable(v) for k, v in obj.items()}
        case list() | tuple():
            return [to_jsonable(x) for x in obj]
        case _:
            raise TypeError(f'cannot serialize {type(obj).__name__}')


@dataclass(frozen=True)
class ProbeReport:
    """The record of one probe.

    Attributes
    ----------
    probe
        Probe name, also the stem of its JSON file.
    parameters
        Resolved parameters.
    values
        Measured values.
    verdict
        `'PASS'`, `'FAIL'`, or `None` for probes that only report.
    scenario_hash
        Hash of the scenario that produced it.

    Examples
    --------
    >>> report = ProbeReport('drift-check', {'chi': 0.5}, {'alpha': 4e-4}, 'PASS')
    >>> list(json.loads(report.to_json()))
    ['parameters', 'probe', 'scenario_hash', 'values', 'verdict']
    """

    probe: str
    parameters: Mapping[str, object] = field(default_factory=dict)
    values: Mapping[str, object] = field(default_factory=dict)
    verdict: Verdict | None = None
    scenario_hash: str | None = None

    def __post_init__(self) -> None:
        if self.verdict not in ('PASS', 'FAIL', None):
            raise ConfigError(f'unknown verdict {self.verdict!r}', field='verdict')

    @property
    def passed(self) -> bool:
        return self.verdict != 'FAIL'

    def to_dict(self) -> dict[str, object]:
        return {
            'probe': self.probe,
            'parameters': to_jsonable(self.parameters),
            'values': to_jsonable(self.values),
            'verdict': self.verdict,
            'scenario_hash': self.scenario_hash,
        }

    def to_json(self, indent: int | None = 2) -> str:
        """JSON with sorted keys."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    def write_json(self, directory: Path | str) -> Path:
        path = Path(directory) / f'{self.probe}.json'
        path.write_text(self.to_json() + '\n', encoding='utf-8')
        return path


def verdict_of(passed: bool) -> Verdict:
    return 'PASS' if passed else 'FAIL'


def write_series_csv(
    path: Path | str,
    t: ArrayLike,
    values: ArrayLike,
    scenario_hash: str,
) -> Path:
    """Write a `t,value` CSV preceded by a `# scenario_hash=` line.

    Floats use `%.17g`; lines end with LF.
    """
    t_ = np.asarray(t, dtype=float)
    v_ = np.asarray(values, dtype=float)
    if t_.shape != v_.shape or t_.ndim != 1:
        raise ConfigError('t and values must be one-dimensional and of equal length')
    path = Path(path)
    with path.open('w', encoding='utf-8', newline='\n') as f:
        f.write(f'# scenario_hash={scenario_hash}\n')
        np.savetxt(
            f,
            np.column_stack([t_, v_]),
            fmt='%.17g',
            delimiter=',',
            header='t,value',
            comments='',
        )
    return path


def read_series_csv(path: Path | str) -> tuple[np.ndarray, np.ndarray, str | None]:
    """Read a file written by `write_series_csv()`; the hash line is optional."""
    path = Path(path)
    scenario_hash = None
    with path.open(encoding='utf-8') as f:
        first = f.readline()
    if first.startswith('# scenario_hash='):
        scenario_hash = first.strip().split('=', 1)[1]
    skip = 1 if scenario_hash is None else 2
    data = np.loadtxt(path, delimiter=',', comments='#', skiprows=skip, ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(f'{path}: expected two columns t,value', field='input')
    return data[:, 0], data[:, 1], scenario_hash
