import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as st_np

from runtumble.analysis import (
    ProbeReport,
    read_series_csv,
    to_jsonable,
    verdict_of,
    write_series_csv,
)
from runtumble.errors import ConfigError


def test_to_jsonable() -> None:
    value = {
        'int': np.int64(3),
        'bool': np.bool_(True),
        'nan': np.float64('nan'),
        'inf': float('inf'),
        'minus_inf': -math.inf,
        'complex': np.complex128(1 - 2j),
        'matrix': np.eye(2),
        'tuple': (1, 2.5),
        7: None,
    }
    assert to_jsonable(value) == {
        'int': 3,
        'bool': True,
        'nan': 'nan',
        'inf': 'inf',
        'minus_inf': '-inf',
        'complex': [1.0, -2.0],
        'matrix': [[1.0, 0.0], [0.0, 1.0]],
        'tuple': [1, 2.5],
        '7': None,
    }
    with pytest.raises(TypeError, match='cannot serialize'):
        to_jsonable(object())


def test_probe_report() -> None:
    report = ProbeReport(
        'steady', {'method': 'direct'}, {'residual': np.float64(1e-12)}, 'PASS', 'abc'
    )
    assert report.passed
    assert json.loads(report.to_json()) == {
        'probe': 'steady',
        'parameters': {'method': 'direct'},
        'values': {'residual': 1e-12},
        'verdict': 'PASS',
        'scenario_hash': 'abc',
    }
    assert ProbeReport('hypo-norms').passed
    assert not ProbeReport('steady', verdict='FAIL').passed
    with pytest.raises(ConfigError, match='unknown verdict'):
        ProbeReport('steady', verdict='OK')  # type: ignore[arg-type]


def test_write_json(tmp_path: Path) -> None:
    report = ProbeReport('drift-check', {'chi': 0.5}, {'alpha': 4e-4}, verdict_of(True))
    path = report.write_json(tmp_path)
    assert path == tmp_path / 'drift-check.json'
    text = path.read_text(encoding='utf-8')
    assert text.endswith('}\n')
    assert json.loads(text)['verdict'] == 'PASS'
    assert verdict_of(False) == 'FAIL'


@given(
    values=st_np.arrays(
        dtype=np.float64,
        shape=st.integers(min_value=1, max_value=20),
        elements=st.floats(allow_nan=False, allow_infinity=False),
    )
)
def test_series_csv_is_exact(values: np.ndarray) -> None:
    t = np.arange(values.size) / 3.0
    with tempfile.TemporaryDirectory() as tmp:
        path = write_series_csv(Path(tmp) / 'series.csv', t, values, 'cafe')
        t_read, v_read, scenario_hash = read_series_csv(path)
    assert np.array_equal(t_read, t)
    assert np.array_equal(v_read, values)
    assert scenario_hash == 'cafe'


def test_series_csv_layout(tmp_path: Path) -> None:
    path = write_series_csv(tmp_path / 'l1.csv', [0.0, 0.5], [1.0, 0.1], 'beef')
    assert path.read_bytes() == b'# scenario_hash=beef\nt,value\n0,1\n0.5,0.10000000000000001\n'


def test_series_csv_without_hash(tmp_path: Path) -> None:
    path = tmp_path / 'plain.csv'
    path.write_text('t,value\n0,2\n1,1\n', encoding='utf-8')
    t, v, scenario_hash = read_series_csv(path)
    assert t.tolist() == [0.0, 1.0]
    assert v.tolist() == [2.0, 1.0]
    assert scenario_hash is None


def test_invalid_series(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match='equal length'):
        write_series_csv(tmp_path / 'bad.csv', [0.0, 1.0], [1.0], 'x')
    path = tmp_path / 'three.csv'
    path.write_text('t,value,extra\n0,1,2\n', encoding='utf-8')
    with pytest.raises(ConfigError, match='two columns'):
        read_series_csv(path)
