import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.linalg import expm_multiply

from runtumble import strategies as st_rt
from runtumble.errors import ConfigError, DomainError, NumericalError, StabilityError
from runtumble.model import DistributionField, KernelSpec, make_grid
from runtumble.semigroup import (
    DtPolicy,
    assemble_generator,
    evolve,
    semigroup_of,
    step_size,
)
from tests.scaled_settings import scaled

GRID = make_grid(1, L=4.0, n_x=32, n_v=4)


def _gaussian(grid=GRID) -> DistributionField:  # type: ignore[no-untyped-def]
    return DistributionField.from_function(
        grid, lambda x, v: np.exp(-np.sum(x**2, axis=-1)) * (1.0 + v[..., 0])
    )


@pytest.mark.parametrize(
    ('kwargs', 'error'),
    [
        ({'cfl': 0.0}, StabilityError),
        ({'cfl': 0.6}, StabilityError),
        ({'dt': 0.0}, ConfigError),
        ({'record_every': 0}, ConfigError),
        ({'snapshot_every': 0}, ConfigError),
    ],
)
def test_invalid_policy(kwargs: dict, error: type[Exception]) -> None:  # type: ignore[type-arg]
    with pytest.raises(error):
        DtPolicy(**kwargs)


def test_step_size() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    assert step_size(gen, 2.0, DtPolicy(dt=0.1)) == (0.1, 20)
    dt, n = step_size(gen, 2.0, DtPolicy())
    assert n == 6
    assert dt <= gen.max_stable_dt()
    with pytest.raises(StabilityError):
        step_size(gen, 2.0, DtPolicy(dt=1.0))


@pytest.mark.parametrize('scheme', ['upwind', 'muscl'])
def test_mass_balance(scheme: str) -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5), scheme=scheme)  # type: ignore[arg-type]
    trace = evolve(gen, _gaussian(), 20.0)
    drift = trace.mass - trace.mass[0] + trace.leak
    assert np.max(np.abs(drift)) <= 1e-10
    assert trace.leak[-1] > 0
    assert math.isclose(trace.T, 20.0)


@scaled(0.3)
@given(
    f0=st_rt.distribution_fields(grid=st_rt.phase_grids(max_n_x=12)),
    chi=st_rt.chis(),
    T=st.floats(min_value=0.1, max_value=3.0),
)
def test_positivity_and_l1(f0: DistributionField, chi: float, T: float) -> None:
    gen = assemble_generator('L', f0.grid, KernelSpec(chi))
    trace = evolve(gen, f0, T)
    scale = max(1.0, float(f0.values.max()))
    assert trace.series['min'].min() >= -1e-12 * scale
    assert np.allclose(trace.series['l1'], trace.mass, rtol=1e-9, atol=1e-9 * scale)
    # Mass only leaves the box.
    assert np.all(np.diff(trace.mass) <= 1e-9 * scale)


def test_matches_matrix_exponential() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    f0 = _gaussian()
    trace = evolve(gen, f0, 2.0, DtPolicy(cfl=0.01))
    exact = expm_multiply(2.0 * gen.to_sparse(), f0.values.ravel())
    error = np.abs(trace.final.values.ravel() - exact).sum()
    assert error <= 1e-4 * np.abs(exact).sum()


def test_recording_and_snapshots() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    policy = DtPolicy(record_every=4, snapshot_every=2)
    trace = evolve(gen, _gaussian(), 2.0, policy, functionals={'second': lambda f: 2.0})
    assert trace.steps == 6
    assert np.allclose(trace.times, [0.0, 4 * trace.dt, 2.0])
    assert np.allclose(trace.snapshot_times, [0.0, 2 * trace.dt, 4 * trace.dt, 2.0])
    assert len(trace.snapshots) == 4
    assert np.array_equal(trace.snapshots[-1].values, trace.final.values)
    assert trace.functional('second').tolist() == [2.0, 2.0, 2.0]
    with pytest.raises(ConfigError):
        trace.functional('entropy')


def test_zero_time() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    f0 = _gaussian()
    trace = evolve(gen, f0, 0.0)
    assert trace.steps == 0
    assert trace.times.tolist() == [0.0]
    assert np.array_equal(trace.final.values, f0.values)


def test_semigroup_of() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    f0 = _gaussian()
    S = semigroup_of(gen)
    assert np.array_equal(S(f0, 1.5).values, evolve(gen, f0, 1.5).final.values)


def test_invalid_evolution() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    other = DistributionField.zeros(make_grid(1, L=2.0, n_x=32, n_v=4))
    with pytest.raises(ConfigError, match='different grids'):
        evolve(gen, other, 1.0)
    with pytest.raises(DomainError):
        evolve(gen, _gaussian(), -1.0)
    with pytest.raises(ConfigError, match='reserved'):
        evolve(gen, _gaussian(), 1.0, functionals={'mass': lambda f: 0.0})


def test_non_finite_values() -> None:
    gen = assemble_generator('L', GRID, KernelSpec(0.5))
    values = np.zeros(GRID.shape)
    values[3, 1] = np.inf
    with pytest.raises(NumericalError) as excinfo:
        evolve(gen, DistributionField(GRID, values), 1.0)
    assert excinfo.value.step == 1
    assert math.isclose(excinfo.value.time, 1.0 / 3.0)
