import numpy as np
import pytest

from runtumble.errors import ConfigError
from runtumble.model import DistributionField, KernelSpec, make_grid
from runtumble.semigroup import (
    DtPolicy,
    EvolutionTrace,
    assemble_generator,
    duhamel_convolve,
    evolve,
    semigroup_of,
)

GRID = make_grid(1, L=4.0, n_x=32, n_v=4)
KERNEL = KernelSpec(0.5)
R = 1.0


def _f0() -> DistributionField:
    return DistributionField.from_function(
        GRID, lambda x, v: np.exp(-((x[..., 0] - 0.5) ** 2)) * (1.0 + v[..., 0])
    )


def _discrepancy(h: float) -> float:
    """Distance between `S_B1(1)` and `S_B0(1) + (S_B0 * A0c S_B1)(1)`."""
    policy = DtPolicy(dt=h, snapshot_every=1)
    gen_b1 = assemble_generator('B1', GRID, KERNEL, R)
    trace = evolve(gen_b1, _f0(), 1.0, policy)
    outer = semigroup_of(assemble_generator('B0', GRID, KERNEL), DtPolicy(dt=h))
    inner = assemble_generator('A0c', GRID, KERNEL, R)
    rebuilt = duhamel_convolve(outer, inner, trace)
    assert np.allclose(rebuilt.snapshot_times, trace.snapshot_times)
    return abs(rebuilt.final - trace.final).integrate()


def test_duhamel_identity_converges() -> None:
    coarse = _discrepancy(0.25)
    fine = _discrepancy(0.125)
    assert fine < coarse / 2
    assert fine < 0.05 * _f0().integrate()


def test_free_term() -> None:
    h = 0.25
    trace = evolve(
        assemble_generator('B1', GRID, KERNEL, R), _f0(), 1.0, DtPolicy(dt=h, snapshot_every=1)
    )
    outer = semigroup_of(assemble_generator('B0', GRID, KERNEL), DtPolicy(dt=h))
    inner = assemble_generator('A0c', GRID, KERNEL, R)
    with_free = duhamel_convolve(outer, inner, trace)
    without = duhamel_convolve(outer, inner, trace, include_free=False)
    free = _f0()
    for _ in range(trace.steps):
        free = outer(free, h)
    assert np.allclose(with_free.final.values, (without.final + free).values, atol=1e-12)
    assert np.isnan(with_free.series['min']).all()
    assert np.isnan(with_free.leak).all()
    assert with_free.mass.shape == with_free.times.shape


def test_callable_inner_operator() -> None:
    h = 0.25
    trace = evolve(
        assemble_generator('L', GRID, KERNEL), _f0(), 0.5, DtPolicy(dt=h, snapshot_every=1)
    )
    outer = semigroup_of(assemble_generator('L', GRID, KERNEL), DtPolicy(dt=h))
    zero = duhamel_convolve(outer, lambda f: 0.0 * f, trace)
    assert np.allclose(zero.final.values, trace.final.values, atol=1e-12)


def _trace(times: list[float]) -> EvolutionTrace:
    f = _f0()
    return EvolutionTrace(
        times=np.asarray(times),
        series={},
        final=f,
        dt=0.1,
        steps=len(times) - 1,
        snapshot_times=np.asarray(times),
        snapshots=[f] * len(times),
    )


@pytest.mark.parametrize(
    ('times', 'match'),
    [
        ([], 'no snapshots'),
        ([0.5, 0.6], 'start at t = 0'),
        ([0.0, 0.1, 0.3], 'not uniformly spaced'),
    ],
)
def test_invalid_trace(times: list[float], match: str) -> None:
    outer = semigroup_of(assemble_generator('B0', GRID, KERNEL))
    inner = assemble_generator('A0c', GRID, KERNEL, R)
    with pytest.raises(ConfigError, match=match):
        duhamel_convolve(outer, inner, _trace(times))
