import numpy as np
from hypothesis import find, given
from hypothesis import strategies as st

from runtumble import strategies as st_rt
from runtumble.model import (
    DistributionField,
    Exponential,
    KernelSpec,
    Mu,
    PhaseGrid,
    Regularized,
    Sharp,
    Surgical,
    TruncatedGainComplement,
    weight_on_grid,
)
from tests.find_settings import FIND


@given(data=st.data())
def test_none_or(data: st.DataObject) -> None:
    value = data.draw(st_rt.none_or(st.integers(min_value=3, max_value=5)))
    assert value is None or 3 <= value <= 5


def test_none_or_reaches_both() -> None:
    find(st_rt.none_or(st.integers()), lambda v: v is None, settings=FIND)
    find(st_rt.none_or(st.integers()), lambda v: v is not None, settings=FIND)


@given(chi=st_rt.chis())
def test_chis(chi: float) -> None:
    assert 0 < chi < 1


@given(data=st.data())
def test_phase_grids(data: st.DataObject) -> None:
    dim = data.draw(st_rt.none_or(st.sampled_from((1, 2))), label='dim')
    max_n_x = data.draw(st.integers(min_value=2, max_value=16), label='max_n_x')

    # Call the test subject
    grid = data.draw(st_rt.phase_grids(dim=dim, max_n_x=max_n_x), label='grid')

    assert isinstance(grid, PhaseGrid)
    if dim is not None:
        assert grid.dim == dim
    assert 0.5 <= grid.L <= 8.0
    assert 2 <= grid.n_x <= (max_n_x if grid.dim == 1 else min(max_n_x, 8))
    if grid.dim == 2:
        assert grid.velocity_set == 'ball'
    assert abs(grid.v_weights.sum() - 1.0) < 1e-12


@given(grid=st_rt.phase_grids(velocity_set='two_velocity'))
def test_two_velocity_grids(grid: PhaseGrid) -> None:
    assert grid.dim == 1
    assert grid.n_velocities == 2


def test_phase_grids_reach_both_dimensions() -> None:
    find(st_rt.phase_grids(), lambda g: g.dim == 2, settings=FIND)
    find(st_rt.phase_grids(dim=1), lambda g: g.velocity_set == 'ball', settings=FIND)


@given(variant=st_rt.kernel_variants())
def test_kernel_variants(variant: object) -> None:
    match variant:
        case Sharp():
            pass
        case Regularized(delta3=delta3):
            assert 0 < delta3 < 1
        case Surgical(R=R, delta2=delta2, delta3=delta3):
            assert R > 1
            assert delta2 < 0.25
            assert delta3 < 0.5
        case TruncatedGainComplement(R=R):
            assert R > 0
        case _:  # pragma: no cover
            assert False


def test_kernel_variants_reach_every_variant() -> None:
    for cls in (Sharp, Regularized, Surgical, TruncatedGainComplement):
        find(st_rt.kernel_variants(), lambda v: isinstance(v, cls), settings=FIND)


@given(spec=st_rt.kernel_specs(chi=0.3, variants=('sharp', 'regularized')))
def test_kernel_specs(spec: KernelSpec) -> None:
    assert spec.chi == 0.3
    assert isinstance(spec.variant, Sharp | Regularized)


@given(data=st.data())
def test_weight_specs(data: st.DataObject) -> None:
    grid = data.draw(st_rt.phase_grids(max_n_x=8), label='grid')

    # Call the test subject
    weight = data.draw(st_rt.weight_specs(), label='weight')

    values = weight_on_grid(weight, grid)
    assert values.shape == grid.shape
    assert np.all(np.isfinite(values))


def test_weight_specs_by_kind() -> None:
    find(st_rt.weight_specs(kinds=('mu',)), lambda w: isinstance(w, Mu), settings=FIND)
    find(
        st_rt.weight_specs(kinds=('exponential',), max_gamma=0.05),
        lambda w: isinstance(w, Exponential) and w.gamma <= 0.05,
        settings=FIND,
    )


@given(data=st.data())
def test_distribution_fields(data: st.DataObject) -> None:
    nonnegative = data.draw(st.booleans(), label='nonnegative')
    grid = data.draw(st_rt.phase_grids(max_n_x=6), label='grid')

    # Call the test subject
    f = data.draw(
        st_rt.distribution_fields(grid=grid, nonnegative=nonnegative, max_value=2.0),
        label='f',
    )

    assert isinstance(f, DistributionField)
    assert f.grid == grid
    assert f.values.shape == grid.shape
    assert np.all(np.abs(f.values) <= 2.0)
    if nonnegative:
        assert f.is_nonnegative()


def test_distribution_fields_reach_negative_values() -> None:
    find(
        st_rt.distribution_fields(nonnegative=False),
        lambda f: not f.is_nonnegative(),
        settings=FIND,
    )
