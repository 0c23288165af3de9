import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from runtumble import strategies as st_rt
from runtumble.analysis import (
    NormKind,
    l1_distance,
    mass,
    moments,
    projection_perp,
    weighted_norm,
)
from runtumble.errors import ConfigError, DomainError
from runtumble.model import (
    DistributionField,
    Exponential,
    Polynomial,
    TildePoly,
    WeightSpec,
    make_grid,
    weight_on_grid,
)


@given(f=st_rt.distribution_fields(nonnegative=False))
def test_unweighted_norms(f: DistributionField) -> None:
    l1 = weighted_norm(f, 'L1').value
    l2 = weighted_norm(f, 'L2').value
    linf = weighted_norm(f, 'Linf').value
    assert math.isclose(l1, abs(f).integrate(), rel_tol=1e-12, abs_tol=1e-300)
    assert linf == float(np.abs(f.values).max())
    assert math.isclose(weighted_norm(f, 'X').value, l1 + l2, rel_tol=1e-12, abs_tol=1e-300)
    assert abs(mass(f)) <= l1 * (1 + 1e-12) + 1e-300


@given(f=st_rt.distribution_fields(), w=st_rt.weight_specs(kinds=('exponential', 'polynomial')))
def test_weighted_l1_dominates_unweighted(f: DistributionField, w: WeightSpec) -> None:
    weighted = weighted_norm(f, 'L1', w)
    assert weighted.value >= weighted_norm(f, 'L1').value * (1 - 1e-12)
    assert weighted.parameters['weight'] is not None
    assert float(weighted) == weighted.value


def test_l1_k_norm() -> None:
    grid = make_grid(1, L=2.0, n_x=8, n_v=2)
    f = DistributionField.constant(grid, 1.0)
    m = weight_on_grid(Polynomial(2.0), grid)
    assert weighted_norm(f, 'L1_k', Polynomial(2.0)).value == f.integrate(m)
    assert weighted_norm(f, 'L1_k', TildePoly(q=1.0, gamma=0.5, beta=0.1)).value > 0
    with pytest.raises(DomainError, match='polynomial weight'):
        weighted_norm(f, 'L1_k', Exponential(0.5))
    with pytest.raises(DomainError, match='polynomial weight'):
        weighted_norm(f, 'L1_k')


@pytest.mark.parametrize('kind', ['TripleBar', 'N', 'HhalfSeminorm', 'L3'])
def test_kinds_not_computed_here(kind: NormKind) -> None:
    f = DistributionField.constant(make_grid(1, L=1.0, n_x=4, n_v=2), 1.0)
    with pytest.raises(ConfigError):
        weighted_norm(f, kind)


@given(f=st_rt.distribution_fields())
def test_l1_distance(f: DistributionField) -> None:
    assert l1_distance(f, f) == 0.0
    zero = DistributionField.zeros(f.grid)
    assert l1_distance(f, zero) == l1_distance(zero, f)
    assert math.isclose(l1_distance(f, zero), weighted_norm(f, 'L1').value, abs_tol=1e-300)


@given(data=st.data())
def test_projection_perp(data: st.DataObject) -> None:
    grid = data.draw(st_rt.phase_grids(), label='grid')
    f = data.draw(st_rt.distribution_fields(grid=grid), label='f')
    G = DistributionField.constant(grid, 1.0 / DistributionField.constant(grid, 1.0).integrate())

    # Call the test subject
    p = projection_perp(f, G)

    scale = max(abs(f).integrate(), 1.0)
    assert abs(mass(p)) <= 1e-9 * scale


def test_projection_perp_needs_unit_mass() -> None:
    grid = make_grid(1, L=1.0, n_x=4, n_v=2)
    with pytest.raises(DomainError, match='mass 1'):
        projection_perp(DistributionField.constant(grid, 1.0), DistributionField.constant(grid, 1.0))


def test_moments() -> None:
    grid = make_grid(1, L=3.0, n_x=12, n_v=4)
    f = DistributionField.constant(grid, 1.0)
    m0 = moments(f, 0.0)
    m2 = moments(f, 2.0, gamma=0.1, beta=0.05)
    assert m0.M == mass(f)
    assert m0.W is None
    assert m2.M > m0.M
    assert m2.W is not None and m2.W > 0
    assert moments(f, 1.0, gamma=0.1).W == moments(f, 1.0, gamma=0.1, beta=0.0).W
    with pytest.raises(DomainError, match='nonnegative'):
        moments(f, -1.0)
