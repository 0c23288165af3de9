from typing import Literal, Optional, TypeVar

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra import numpy as st_np

from runtumble.model import (
    DistributionField,
    Exponential,
    KernelSpec,
    KernelVariant,
    Mu,
    Nu,
    PhaseGrid,
    Polynomial,
    Regularized,
    Sharp,
    Surgical,
    TildeExp,
    TildePoly,
    TruncatedGainComplement,
    WeightSpec,
)

T = TypeVar('T')

VariantName = Literal['sharp', 'regularized', 'surgical', 'truncated']
WeightName = Literal['exponential', 'polynomial', 'tilde_exp', 'tilde_poly', 'mu', 'nu']


def none_or(st_: st.SearchStrategy[T]) -> st.SearchStrategy[Optional[T]]:
    """A strategy for `None` or values from another strategy.

    >>> v = none_or(st.integers()).example()
    >>> v is None or isinstance(v, int)
    True
    """
    return st.one_of(st.none(), st_)


def chis(*, min_value: float = 0.05, max_value: float = 0.95) -> st.SearchStrategy[float]:
    """Strategy for turning biases in the open interval `(0, 1)`.

    >>> 0 < chis().example() < 1
    True
    """
    return st.floats(min_value=min_value, max_value=max_value)


@st.composite
def phase_grids(
    draw: st.DrawFn,
    *,
    dim: int | None = None,
    velocity_set: Literal['ball', 'two_velocity'] | None = None,
    max_n_x: int = 24,
    max_n_v: int = 8,
    min_L: float = 0.5,
    max_L: float = 8.0,
) -> PhaseGrid:
    """Strategy for small phase grids.

    Parameters
    ----------
    dim
        Spatial dimension. If `None`, 1 or 2 is drawn.
    velocity_set
        The velocity set. If `None`, `'two_velocity'` may be drawn in dimension 1.
    max_n_x
        Maximum cells per axis. Grids in dimension 2 use at most 8.
    max_n_v
        Maximum velocity nodes in dimension 1.
    min_L, max_L
        Range of the box half width.

    Examples
    --------
    >>> grid = phase_grids(dim=1).example()
    >>> grid.dim
    1
    """
    if velocity_set == 'two_velocity':
        dim = 1
    if dim is None:
        dim = draw(st.sampled_from((1, 2)), label='dim')
    if velocity_set is None:
        choices = ('ball', 'two_velocity') if dim == 1 else ('ball',)
        velocity_set = draw(st.sampled_from(choices), label='velocity_set')
    L = draw(st.floats(min_value=min_L, max_value=max_L), label='L')
    n_x = draw(st.integers(min_value=2, max_value=max_n_x if dim == 1 else min(max_n_x, 8)))
    if dim == 1:
        n_v = draw(st.integers(min_value=2, max_value=max_n_v), label='n_v')
        return PhaseGrid(dim=1, L=L, n_x=n_x, n_v=n_v, velocity_set=velocity_set)
    n_r = draw(st.integers(min_value=1, max_value=3), label='n_r')
    n_theta = draw(st.sampled_from((4, 8)), label='n_theta')
    return PhaseGrid(dim=2, L=L, n_x=n_x, n_r=n_r, n_theta=n_theta)


def _unit_fractions(max_value: float) -> st.SearchStrategy[float]:
    return st.floats(min_value=0.01, max_value=max_value, exclude_max=True)


def kernel_variants(
    *, variants: tuple[VariantName, ...] | None = None
) -> st.SearchStrategy[KernelVariant]:
    """Strategy for kernel variants with valid parameters.

    >>> isinstance(kernel_variants(variants=('sharp',)).example(), Sharp)
    True
    """
    options: dict[VariantName, st.SearchStrategy[KernelVariant]] = {
        'sharp': st.just(Sharp()),
        'regularized': st.builds(Regularized, delta3=_unit_fractions(1.0)),
        'surgical': st.builds(
            Surgical,
            R=st.floats(min_value=1.5, max_value=6.0),
            delta1=_unit_fractions(1.0),
            delta2=_unit_fractions(0.25),
            delta3=_unit_fractions(0.5),
        ),
        'truncated': st.builds(
            TruncatedGainComplement, R=st.floats(min_value=0.5, max_value=6.0)
        ),
    }
    names = variants if variants is not None else tuple(options)
    return st.one_of([options[name] for name in names])


def kernel_specs(
    *,
    chi: float | st.SearchStrategy[float] | None = None,
    variants: tuple[VariantName, ...] | None = None,
) -> st.SearchStrategy[KernelSpec]:
    """Strategy for turning kernels.

    >>> spec = kernel_specs(chi=0.5).example()
    >>> spec.chi
    0.5
    """
    if chi is None:
        chi = chis()
    if not isinstance(chi, st.SearchStrategy):
        chi = st.just(chi)
    return st.builds(KernelSpec, chi, kernel_variants(variants=variants))


def weight_specs(
    *, kinds: tuple[WeightName, ...] | None = None, max_gamma: float = 0.3
) -> st.SearchStrategy[WeightSpec]:
    """Strategy for weight functions.

    >>> isinstance(weight_specs(kinds=('mu',)).example(), Mu)
    True
    """
    gammas = st.floats(min_value=0.01, max_value=max_gamma)
    options: dict[WeightName, st.SearchStrategy[WeightSpec]] = {
        'exponential': st.builds(Exponential, gamma=gammas),
        'polynomial': st.builds(Polynomial, k=st.floats(min_value=0.0, max_value=4.0)),
        'tilde_exp': st.builds(TildeExp.coupled, gamma=gammas, chi=chis()),
        'tilde_poly': st.builds(
            TildePoly,
            q=st.floats(min_value=0.0, max_value=4.0),
            gamma=gammas,
            beta=st.floats(min_value=0.0, max_value=max_gamma),
        ),
        'mu': st.just(Mu()),
        'nu': st.just(Nu()),
    }
    names = kinds if kinds is not None else tuple(options)
    return st.one_of([options[name] for name in names])


@st.composite
def distribution_fields(
    draw: st.DrawFn,
    *,
    grid: PhaseGrid | st.SearchStrategy[PhaseGrid] | None = None,
    nonnegative: bool = True,
    max_value: float = 10.0,
) -> DistributionField:
    """Strategy for fields on a phase grid.

    Parameters
    ----------
    grid
        A grid or a strategy for grids. If `None`, `phase_grids()` is used.
    nonnegative
        Draw only values in `[0, max_value]` if `True`, else in
        `[-max_value, max_value]`.
    max_value
        Bound on the absolute values.

    Examples
    --------
    >>> f = distribution_fields(nonnegative=True).example()
    >>> f.is_nonnegative()
    True
    """
    if grid is None:
        grid = phase_grids()
    if isinstance(grid, st.SearchStrategy):
        grid = draw(grid, label='grid')
    min_value = 0.0 if nonnegative else -max_value
    values = draw(
        st_np.arrays(
            dtype=np.float64,
            shape=grid.shape,
            elements=st.floats(min_value=min_value, max_value=max_value),
        ),
        label='values',
    )
    return DistributionField(grid, values)
