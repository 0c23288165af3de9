from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from runtumble.errors import ConfigError, DomainError
from runtumble.model import (
    DistributionField,
    Polynomial,
    TildePoly,
    WeightSpec,
    weight_on_grid,
    weight_to_dict,
)

NormKind = Literal['L1', 'L2', 'Linf', 'X', 'L1_k', 'TripleBar', 'N', 'HhalfSeminorm']


@dataclass(frozen=True)
class NormReport:
    """A norm value with the parameters it was computed with.

    Attributes
    ----------
    kind
        Which norm.
    value
        The value, nonnegative.
    parameters
        Weight and other settings.
    """

    kind: NormKind
    value: float
    parameters: dict[str, object] = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value


def mass(f: DistributionField) -> float:
    """The double bracket `sum_ij f_ij w_j dx^d`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=3.0, n_x=12, n_v=4)
    >>> mass(DistributionField.constant(grid, 1.0))
    6.0
    """
    return f.integrate()


def _weight_values(f: DistributionField, w: WeightSpec | None) -> np.ndarray | float:
    return 1.0 if w is None else weight_on_grid(w, f.grid)


def weighted_norm(
    f: DistributionField, kind: NormKind, w: WeightSpec | None = None
) -> NormReport:
    """`||m f||` in `L1`, `L2`, `Linf`, `X = L1 + L2` or `L1_k`.

    Parameters
    ----------
    f
        The field.
    kind
        `'L1'`, `'L2'`, `'Linf'`, `'X'` (the sum of the `L1` and `L2` norms) or
        `'L1_k'` (the `L1` norm with a polynomial weight `<x>^k`).
    w
        The weight `m`; unweighted if `None`. Required and polynomial for `L1_k`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=1.0, n_x=4, n_v=2)
    >>> f = DistributionField.constant(grid, -3.0)
    >>> weighted_norm(f, 'L1').value, weighted_norm(f, 'Linf').value
    (6.0, 3.0)
    >>> round(weighted_norm(f, 'L2').value ** 2, 12)
    18.0
    """
    m = _weight_values(f, w)
    params: dict[str, object] = {'weight': None if w is None else weight_to_dict(w)}
    weighted = np.abs(f.values * m)
    match kind:
        case 'L1':
            value = f.with_values(weighted).integrate()
        case 'L2':
            value = float(np.sqrt(f.with_values(weighted**2).integrate()))
        case 'Linf':
            value = float(weighted.max())
        case 'X':
            value = f.with_values(weighted).integrate() + float(
                np.sqrt(f.with_values(weighted**2).integrate())
            )
        case 'L1_k':
            if not isinstance(w, Polynomial | TildePoly):
                raise DomainError('the L1_k norm needs a polynomial weight')
            value = f.with_values(weighted).integrate()
        case 'TripleBar' | 'N' | 'HhalfSeminorm':
            raise ConfigError(
                f'{kind} is not a weighted norm; see hypo_norms() and hhalf_seminorm()',
                field='kind',
            )
        case _:
            raise ConfigError(f'unknown norm kind {kind!r}', field='kind')
    return NormReport(kind=kind, value=value, parameters=params)


def l1_distance(f: DistributionField, g: DistributionField) -> float:
    """`||f - g||_L1`."""
    return abs(f - g).integrate()


def projection_perp(f: DistributionField, G: DistributionField) -> DistributionField:
    """`f - <<f>> G` for a steady state `G` of mass 1.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> grid = make_grid(1, L=1.0, n_x=4, n_v=2)
    >>> G = DistributionField.constant(grid, 0.5)
    >>> abs(mass(projection_perp(DistributionField.constant(grid, 3.0), G))) < 1e-13
    True
    """
    g_mass = mass(G)
    if not abs(g_mass - 1.0) < 1e-8:
        raise DomainError(f'the steady state must have mass 1, got {g_mass:g}')
    return f - mass(f) * G


@dataclass(frozen=True)
class Moments:
    """Polynomial moments of a field.

    Attributes
    ----------
    q
        Order.
    M
        `<<f <x>^q>>`.
    W
        `<<f m~_q>>` with the drift-corrected weight, if requested.
    """

    q: float
    M: float
    W: float | None = None


def moments(
    f: DistributionField,
    q: float,
    *,
    gamma: float | None = None,
    beta: float = 0.0,
) -> Moments:
    """`M_q` and, when `gamma` is given, the corrected moment `W~_q`.

    Examples
    --------
    >>> from runtumble.model import make_grid
    >>> f = DistributionField.constant(make_grid(1, L=2.0, n_x=8, n_v=2), 1.0)
    >>> moments(f, 0.0).M
    4.0
    """
    if q < 0:
        raise DomainError(f'q must be nonnegative, got {q!r}')
    M = f.with_values(f.values * weight_on_grid(Polynomial(q), f.grid)).integrate()
    W = None
    if gamma is not None:
        tilde = weight_on_grid(TildePoly(q=q, gamma=gamma, beta=beta), f.grid)
        W = f.with_values(f.values * tilde).integrate()
    return Moments(q=q, M=M, W=W)
