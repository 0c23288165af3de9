"""Hypocoercive norms built on the evolution of the truncated operator `B1`.

    |||f|||^2 = eta2 ||f||_X^2 + int_0^inf ||S_B1(tau) f||_X^2 dtau
    N(f)^2   = eta1 ||mu^(1/2) f||_L2^2 + |||f|||^2

`||.||_X` is the sum of the weighted `L1` and `L2` norms. The time integral is a
trapezoid sum up to `T_max` plus the tail bound `X(T_max)^2 / (2 |a*|)`, with
`a* = chi + gamma V0 - 1` the decay exponent of the damped transport. The horizon
defaults to `20 / |a*|`.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from runtumble.errors import ConfigError, ConvergenceError, DomainError
from runtumble.model import (
    DistributionField,
    Exponential,
    Mu,
    TildeExp,
    WeightSpec,
    decay_exponent,
    weight_on_grid,
)
from runtumble.semigroup import DtPolicy, GeneratorMatrix, evolve

from .fitting import fit_decay
from .norms import NormReport, weighted_norm

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.01

# Default horizon in units of 1 / |a*|.
HORIZON_DECAY_TIMES = 20.0


@dataclass(frozen=True)
class HypoNorms:
    """The three equivalent norms of a field.

    Attributes
    ----------
    X
        `||f||_X`.
    triple_bar
        `|||f|||`.
    N
        `N(f)`.
    tail
        Contribution of the tail bound to `|||f|||^2`.
    decay_rate
        Fitted decay rate of `||S_B1(t) f||_X`, for comparison with `a_star`.
    T_max
        Horizon of the time integral.
    X_final
        `||S_B1(T_max) f||_X`.
    a_star
        Exponent of the tail bound.
    """

    X: float
    triple_bar: float
    N: float
    tail: float
    decay_rate: float
    T_max: float
    X_final: float
    a_star: float

    def reports(self) -> list[NormReport]:
        return [
            NormReport(kind='X', value=self.X),
            NormReport(kind='TripleBar', value=self.triple_bar, parameters={'tail': self.tail}),
            NormReport(kind='N', value=self.N),
        ]


def tail_exponent(gen_b1: GeneratorMatrix, weight: WeightSpec) -> float:
    """`a*` for the bias of `gen_b1`, its speed bound and the rate of `weight`.

    Weights without an exponential rate count as `gamma = 0`.
    """
    match weight:
        case Exponential(gamma=gamma) | TildeExp(gamma=gamma):
            rate = gamma
        case _:
            rate = 0.0
    return decay_exponent(gen_b1.kernel.chi, rate, gen_b1.grid.v0)


def hypo_norms(
    f: DistributionField,
    gen_b1: GeneratorMatrix,
    weight: WeightSpec,
    T_max: float | None = None,
    *,
    eta1: float = DEFAULT_ETA,
    eta2: float = DEFAULT_ETA,
    dt_policy: DtPolicy | None = None,
) -> HypoNorms:
    """`||f||_X`, `|||f|||` and `N(f)`.

    Parameters
    ----------
    f
        The field.
    gen_b1
        Generator with tag `B1`.
    weight
        The weight `m` of the `X` norm.
    T_max
        Horizon of the time integral; `20 / |a*|` if `None`.
    eta1, eta2
        Coefficients of the norms.
    dt_policy
        Time stepping of the `B1` evolution.

    Raises
    ------
    DomainError
        If `a* >= 0`, so that no tail bound exists.
    ConvergenceError
        If `||S_B1(t) f||_X` does not decay.
    """
    if gen_b1.tag != 'B1':
        raise ConfigError(f'the hypocoercive norms need B1, got {gen_b1.tag}', field='tag')
    a_star = tail_exponent(gen_b1, weight)
    if not a_star < 0:
        raise DomainError(f'the tail bound needs a* < 0, got {a_star:g}')
    horizon = T_max if T_max is not None else HORIZON_DECAY_TIMES / abs(a_star)
    if not horizon > 0:
        raise DomainError(f'T_max must be positive, got {horizon!r}')
    X0 = weighted_norm(f, 'X', weight).value
    if X0 == 0:
        return HypoNorms(
            X=0.0,
            triple_bar=0.0,
            N=0.0,
            tail=0.0,
            decay_rate=0.0,
            T_max=horizon,
            X_final=0.0,
            a_star=a_star,
        )

    def x_norm(g: DistributionField) -> float:
        return weighted_norm(g, 'X', weight).value

    trace = evolve(gen_b1, f, horizon, dt_policy, functionals={'X': x_norm})
    X_t = trace.series['X']
    fit = fit_decay(trace.times, X_t)
    if not fit.slope < 0:
        raise ConvergenceError(
            f'||S_B1(t) f||_X does not decay (fitted rate {fit.slope:g})', history=list(X_t)
        )
    integral = float(integrate.trapezoid(X_t**2, trace.times))
    X_final = float(X_t[-1])
    tail = X_final**2 / (2.0 * abs(a_star))
    triple_bar = float(np.sqrt(eta2 * X0**2 + integral + tail))
    mu_half = np.sqrt(weight_on_grid(Mu(), f.grid))
    l2_mu = f.with_values((mu_half * f.values) ** 2).integrate()
    N = float(np.sqrt(eta1 * l2_mu + triple_bar**2))
    logger.debug(
        'hypo norms: X=%g |||f|||=%g N=%g (tail %g, fitted rate %g, a*=%g)',
        X0,
        triple_bar,
        N,
        tail,
        fit.slope,
        a_star,
    )
    return HypoNorms(
        X=X0,
        triple_bar=triple_bar,
        N=N,
        tail=tail,
        decay_rate=fit.slope,
        T_max=horizon,
        X_final=X_final,
        a_star=a_star,
    )


@dataclass(frozen=True)
class NormEquivalence:
    """Empirical constants of `c ||f||_X <= N(f) <= C ||f||_X`.

    Attributes
    ----------
    c, C
        Smallest and largest ratio `N(f) / ||f||_X` over the fields.
    ratios
        All ratios.
    """

    c: float
    C: float
    ratios: list[float]

    def to_dict(self) -> dict[str, object]:
        return {'c': self.c, 'C': self.C, 'ratios': list(self.ratios)}


def norm_equivalence(
    fields: Sequence[DistributionField],
    gen_b1: GeneratorMatrix,
    weight: WeightSpec,
    T_max: float | None = None,
    *,
    eta1: float = DEFAULT_ETA,
    eta2: float = DEFAULT_ETA,
    dt_policy: DtPolicy | None = None,
) -> NormEquivalence:
    """Ratios `N(f) / ||f||_X` over nonzero fields."""
    ratios = []
    for f in fields:
        norms = hypo_norms(
            f, gen_b1, weight, T_max, eta1=eta1, eta2=eta2, dt_policy=dt_policy
        )
        if norms.X > 0:
            ratios.append(norms.N / norms.X)
    if not ratios:
        raise ConfigError('norm equivalence needs at least one nonzero field')
    logger.info('norm equivalence: c=%g C=%g over %d fields', min(ratios), max(ratios), len(ratios))
    return NormEquivalence(c=min(ratios), C=max(ratios), ratios=ratios)
