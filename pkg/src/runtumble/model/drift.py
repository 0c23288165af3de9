"""Lyapunov drift certificate for the tilde-corrected exponential weight.

The dual generator `L* phi = v.grad(phi) + K int (phi' - phi) dv'` applied to

    m~ = (1 + gamma (v.x)/<x> - beta |v.x|/<x>) exp(gamma <x>)

has a closed form (see `dual_generator_on_tilde()`). With `beta (1 + chi) = gamma
chi` it satisfies `L* m~ <= A - alpha m~` where

    2 alpha = beta (1 - chi) V1 - gamma^2 V0^2 - beta gamma V0^2

and `A` is the supremum of `L* m~ + alpha m~`, estimated on a probe grid.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from runtumble.errors import CertificateError, DomainError
from runtumble.util import japanese_bracket

from .constants import ball_radius, check_chi, first_abs_moment
from .kernel import _as_points, _dot, _norm
from .weight import TildeExp, weight_eval

logger = logging.getLogger(__name__)

PROBE_X_MIN = 1e-3
PROBE_X_MAX = 1e3


def dual_generator_on_tilde(
    chi: float,
    gamma: float,
    beta: float,
    x: ArrayLike,
    v: ArrayLike,
    *,
    dim: int | None = None,
) -> np.ndarray:
    """`(L* m~)(x, v)` in closed form, for the sharp kernel.

    Sum of the three dual computations for `exp(gamma <x>)`,
    `gamma (v.x)/<x> exp(gamma <x>)` and `-beta |v.x|/<x> exp(gamma <x>)`.

    Parameters
    ----------
    chi
        Tumbling bias.
    gamma, beta
        Weight parameters.
    x, v
        Positions and velocities; the last axis holds the components.
    dim
        Dimension used for `V1`. Defaults to the number of components of `x`.

    Examples
    --------
    At the origin only the transport of the first-order correction remains:
    `gamma |v|^2 exp(gamma)`.

    >>> val = dual_generator_on_tilde(0.5, 0.1, 1 / 30, 0.0, 0.4)
    >>> bool(np.isclose(val, 0.1 * 0.16 * np.exp(0.1)))
    True
    """
    x_ = _as_points(x)
    v_ = _as_points(v)
    if dim is None:
        dim = x_.shape[-1]
    v1 = first_abs_moment(dim)
    bx = japanese_bracket(x_)
    s = _dot(x_, v_)
    vv = np.sum(np.square(v_), axis=-1)
    zeta = np.sign(s)
    transport = vv / bx - s * s / bx**3 + gamma * s * s / bx**2
    first = gamma * (transport - chi * np.abs(s) / bx)
    second = -beta * zeta * transport
    third = -beta * (1.0 + chi * zeta) * (v1 * _norm(x_) - np.abs(s)) / bx
    with np.errstate(over='ignore', invalid='ignore'):
        return (first + second + third) * np.exp(gamma * bx)


def drift_alpha(chi: float, gamma: float, dim: int = 1) -> float:
    """`alpha` from `2 alpha = beta (1 - chi) V1 - gamma^2 V0^2 - beta gamma V0^2`.

    Examples
    --------
    >>> round(drift_alpha(0.5, 0.1), 12)
    0.000416666667
    """
    beta = gamma * chi / (1.0 + chi)
    v0 = ball_radius(dim)
    v1 = first_abs_moment(dim)
    return 0.5 * (beta * (1.0 - chi) * v1 - gamma**2 * v0**2 - beta * gamma * v0**2)


def max_confinement_gamma(chi: float, dim: int = 1) -> float:
    """Largest `gamma` for which `alpha > 0`, found by bisection.

    Examples
    --------
    >>> round(max_confinement_gamma(0.5, 1), 10)
    0.125
    """
    check_chi(chi)

    def two_alpha(gamma: float) -> float:
        return 2.0 * drift_alpha(chi, gamma, dim)

    hi = 1.0
    while two_alpha(hi) > 0:  # pragma: no cover
        hi *= 2.0
    lo = hi * 1e-9
    return float(brentq(two_alpha, lo, hi, xtol=1e-15, rtol=1e-14))


@dataclass(frozen=True)
class DriftCertificate:
    """Constants of the drift inequality `L* m~ <= A - alpha m~`.

    Attributes
    ----------
    chi, gamma, dim
        Model and weight parameters.
    beta
        `gamma chi / (1 + chi)`.
    alpha
        Drift rate, positive.
    A
        Supremum of `L* m~ + alpha m~` over the probe grid.
    n_probe
        Number of probe nodes.
    violations
        Probe nodes where `L* m~ > A - alpha m~`.
    argmax_x
        Distance from the origin where the supremum is attained.
    """

    chi: float
    gamma: float
    dim: int
    beta: float
    alpha: float
    A: float
    n_probe: int
    violations: int
    argmax_x: float

    @property
    def weight(self) -> TildeExp:
        return TildeExp(gamma=self.gamma, beta=self.beta)

    @property
    def bound_ratio(self) -> float:
        """`A / alpha`, the constant of the uniform moment bound."""
        return self.A / self.alpha

    def to_dict(self) -> dict[str, float | int]:
        return {
            'chi': self.chi,
            'gamma': self.gamma,
            'dim': self.dim,
            'beta': self.beta,
            'alpha': self.alpha,
            'A': self.A,
            'n_probe': self.n_probe,
            'violations': self.violations,
            'argmax_x': self.argmax_x,
        }


def drift_probe_points(
    dim: int, n_radii: int = 400, n_speeds: int = 201, n_angles: int = 72
) -> tuple[np.ndarray, np.ndarray]:
    """Probe positions and velocities, broadcastable against each other.

    Positions are log-spaced in `|x|` between `PROBE_X_MIN` and `PROBE_X_MAX`,
    plus the origin, on both sides of it in dimension 1 and along the first axis in
    dimension 2 (the expression depends on `x` only through `|x|` and `x.v`).
    Velocities cover the closed ball.
    """
    v0 = ball_radius(dim)
    r = np.concatenate([[0.0], np.geomspace(PROBE_X_MIN, PROBE_X_MAX, n_radii)])
    match dim:
        case 1:
            x = np.concatenate([-r[:0:-1], r])[:, None]
            v = np.linspace(-v0, v0, n_speeds)[:, None]
        case 2:
            x = np.stack([r, np.zeros_like(r)], axis=-1)
            speeds = np.linspace(0.0, v0, (n_speeds + 1) // 2)
            angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
            s, a = np.meshgrid(speeds, angles, indexing='ij')
            v = np.stack([(s * np.cos(a)).ravel(), (s * np.sin(a)).ravel()], axis=-1)
        case _:
            raise DomainError(f'dim must be 1 or 2, got {dim!r}')
    return x[:, None, :], v[None, :, :]


def drift_certificate(chi: float, gamma: float, dim: int = 1) -> DriftCertificate:
    """Compute `(beta, alpha, A)` of the drift inequality for `m~`.

    Parameters
    ----------
    chi
        Tumbling bias in `(0, 1)`.
    gamma
        Exponential rate of the weight.
    dim
        Spatial dimension, 1 or 2.

    Returns
    -------
    DriftCertificate
        With `alpha > 0` and the probe statistics.

    Raises
    ------
    CertificateError
        If `alpha <= 0`; carries the largest admissible `gamma`.

    Examples
    --------
    >>> cert = drift_certificate(0.5, 0.1)
    >>> round(cert.beta, 12), round(cert.alpha, 9), cert.violations
    (0.033333333333, 0.000416667, 0)
    >>> cert.A > 0
    True
    >>> drift_certificate(0.5, 0.9)
    Traceback (most recent call last):
    ...
    runtumble.errors.CertificateError: gamma = 0.9 too large for confinement certificate; largest admissible gamma is 0.125
    """
    check_chi(chi)
    if not gamma > 0:
        raise DomainError(f'gamma must be positive, got {gamma!r}')
    alpha = drift_alpha(chi, gamma, dim)
    if not alpha > 0:
        gamma_max = max_confinement_gamma(chi, dim)
        raise CertificateError(
            f'gamma = {gamma:g} too large for confinement certificate; '
            f'largest admissible gamma is {gamma_max:.6g}',
            gamma_max=gamma_max,
        )
    beta = gamma * chi / (1.0 + chi)
    x, v = drift_probe_points(dim)
    dual = dual_generator_on_tilde(chi, gamma, beta, x, v, dim=dim)
    m = weight_eval(TildeExp(gamma=gamma, beta=beta), x, v)
    excess = dual + alpha * m
    idx = np.unravel_index(int(np.argmax(excess)), excess.shape)
    A = float(excess[idx])
    slack = 1e-12 * (abs(A) + alpha * np.abs(m))
    violations = int(np.count_nonzero(dual - (A - alpha * m) > slack))
    argmax_x = float(np.linalg.norm(x[idx[0], 0]))
    logger.info(
        'drift certificate: chi=%g gamma=%g beta=%g alpha=%g A=%g (|x|=%g)',
        chi,
        gamma,
        beta,
        alpha,
        A,
        argmax_x,
    )
    return DriftCertificate(
        chi=chi,
        gamma=gamma,
        dim=dim,
        beta=beta,
        alpha=alpha,
        A=A,
        n_probe=int(excess.size),
        violations=violations,
        argmax_x=argmax_x,
    )
