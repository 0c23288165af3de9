from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from runtumble.errors import DomainError

from .constants import ball_radius, check_chi


@dataclass(frozen=True)
class Sharp:
    """`K = 1 + chi sign(x.v)`, with `sign(0) = 0`."""


@dataclass(frozen=True)
class Regularized:
    """`K = 1 + chi zeta_delta3(x.v)` with the regularized sign `zeta`."""

    delta3: float

    def __post_init__(self) -> None:
        if not 0.0 < self.delta3 < 1.0:
            raise DomainError(f'delta3 must lie in (0, 1), got {self.delta3!r}')


@dataclass(frozen=True)
class Surgical:
    """Compactly supported kernel used for the regularizing part of the splitting.

    `K = phi_annulus(delta2, R, x) psi_velocity(delta1, v) (1 + chi zeta_delta3(x.v))`
    """

    R: float
    delta1: float
    delta2: float
    delta3: float

    def __post_init__(self) -> None:
        for name in ('delta1', 'delta2', 'delta3'):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f'{name} must lie in (0, 1), got {value!r}')
        if not self.R > 1.0:
            raise DomainError(f'R must exceed 1, got {self.R!r}')
        if not self.delta2 < 0.25:
            raise DomainError(f'delta2 must be below 1/4, got {self.delta2!r}')
        if not self.delta3 < 0.5:
            raise DomainError(f'delta3 must be below 1/2, got {self.delta3!r}')


@dataclass(frozen=True)
class TruncatedGainComplement:
    """`K = (1 - phi_R(x)) (1 + chi sign(x.v))`, the kernel outside radius `R`."""

    R: float

    def __post_init__(self) -> None:
        if not self.R > 0.0:
            raise DomainError(f'R must be positive, got {self.R!r}')


KernelVariant = Sharp | Regularized | Surgical | TruncatedGainComplement


@dataclass(frozen=True)
class KernelSpec:
    """A turning kernel: the bias `chi` and the variant.

    Examples
    --------
    >>> KernelSpec(0.5)
    KernelSpec(chi=0.5, variant=Sharp())
    >>> KernelSpec(1.5)
    Traceback (most recent call last):
    ...
    runtumble.errors.DomainError: chi must lie in (0, 1), got 1.5
    """

    chi: float
    variant: KernelVariant = field(default_factory=Sharp)

    def __post_init__(self) -> None:
        check_chi(self.chi)

    @property
    def truncation_radius(self) -> float | None:
        """The radius `R` of the variant, if it has one."""
        match self.variant:
            case Surgical(R=R) | TruncatedGainComplement(R=R):
                return R
            case _:
                return None

    def to_dict(self) -> dict[str, object]:
        d: dict[str, object] = {'chi': self.chi, 'variant': type(self.variant).__name__}
        d.update(vars(self.variant))
        return d


def _as_points(a: ArrayLike) -> np.ndarray:
    """Promote a scalar to a one-component vector; the last axis holds components."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    return arr


def _norm(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.square(a), axis=-1))


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1)


def zeta_reg(delta: float, s: ArrayLike) -> np.ndarray:
    """Regularized sign: odd, increasing, C1, and `sign(s)` for `|s| >= delta`.

    Examples
    --------
    >>> zeta_reg(0.5, [-1.0, -0.25, 0.0, 0.25, 1.0])
    array([-1.    , -0.6875,  0.    ,  0.6875,  1.    ])
    """
    if not delta > 0:
        raise DomainError(f'delta must be positive, got {delta!r}')
    u = np.clip(np.asarray(s, dtype=float) / delta, -1.0, 1.0)
    return u * (3.0 - u * u) / 2.0


def _cutoff_radial(lam: float, r: ArrayLike) -> np.ndarray:
    if not lam > 0:
        raise DomainError(f'lambda must be positive, got {lam!r}')
    s = np.abs(np.asarray(r, dtype=float)) / lam
    transition = np.cos(np.pi * (np.clip(s, 1.0, 2.0) - 1.0) / 2.0) ** 2
    return np.where(s <= 1.0, 1.0, np.where(s >= 2.0, 0.0, transition))


def cutoff_phi(lam: float, z: ArrayLike) -> np.ndarray:
    """Smooth radial cutoff: 1 on `|z| <= lam`, 0 on `|z| >= 2 lam`.

    The last axis of `z` holds the vector components; a scalar is a 1-vector.

    Examples
    --------
    >>> float(cutoff_phi(1.0, 0.5)), float(cutoff_phi(1.0, 3.0))
    (1.0, 0.0)
    >>> round(float(cutoff_phi(1.0, [0.0, 1.5])), 12)
    0.5
    """
    return _cutoff_radial(lam, _norm(_as_points(z)))


def phi_annulus(delta: float, R: float, x: ArrayLike) -> np.ndarray:
    """`phi_R(x) - phi_delta(x)`: vanishes near the origin and beyond `2R`."""
    r = _norm(_as_points(x))
    return _cutoff_radial(R, r) - _cutoff_radial(delta, r)


def psi_velocity(delta: float, v: ArrayLike, v0: float) -> np.ndarray:
    """`1 - phi_delta(V0 - |v|) - phi_delta(v)`, clipped to `[0, 1]`.

    Vanishes for `|v|` near 0 and near the speed bound `v0`.
    """
    speed = _norm(_as_points(v))
    psi = 1.0 - _cutoff_radial(delta, v0 - speed) - _cutoff_radial(delta, speed)
    return np.clip(psi, 0.0, 1.0)


def kernel_eval(
    spec: KernelSpec,
    x: ArrayLike,
    v: ArrayLike,
    *,
    v_max: float | None = None,
) -> np.ndarray:
    """Evaluate the turning kernel at positions `x` and velocities `v`.

    The last axis of `x` and `v` holds the vector components and the remaining axes
    broadcast. Scalars are one-dimensional vectors.

    Parameters
    ----------
    spec
        The kernel.
    x
        Positions.
    v
        Velocities, with `|v| <= v_max`.
    v_max
        Speed bound. Defaults to the radius of the unit-volume ball in the
        dimension of `x`.

    Returns
    -------
    numpy.ndarray
        Kernel values in `[0, 1 + chi]`.

    Raises
    ------
    DomainError
        If some `|v|` exceeds `v_max`.

    Examples
    --------
    >>> spec = KernelSpec(0.5)
    >>> [float(kernel_eval(spec, 1.0, v)) for v in (0.3, 0.0, -0.3)]
    [1.5, 1.0, 0.5]
    >>> kernel_eval(spec, 1.0, 0.7)
    Traceback (most recent call last):
    ...
    runtumble.errors.DomainError: |v| = 0.7 exceeds the speed bound 0.5
    """
    x_ = _as_points(x)
    v_ = _as_points(v)
    if v_max is None:
        v_max = ball_radius(x_.shape[-1])
    speed = _norm(v_)
    if np.any(speed > v_max * (1.0 + 1e-12)):
        raise DomainError(
            f'|v| = {float(np.max(speed)):g} exceeds the speed bound {v_max:g}'
        )
    chi = spec.chi
    s = _dot(x_, v_)
    match spec.variant:
        case Sharp():
            return 1.0 + chi * np.sign(s)
        case Regularized(delta3=d3):
            return 1.0 + chi * zeta_reg(d3, s)
        case Surgical(R=R, delta1=d1, delta2=d2, delta3=d3):
            return (
                phi_annulus(d2, R, x_)
                * psi_velocity(d1, v_, v_max)
                * (1.0 + chi * zeta_reg(d3, s))
            )
        case TruncatedGainComplement(R=R):
            return (1.0 - cutoff_phi(R, x_)) * (1.0 + chi * np.sign(s))
        case _:  # pragma: no cover
            assert False
