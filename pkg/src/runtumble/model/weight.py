from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from runtumble.errors import DomainError
from runtumble.util import japanese_bracket

from .grid import MAX_SPEED, PhaseGrid
from .kernel import _as_points, _dot, _norm, cutoff_phi


@dataclass(frozen=True)
class Exponential:
    """`m = exp(gamma <x>)`."""

    gamma: float

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise DomainError(f'gamma must be nonnegative, got {self.gamma!r}')


@dataclass(frozen=True)
class Polynomial:
    """`m = <x>^k`."""

    k: float

    def __post_init__(self) -> None:
        if self.k < 0:
            raise DomainError(f'k must be nonnegative, got {self.k!r}')


@dataclass(frozen=True)
class TildeExp:
    """Exponential weight corrected for the drift: `m~`.

    `m~ = (1 + gamma (v.x)/<x> - beta |v.x|/<x>) exp(gamma <x>)`. The confinement
    certificate couples `beta (1 + chi) = gamma chi`; build such a weight with
    `TildeExp.coupled()`.

    Construction requires `(gamma + beta) V0 < 1` for the largest speed bound of any
    velocity set, so that `m~` stays within a factor `1 +- delta` of `exp(gamma <x>)`.

    >>> TildeExp(0.1, 5.0)
    Traceback (most recent call last):
    ...
    runtumble.errors.DomainError: tilde weight is not comparable to its base weight: (gamma + beta) V0 = 5.1 must be below 1
    """

    gamma: float
    beta: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise DomainError(f'gamma must be positive, got {self.gamma!r}')
        if self.beta < 0:
            raise DomainError(f'beta must be nonnegative, got {self.beta!r}')
        delta = tilde_sandwich_delta(self, MAX_SPEED)
        if not delta < 1.0:
            raise DomainError(
                f'tilde weight is not comparable to its base weight: '
                f'(gamma + beta) V0 = {delta:g} must be below 1'
            )

    @classmethod
    def coupled(cls, gamma: float, chi: float) -> 'TildeExp':
        """The weight with `beta = gamma chi / (1 + chi)`.

        >>> TildeExp.coupled(0.1, 0.5).beta == 0.1 * 0.5 / 1.5
        True
        """
        return cls(gamma=gamma, beta=gamma * chi / (1.0 + chi))


@dataclass(frozen=True)
class TildePoly:
    """Polynomial moment weight with the drift correction.

    `m~_q = <gamma x>^q + q gamma (v.x) <gamma x>^(q-2) - q beta |v.x| <gamma x>^(q-2)`
    """

    q: float
    gamma: float
    beta: float

    def __post_init__(self) -> None:
        if self.q < 0:
            raise DomainError(f'q must be nonnegative, got {self.q!r}')
        if not self.gamma > 0:
            raise DomainError(f'gamma must be positive, got {self.gamma!r}')
        if self.beta < 0:
            raise DomainError(f'beta must be nonnegative, got {self.beta!r}')


@dataclass(frozen=True)
class Mu:
    """`mu = (1 - (x/|x|^(1/2)).(v/|v|)) phi_(1/2)(x)`."""


@dataclass(frozen=True)
class Nu:
    """`nu = |v|/|x|^(1/2) phi_(1/2)(x)`."""


WeightSpec = Exponential | Polynomial | TildeExp | TildePoly | Mu | Nu


def weight_to_dict(w: WeightSpec) -> dict[str, object]:
    return {'kind': type(w).__name__, **vars(w)}


def _safe_divide(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """`a / b` with `0/0 -> 0` (and anything over 0 -> 0)."""
    out = np.zeros(np.broadcast(a, b).shape)
    np.divide(a, b, out=out, where=np.broadcast_to(b != 0, out.shape))
    return out


def weight_eval(w: WeightSpec, x: ArrayLike, v: ArrayLike) -> np.ndarray:
    """Evaluate the weight `w` at positions `x` and velocities `v`.

    The last axis of `x` and `v` holds the vector components and the remaining axes
    broadcast. Scalars are one-dimensional vectors.

    Examples
    --------
    >>> float(weight_eval(Exponential(0.1), 0.0, 0.3)) == np.exp(0.1)
    True
    >>> float(weight_eval(TildeExp.coupled(0.1, 0.5), 0.0, -0.2)) == np.exp(0.1)
    True
    >>> round(float(weight_eval(Polynomial(2), 1.0, 0.0)), 12)
    2.0

    The hypocoercivity weights use the convention `0/0 = 0` at `x = 0` or `v = 0`.

    >>> float(weight_eval(Mu(), 0.0, 0.3)), float(weight_eval(Nu(), 0.0, 0.3))
    (1.0, 0.0)
    """
    x_ = _as_points(x)
    v_ = _as_points(v)
    match w:
        case Exponential(gamma=gamma):
            return np.exp(gamma * japanese_bracket(x_)) * np.ones(np.shape(_dot(x_, v_)))
        case Polynomial(k=k):
            return japanese_bracket(x_) ** k * np.ones(np.shape(_dot(x_, v_)))
        case TildeExp(gamma=gamma, beta=beta):
            bx = japanese_bracket(x_)
            s = _dot(x_, v_)
            return (1.0 + gamma * s / bx - beta * np.abs(s) / bx) * np.exp(gamma * bx)
        case TildePoly(q=q, gamma=gamma, beta=beta):
            bgx = japanese_bracket(gamma * x_)
            s = _dot(x_, v_)
            return bgx**q + q * (gamma * s - beta * np.abs(s)) * bgx ** (q - 2.0)
        case Mu():
            rx = _norm(x_)
            rv = _norm(v_)
            # (x/|x|^(1/2)).(v/|v|) = (x.v) / (|x|^(1/2) |v|)
            overlap = _safe_divide(_dot(x_, v_), np.sqrt(rx) * rv)
            return (1.0 - overlap) * cutoff_phi(0.5, x_)
        case Nu():
            rx = _norm(x_)
            rv = _norm(v_)
            return _safe_divide(rv, np.sqrt(rx)) * cutoff_phi(0.5, x_)
        case _:  # pragma: no cover
            assert False


def weight_on_grid(w: WeightSpec, grid: PhaseGrid) -> np.ndarray:
    """The weight at every phase-space node, shape `grid.shape`."""
    x, v = grid.phase_points()
    return np.broadcast_to(weight_eval(w, x, v), grid.shape)


def tilde_sandwich_delta(w: TildeExp | TildePoly, v0: float) -> float:
    """`delta` such that `(1 - delta) e^(gamma <x>) <= m~ <= (1 + delta) e^(gamma <x>)`.

    Uses `|v.x| / <x> <= V0`; for the polynomial weight the bound is relative to
    `<gamma x>^q` and uses `|v.x| <gamma x>^(-2) <= V0 / gamma`.

    Examples
    --------
    >>> round(tilde_sandwich_delta(TildeExp(0.1, 1 / 30), 0.5), 12)
    0.066666666667
    """
    match w:
        case TildeExp(gamma=gamma, beta=beta):
            return (gamma + beta) * v0
        case TildePoly(q=q, gamma=gamma, beta=beta):
            return q * (gamma + beta) * v0 / gamma
        case _:  # pragma: no cover
            assert False


def check_sandwich(w: TildeExp | TildePoly, grid: PhaseGrid) -> float:
    """Verify the sandwich bound of a tilde weight on every node of `grid`.

    Returns the bound `delta`.

    Raises
    ------
    DomainError
        If `delta >= 1` or the bound fails on some node.
    """
    delta = tilde_sandwich_delta(w, grid.v0)
    if not delta < 1.0:
        raise DomainError(
            f'tilde weight is not comparable to its base weight: delta = {delta:g}'
        )
    x, _ = grid.phase_points()
    match w:
        case TildeExp(gamma=gamma):
            base = np.exp(gamma * japanese_bracket(x))
        case TildePoly(q=q, gamma=gamma):
            base = japanese_bracket(gamma * x) ** q
        case _:  # pragma: no cover
            assert False
    ratio = weight_on_grid(w, grid) / base
    tol = 1e-12
    if np.any(ratio < 1.0 - delta - tol) or np.any(ratio > 1.0 + delta + tol):
        raise DomainError('tilde weight violates its sandwich bound on the grid')
    return delta


def theta_rate(
    m: WeightSpec,
    rate: float,
    t: ArrayLike,
    *,
    a_star: float | None = None,
) -> np.ndarray:
    """Comparison rate of the convergence estimate.

    For polynomial weights `<x>^k`, `rate` is an exponent `ell` in `(0, k)` and the
    rate is `<t>^(-ell)`. For exponential weights `rate` is `a` in `(a_star, 0)`
    and the rate is `exp(a t)`.

    Examples
    --------
    >>> round(float(theta_rate(Polynomial(2), 1.0, 3.0)) ** 2, 12)
    0.1
    >>> float(theta_rate(Exponential(0.1), -0.2, 0.0))
    1.0
    >>> bool(np.isclose(theta_rate(Exponential(0.1), -0.2, 5.0), np.exp(-1.0)))
    True
    >>> theta_rate(Polynomial(2), 2.5, 1.0)
    Traceback (most recent call last):
    ...
    runtumble.errors.DomainError: ell must lie in (0, k) = (0, 2), got 2.5
    """
    t_ = np.asarray(t, dtype=float)
    if np.any(t_ < 0):
        raise DomainError('t must be nonnegative')
    match m:
        case Polynomial(k=k) | TildePoly(q=k):
            if not 0.0 < rate < k:
                raise DomainError(f'ell must lie in (0, k) = (0, {k:g}), got {rate!r}')
            return japanese_bracket(t_[..., None]) ** (-rate)
        case Exponential() | TildeExp():
            if not rate < 0.0:
                raise DomainError(f'a must be negative, got {rate!r}')
            if a_star is not None and not a_star < rate:
                raise DomainError(f'a must exceed a* = {a_star:g}, got {rate!r}')
            return np.exp(rate * t_)
        case _:
            raise DomainError(f'no comparison rate for weight {m!r}')
