import math
from dataclasses import dataclass

from runtumble.errors import DomainError

SUPPORTED_DIMS = (1, 2, 3)


def ball_radius(dim: int) -> float:
    """Radius `V0` of the centered ball of unit volume in `dim` dimensions.

    Examples
    --------
    >>> ball_radius(1)
    0.5
    >>> round(ball_radius(2), 6)
    0.56419
    >>> round(ball_radius(3), 6)
    0.62035
    """
    match dim:
        case 1:
            return 0.5
        case 2:
            return 1.0 / math.sqrt(math.pi)
        case 3:
            return (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
        case _:
            raise DomainError(f'dim must be one of {SUPPORTED_DIMS}, got {dim!r}')


def first_abs_moment(dim: int) -> float:
    """`V1`, the integral of `|v_1|` over the unit-volume velocity ball.

    Examples
    --------
    >>> first_abs_moment(1)
    0.25
    >>> round(first_abs_moment(2), 4)
    0.2394
    """
    v0 = ball_radius(dim)
    match dim:
        case 1:
            return v0 * v0
        case 2:
            return 4.0 * v0**3 / 3.0
        case 3:
            return math.pi * v0**4 / 2.0
        case _:  # pragma: no cover
            assert False


@dataclass(frozen=True)
class ModelConstants:
    """Closed-form constants of the run-and-tumble model.

    Attributes
    ----------
    chi
        Tumbling bias, in `(0, 1)`.
    dim
        Spatial dimension.
    V0
        Speed bound (radius of the unit-volume velocity ball).
    V1
        First absolute velocity moment.
    gamma_star
        Dispersion threshold `(1 - chi) / V0`.
    """

    chi: float
    dim: int
    V0: float
    V1: float
    gamma_star: float

    def a_star(self, gamma: float) -> float:
        """Decay exponent `chi + gamma V0 - 1` of the damped transport."""
        return decay_exponent(self.chi, gamma, self.V0)


def model_constants(chi: float, dim: int) -> ModelConstants:
    """Populate the model constants for bias `chi` in dimension `dim`.

    Examples
    --------
    >>> c = model_constants(0.5, 1)
    >>> c.V0, c.gamma_star, round(c.a_star(0.1), 12)
    (0.5, 1.0, -0.45)
    """
    check_chi(chi)
    if dim not in (1, 2):
        raise DomainError(f'dim must be 1 or 2, got {dim!r}')
    v0 = ball_radius(dim)
    return ModelConstants(
        chi=chi,
        dim=dim,
        V0=v0,
        V1=first_abs_moment(dim),
        gamma_star=(1.0 - chi) / v0,
    )


def check_chi(chi: float) -> None:
    if not 0.0 < chi < 1.0:
        raise DomainError(f'chi must lie in (0, 1), got {chi!r}')


def decay_exponent(chi: float, gamma: float, v0: float) -> float:
    """`a* = chi + gamma V0 - 1` for a velocity set with speed bound `v0`.

    Examples
    --------
    >>> round(decay_exponent(0.5, 0.1, 1.0), 12)
    -0.4
    """
    if gamma < 0:
        raise DomainError(f'gamma must be nonnegative, got {gamma!r}')
    return chi + gamma * v0 - 1.0
