"""Exception hierarchy.

All exceptions raised on purpose by this package derive from `RunTumbleError`.
Argument errors also derive from `ValueError` so that callers unaware of the
hierarchy can still catch them.
"""

from collections.abc import Sequence

__all__ = [
    'RunTumbleError',
    'DomainError',
    'CertificateError',
    'FitError',
    'ConfigError',
    'StabilityError',
    'NumericalError',
    'ConvergenceError',
]


class RunTumbleError(Exception):
    """Base class of all errors raised by `runtumble`."""


class DomainError(RunTumbleError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CertificateError(DomainError):
    """The confinement drift certificate does not exist for the given `gamma`.

    Parameters
    ----------
    message
        Human-readable description.
    gamma_max
        The largest admissible `gamma` found by bisection.
    """

    def __init__(self, message: str, gamma_max: float) -> None:
        super().__init__(message)
        self.gamma_max = gamma_max


class FitError(DomainError):
    """Invalid input to a decay fit."""


class ConfigError(RunTumbleError):
    """An inconsistent configuration.

    Parameters
    ----------
    message
        Human-readable description.
    field
        Dotted name of the offending configuration field, if known.
    """

    def __init__(self, message: str, field: str | None = None) -> None:
        if field is not None:
            message = f'{field}: {message}'
        super().__init__(message)
        self.field = field


class StabilityError(ConfigError):
    """A requested time step violates the CFL bound."""


class NumericalError(RunTumbleError):
    """Non-finite values appeared while stepping.

    Parameters
    ----------
    message
        Human-readable description.
    step
        Index of the step that produced the non-finite values.
    time
        Simulation time reached by that step.
    """

    def __init__(self, message: str, step: int, time: float) -> None:
        super().__init__(f'{message} (step {step}, t={time:g})')
        self.step = step
        self.time = time


class ConvergenceError(RunTumbleError):
    """An iteration did not converge or a decay assumption failed.

    Parameters
    ----------
    message
        Human-readable description.
    history
        Residuals (or other monitored values) recorded before giving up.
    """

    def __init__(self, message: str, history: Sequence[float] = ()) -> None:
        super().__init__(message)
        self.history = list(history)
