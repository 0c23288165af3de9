import logging
from dataclasses import dataclass

import numpy as np

from runtumble.errors import ConfigError
from runtumble.model import (
    DistributionField,
    DriftCertificate,
    PhaseGrid,
    drift_certificate,
    weight_on_grid,
)
from runtumble.semigroup import EvolutionTrace
from runtumble.semigroup.integrator import Functional

logger = logging.getLogger(__name__)

LYAPUNOV_FUNCTIONAL = 'lyapunov'


def lyapunov_functional(cert: DriftCertificate, grid: PhaseGrid) -> Functional:
    """`f -> int |f| m~` for the weight of `cert`, to record during `evolve()`."""
    m = np.asarray(weight_on_grid(cert.weight, grid))

    def W(f: DistributionField) -> float:
        return f.with_values(np.abs(f.values) * m).integrate()

    return W


@dataclass(frozen=True)
class LyapunovReport:
    """The Lyapunov functional along an evolution, against its uniform bound.

    Attributes
    ----------
    times
        Sample times.
    W
        `int |f(t)| m~`.
    bound
        `max((A / alpha) int |f0|, W(0))`, inflated by the tolerance.
    passed
        Whether `W(t) <= bound` at every sample.
    certificate
        The drift certificate providing `m~`, `A` and `alpha`.
    """

    times: np.ndarray
    W: np.ndarray
    bound: float
    passed: bool
    certificate: DriftCertificate

    def to_dict(self) -> dict[str, object]:
        return {
            'bound': self.bound,
            'W_max': float(self.W.max()),
            'W_0': float(self.W[0]),
            'W_T': float(self.W[-1]),
            'passed': self.passed,
            'certificate': self.certificate.to_dict(),
        }


def lyapunov_monitor(
    trace: EvolutionTrace,
    chi: float,
    gamma: float,
    *,
    tol: float = 1e-6,
) -> LyapunovReport:
    """Check the uniform Lyapunov bound along a trace of the full generator.

    The functional is read from the `lyapunov` series of the trace when it was
    recorded (see `lyapunov_functional()`), otherwise computed on the snapshots.
    The tolerance is `tol` plus the relative mass leaked through the boundary.

    Raises
    ------
    CertificateError
        If `gamma` admits no drift certificate.
    ConfigError
        If the trace has neither the series nor snapshots.
    """
    grid = trace.final.grid
    cert = drift_certificate(chi, gamma, grid.dim)
    if LYAPUNOV_FUNCTIONAL in trace.series:
        times = trace.times
        W = trace.series[LYAPUNOV_FUNCTIONAL]
        l1_0 = float(trace.series['l1'][0])
    elif trace.snapshots:
        functional = lyapunov_functional(cert, grid)
        times = trace.snapshot_times
        W = np.asarray([functional(f) for f in trace.snapshots])
        l1_0 = abs(trace.snapshots[0]).integrate()
    else:
        raise ConfigError(
            'the trace records neither the lyapunov functional nor snapshots', field='trace'
        )
    leak = float(trace.leak[-1]) if trace.leak.size else 0.0
    slack = tol + (abs(leak) / l1_0 if l1_0 > 0 else 0.0)
    bound = max(cert.bound_ratio * l1_0, float(W[0])) * (1.0 + slack)
    passed = bool(np.all(W <= bound))
    logger.info('lyapunov monitor: max W=%g bound=%g passed=%s', float(np.max(W)), bound, passed)
    return LyapunovReport(
        times=np.asarray(times), W=np.asarray(W), bound=bound, passed=passed, certificate=cert
    )
