import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from runtumble.errors import FitError

logger = logging.getLogger(__name__)

FitMode = Literal['exponential', 'polynomial']

MIN_SAMPLES = 10


@dataclass(frozen=True)
class RateFit:
    """Least-squares decay fit of a positive series.

    In exponential mode `log(value) ~ intercept + slope t`; in polynomial mode
    `log(value) ~ intercept + slope log<t>`.

    Attributes
    ----------
    mode
        `'exponential'` or `'polynomial'`.
    window
        `(t1, t2)`, the fitted time range.
    slope
        Rate (1/time) or exponent.
    intercept
        Intercept of the log-linear model.
    r_squared
        Coefficient of determination, in `[0, 1]`.
    n_samples
        Number of samples in the window.
    """

    mode: FitMode
    window: tuple[float, float]
    slope: float
    intercept: float
    r_squared: float
    n_samples: int

    def to_dict(self) -> dict[str, object]:
        return {
            'mode': self.mode,
            'window': list(self.window),
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'n_samples': self.n_samples,
        }


def _regress(t: np.ndarray, values: np.ndarray, mode: FitMode) -> tuple[float, float, float]:
    x = t if mode == 'exponential' else 0.5 * np.log1p(t * t)
    y = np.log(values)
    if np.ptp(x) == 0:
        raise FitError('the fit window has zero length')
    result = stats.linregress(x, y)
    r_squared = float(np.clip(result.rvalue**2, 0.0, 1.0))
    if np.ptp(y) == 0:
        r_squared = 1.0
    return float(result.slope), float(result.intercept), r_squared


def fit_decay(
    t: ArrayLike,
    values: ArrayLike,
    window: tuple[float, float] | None = None,
    *,
    mode: FitMode = 'exponential',
) -> RateFit:
    """Fit the decay of a positive series.

    Parameters
    ----------
    t
        Increasing sample times.
    values
        Samples; must be positive inside the window.
    window
        `(t1, t2)`. If `None`, the right end is the last time and the left end is
        chosen in `[T/3, T]` to maximize `r^2` while keeping at least
        `MIN_SAMPLES` samples.
    mode
        `'exponential'` or `'polynomial'`.

    Raises
    ------
    FitError
        If the window holds fewer than `MIN_SAMPLES` samples or a nonpositive value.

    Examples
    --------
    >>> t = np.linspace(0.0, 10.0, 101)
    >>> fit = fit_decay(t, 2.0 * np.exp(-0.3 * t))
    >>> round(fit.slope, 10), round(fit.r_squared, 10)
    (-0.3, 1.0)
    >>> fit = fit_decay(t, (1 + t * t) ** -0.75, mode='polynomial')
    >>> round(fit.slope, 10)
    -1.5
    >>> fit_decay(t[:5], np.ones(5))
    Traceback (most recent call last):
    ...
    runtumble.errors.FitError: need at least 10 samples in the window, got 5
    """
    t_ = np.asarray(t, dtype=float)
    v_ = np.asarray(values, dtype=float)
    if t_.shape != v_.shape or t_.ndim != 1:
        raise FitError('t and values must be one-dimensional and of equal length')
    if mode not in ('exponential', 'polynomial'):
        raise FitError(f'unknown fit mode {mode!r}')
    if window is not None:
        t1, t2 = window
        if not t1 < t2:
            raise FitError(f'window must satisfy t1 < t2, got {window!r}')
        candidates = [np.flatnonzero((t_ >= t1) & (t_ <= t2))]
    else:
        if t_.size < MIN_SAMPLES:
            raise FitError(f'need at least {MIN_SAMPLES} samples in the window, got {t_.size}')
        T = t_[-1]
        first = int(np.searchsorted(t_, t_[0] + (T - t_[0]) / 3.0))
        last = t_.size - MIN_SAMPLES
        starts = range(min(first, last), last + 1)
        candidates = [np.arange(s, t_.size) for s in starts]

    best: RateFit | None = None
    for idx in candidates:
        if idx.size < MIN_SAMPLES:
            raise FitError(f'need at least {MIN_SAMPLES} samples in the window, got {idx.size}')
        if np.any(v_[idx] <= 0) or np.any(~np.isfinite(v_[idx])):
            raise FitError('values must be positive and finite in the fit window')
        slope, intercept, r2 = _regress(t_[idx], v_[idx], mode)
        fit = RateFit(
            mode=mode,
            window=(float(t_[idx[0]]), float(t_[idx[-1]])),
            slope=slope,
            intercept=intercept,
            r_squared=r2,
            n_samples=int(idx.size),
        )
        if best is None or fit.r_squared > best.r_squared:
            best = fit
    assert best is not None
    logger.debug(
        'fit %s on [%g, %g]: slope=%g r2=%g',
        mode,
        best.window[0],
        best.window[1],
        best.slope,
        best.r_squared,
    )
    return best
