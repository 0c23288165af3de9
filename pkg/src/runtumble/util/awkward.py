import awkward as ak
import numpy as np


def jagged_from_events(owner: np.ndarray, times: np.ndarray, n: int, /) -> ak.Array:
    """Group event `times` by their `owner` index into `n` sorted lists.

    Examples
    --------
    >>> jagged_from_events(np.array([2, 0, 2]), np.array([0.5, 0.1, 0.2]), 4).tolist()
    [[0.1], [], [0.2, 0.5], []]
    """
    owner = np.asarray(owner, dtype=np.int64)
    times = np.asarray(times, dtype=np.float64)
    order = np.lexsort((times, owner))
    counts = np.bincount(owner, minlength=n)
    return ak.unflatten(times[order], counts)


def event_count(a: ak.Array, /) -> int:
    """Total number of events in a jagged array of event times.

    Examples
    --------
    >>> event_count(ak.Array([[0.1, 0.3], [], [2.0]]))
    3
    """
    return int(ak.sum(ak.num(a, axis=1)))


def any_nonfinite_in_awkward_array(a: ak.Array, /) -> bool:
    """`True` if any event time is NaN or infinite.

    Examples
    --------
    >>> any_nonfinite_in_awkward_array(ak.Array([[0.1], [np.inf]]))
    True
    >>> any_nonfinite_in_awkward_array(ak.Array([[0.1], []]))
    False
    """
    flat = ak.to_numpy(ak.flatten(a, axis=None))
    return bool(np.any(~np.isfinite(flat)))
