import numpy as np


def any_nonfinite_in_numpy_array(n: np.ndarray, /) -> bool:
    """`True` if NumPy array contains any `NaN` or infinite values, else `False`.

    Parameters
    ----------
    n
        A NumPy array of real or complex numbers.

    Returns
    -------
    bool
        `True` if `n` contains any `NaN` or `inf` values, else `False`.

    Examples
    --------
    >>> any_nonfinite_in_numpy_array(np.array([1.0, 2.0, np.nan]))
    True

    >>> any_nonfinite_in_numpy_array(np.array([1.0, -np.inf]))
    True

    >>> any_nonfinite_in_numpy_array(np.array([1.0, 2.0, 3.0]))
    False

    Integer arrays are always finite.

    >>> any_nonfinite_in_numpy_array(np.arange(3))
    False
    """
    match n.dtype.kind:
        case 'f' | 'c':
            return not bool(np.all(np.isfinite(n)))
        case _:
            return False


def minmod(a: np.ndarray, b: np.ndarray, /) -> np.ndarray:
    """Elementwise minmod limiter.

    The argument of smaller magnitude if both have the same sign, else zero.

    Examples
    --------
    >>> minmod(np.array([1.0, -2.0, 3.0]), np.array([2.0, -1.0, -1.0]))
    array([ 1., -1.,  0.])
    """
    same_sign = np.sign(a) == np.sign(b)
    return np.where(same_sign, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def japanese_bracket(x: np.ndarray, /) -> np.ndarray:
    """`sqrt(1 + |x|^2)` with `|x|` taken over the last axis.

    Examples
    --------
    >>> float(japanese_bracket(np.array([0.0])))
    1.0
    >>> japanese_bracket(np.array([[0.0], [0.0]]))
    array([1., 1.])
    """
    return np.sqrt(1.0 + np.sum(np.square(x), axis=-1))
