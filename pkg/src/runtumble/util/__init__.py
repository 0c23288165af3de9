"""Small NumPy and Awkward helpers shared across subpackages."""

__all__ = [
    'any_nonfinite_in_awkward_array',
    'any_nonfinite_in_numpy_array',
    'event_count',
    'jagged_from_events',
    'japanese_bracket',
    'minmod',
]

from .awkward import any_nonfinite_in_awkward_array, event_count, jagged_from_events
from .numpy import any_nonfinite_in_numpy_array, japanese_bracket, minmod
