"""Numerical laboratory for the linear run-and-tumble kinetic equation."""

__all__ = [
    'analysis',
    'cli',
    'errors',
    'model',
    'particles',
    'semigroup',
    'strategies',
    '__version__',
]

from . import analysis, cli, errors, model, particles, semigroup, strategies
from .__about__ import __version__
