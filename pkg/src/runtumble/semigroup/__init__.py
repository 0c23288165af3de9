"""Discrete generators, their evolution, and exact characteristics solutions."""

__all__ = [
    'BUILTIN_FUNCTIONALS',
    'CFL_POSITIVITY',
    'OPERATOR_TAGS',
    'DtPolicy',
    'EvolutionTrace',
    'GeneratorMatrix',
    'OperatorTag',
    'Scheme',
    'assemble_generator',
    'averaging_apply',
    'b0_evolve_exact',
    'damping_integral',
    'duhamel_convolve',
    'evolve',
    'max_stable_dt',
    'semigroup_of',
    'step_size',
    'transport_damped_evolve',
]

from .characteristics import b0_evolve_exact, damping_integral, transport_damped_evolve
from .duhamel import duhamel_convolve
from .generator import (
    CFL_POSITIVITY,
    OPERATOR_TAGS,
    GeneratorMatrix,
    OperatorTag,
    Scheme,
    assemble_generator,
    averaging_apply,
    max_stable_dt,
)
from .integrator import (
    BUILTIN_FUNCTIONALS,
    DtPolicy,
    EvolutionTrace,
    evolve,
    semigroup_of,
    step_size,
)
