import numpy as np
from hypothesis import strategies as st
from hypothesis.extra import numpy as st_np

from runtumble.particles import ParticleEnsemble, uniform_ball_sample


@st.composite
def particle_ensembles(
    draw: st.DrawFn,
    *,
    dim: int | None = None,
    min_n: int = 1,
    max_n: int = 50,
    max_position: float = 5.0,
) -> ParticleEnsemble:
    """Strategy for particle ensembles with velocities in the unit-volume ball.

    Positions are drawn by Hypothesis; velocities come from the seeded uniform
    sampler so that every speed respects the bound.

    Examples
    --------
    >>> e = particle_ensembles(dim=2, min_n=3, max_n=3).example()
    >>> e.n, e.dim
    (3, 2)
    """
    if dim is None:
        dim = draw(st.sampled_from((1, 2, 3)), label='dim')
    n = draw(st.integers(min_value=min_n, max_value=max_n), label='n')
    positions = draw(
        st_np.arrays(
            dtype=np.float64,
            shape=(n, dim),
            elements=st.floats(min_value=-max_position, max_value=max_position),
        ),
        label='positions',
    )
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1), label='seed')
    velocities = uniform_ball_sample(np.random.default_rng(seed), dim, n)
    return ParticleEnsemble(positions, velocities, seed=seed)
