import math

import numpy as np
import pytest

from runtumble.analysis import (
    RateFit,
    SpectralGapReport,
    mass,
    random_probes,
    rightmost_eigenvalues,
    spectral_gap,
    steady_state,
)
from runtumble.errors import ConfigError
from runtumble.model import KernelSpec, make_grid, two_velocity_grid
from runtumble.semigroup import assemble_generator

GEN = assemble_generator('L', two_velocity_grid(L=15.0, n_x=150), KernelSpec(0.9))
STEADY = steady_state(GEN, 'direct')


def _fit(slope: float) -> RateFit:
    return RateFit('exponential', (1.0, 2.0), slope, 0.0, 1.0, 10)


def test_report_properties() -> None:
    report = SpectralGapReport(
        fits=[_fit(-0.3), _fit(-0.2)],
        dynamic_gap=-0.2,
        eigenvalues=[complex(-1e-6, 0.0), complex(-0.25, 0.1)],
    )
    assert report.krylov_gap == -0.25
    assert report.relative_disagreement is not None
    assert math.isclose(report.relative_disagreement, 0.2)
    d = report.to_dict()
    assert d['slopes'] == [-0.3, -0.2]
    assert d['eigenvalues'] == [[-1e-6, 0.0], [-0.25, 0.1]]
    assert d['flagged'] == []


def test_report_without_krylov() -> None:
    report = SpectralGapReport(fits=[_fit(-0.1)], dynamic_gap=-0.1)
    assert report.krylov_gap is None
    assert report.relative_disagreement is None
    zero = SpectralGapReport(fits=[], dynamic_gap=-0.1, eigenvalues=[0j, 0j])
    assert zero.relative_disagreement is None


def test_random_probes() -> None:
    probes = random_probes(STEADY, 3, seed=5)
    again = random_probes(STEADY, 3, seed=5)
    assert len(probes) == 3
    for p, q in zip(probes, again):
        assert np.array_equal(p.values, q.values)
        assert abs(mass(p)) < 1e-12 * abs(p).integrate()
    assert not np.array_equal(probes[0].values, probes[1].values)


def test_rightmost_eigenvalues_match_dense() -> None:
    gen = assemble_generator('L', make_grid(1, L=4.0, n_x=32, n_v=4), KernelSpec(0.5))
    dense = np.linalg.eigvals(gen.to_sparse().toarray())

    # Call the test subject
    values = rightmost_eigenvalues(gen, k=4)

    assert len(values) == 4
    reals = [z.real for z in values]
    assert reals == sorted(reals, reverse=True)
    assert math.isclose(reals[0], float(np.max(dense.real)), abs_tol=1e-8)
    assert np.all(dense.real <= 1e-9)


@pytest.mark.parametrize('k', [0, 2 * 150 - 1])
def test_rightmost_eigenvalues_invalid_k(k: int) -> None:
    with pytest.raises(ConfigError, match='k must lie'):
        rightmost_eigenvalues(GEN, k=k)


def test_spectral_gap() -> None:
    report = spectral_gap(GEN, STEADY, 2, T=30.0, seed=1)
    assert len(report.fits) == 2
    assert report.flagged == []
    assert report.dynamic_gap < 0
    assert report.dynamic_gap == max(fit.slope for fit in report.fits)
    assert abs(report.eigenvalues[0].real) < 1e-4
    assert report.krylov_gap is not None and report.krylov_gap < -1e-3
    assert report.relative_disagreement is not None


def test_spectral_gap_skips_krylov() -> None:
    report = spectral_gap(GEN, STEADY, 1, T=20.0, krylov=False)
    assert report.eigenvalues == []
    muscl = assemble_generator('L', GEN.grid, KernelSpec(0.9), scheme='muscl')
    assert spectral_gap(muscl, STEADY, 1, T=20.0).eigenvalues == []


def test_spectral_gap_needs_full_generator() -> None:
    with pytest.raises(ConfigError, match='full generator'):
        spectral_gap(assemble_generator('B0', GEN.grid, KernelSpec(0.9)), STEADY)
