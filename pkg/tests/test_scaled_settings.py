import pytest
from hypothesis import settings

from tests.scaled_settings import scaled


@pytest.mark.parametrize('scale', [0.2, 0.3, 0.4, 0.5, 1.0])
def test_scaled(scale: float) -> None:
    """The scales used by the evolution and particle tests, against the profile."""
    baseline = settings().max_examples
    assert scaled(scale).max_examples == max(1, round(scale * baseline))


@pytest.mark.parametrize('scale', [0.0, 1e-6])
def test_scaled_runs_at_least_one_example(scale: float) -> None:
    assert scaled(scale).max_examples == 1


def test_scaled_keeps_the_profile_deadline() -> None:
    assert scaled(0.5).deadline == settings().deadline
