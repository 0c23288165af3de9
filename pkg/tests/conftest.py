import os

from hypothesis import HealthCheck, settings

try:
    import icecream

    icecream.install()  # pragma: no cover
except ImportError:  # pragma: no cover
    pass

# Values not given here fall back to the profile active at registration time.
# On GitHub Actions, hypothesis auto-loads its built-in 'ci' profile
# (derandomize=True, deadline=None, database=None, print_blob=True).
# Evolutions and FFTs take longer than the hypothesis deadline.
settings.register_profile(
    'default',
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    'nightly',
    max_examples=2_000,
    deadline=None,
    print_blob=True,
    suppress_health_check=[HealthCheck.too_slow],
    # The value inherited from 'ci' (True) would repeat the same examples
    # every night.
    derandomize=False,
)
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))
