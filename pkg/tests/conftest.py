import functools

import pytest

from jumptree import MarketParams, build_lattice


def panel_a(K=40.0, **changes):
    params = MarketParams.from_variances(40.0, K, 0.08, 0.05, 1.0, lambda_=5.0, gamma_prime=-0.025, delta2=0.05)
    return params.with_(**changes) if changes else params


def small(K=40.0):
    """Parameters that keep moment matching valid on very short trees."""
    return panel_a(K, lambda_=2.0, tau=0.5, gamma_prime=-0.06)


@functools.lru_cache(maxsize=None)
def lattice(K, n, nu, tiny=False):
    return build_lattice(small(K) if tiny else panel_a(K), n, nu)


@pytest.fixture
def params():
    return panel_a()
