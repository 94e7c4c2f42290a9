import itertools
import math

import numpy as np
import pytest

from jumptree import (
    BoundMethod,
    TruncationBounds,
    enlarged_jump_distribution,
    forward_jump_distribution,
    price_backward_boundary,
    price_american_full,
    price_european_full,
    price_european_truncated,
    truncation_constants,
    within_barrier_distribution,
)
from jumptree.oracle import enumerate_paths_oracle

from conftest import lattice, small

CASES = list(itertools.product((1, 2, 3, 4), (1, 3)))


def _bounds(k, l):
    return TruncationBounds(k, l, None, BoundMethod.FULL)


@pytest.mark.parametrize("n,nu", CASES)
@pytest.mark.parametrize("kind", ["call", "put"])
def test_full_price_matches_enumeration(n, nu, kind):
    spec = lattice(40.0, n, nu, tiny=True)
    ref = enumerate_paths_oracle(small(), spec, None, kind).price
    assert abs(price_european_full(small(), spec, kind).value - ref) < 1e-13


@pytest.mark.parametrize("n,nu", CASES)
def test_distributions_match_enumeration(n, nu):
    spec = lattice(40.0, n, nu, tiny=True)
    kbar, lbar = max(1, nu), max(1, nu - 1)
    res = enumerate_paths_oracle(small(), spec, _bounds(kbar, lbar))
    full = forward_jump_distribution(spec)
    for lvl, pr in res.q_full.items():
        assert abs(full.at(lvl) - pr) < 1e-13
    within = within_barrier_distribution(spec, kbar, lbar)
    for lvl in range(-lbar, kbar + 1):
        assert abs(within.at(lvl) - res.q_within.get(lvl, 0.0)) < 1e-13
    v = price_european_truncated(small(), spec, _bounds(kbar, lbar), "put").value
    assert abs(v - enumerate_paths_oracle(small(), spec, _bounds(kbar, lbar), "put").price) < 1e-13


@pytest.mark.parametrize("n,nu", [(3, 1), (4, 3)])
def test_boundary_values_match_enumeration(n, nu):
    spec = lattice(40.0, n, nu, tiny=True)
    bnd = _bounds(nu, nu)
    for b in (0.0, 40.0):
        ref = enumerate_paths_oracle(small(), spec, bnd, "put", b=b).price
        assert abs(price_backward_boundary(small(), spec, bnd, b, "european", "put").value - ref) < 1e-12
        ref_a = enumerate_paths_oracle(small(), spec, bnd, "put", "american", b=b).price
        assert abs(price_backward_boundary(small(), spec, bnd, b, "american", "put").value - ref_a) < 1e-12


@pytest.mark.parametrize("n,nu", [(3, 1), (4, 3)])
def test_american_matches_recursion(n, nu):
    spec = lattice(40.0, n, nu, tiny=True)
    ref = enumerate_paths_oracle(small(), spec, None, "put", "american").price
    assert abs(price_american_full(small(), spec, "put").value - ref) < 1e-12


@pytest.mark.parametrize(
    "nu,n,kbar,lbar", [(1, 6, 1, 1), (1, 6, 2, 1), (1, 8, 1, 3), (3, 4, 3, 3), (3, 4, 4, 2), (3, 4, 2, 5)]
)
def test_reflection_bound(nu, n, kbar, lbar):
    spec = lattice(40.0, n, nu, tiny=True)
    qt = enlarged_jump_distribution(spec)
    res = enumerate_paths_oracle(small(), spec, _bounds(kbar, lbar))
    for k in range(-lbar, kbar + 1):
        up = sum(qt.at(2 * kbar - k + 2 * i) for i in range(1, nu + 1))
        down = sum(qt.at(2 * lbar + k + 2 * i) for i in range(1, nu + 1))
        assert res.crossed_above.get(k, 0.0) <= up + 1e-16
        assert res.crossed_below.get(k, 0.0) <= down + 1e-16


@pytest.mark.parametrize("n", [4, 50, 200])
def test_single_jump_tail_bound(n):
    spec = lattice(40.0, n, 1, tiny=n == 4)
    qt = enlarged_jump_distribution(spec)
    w = float(spec.w_consts[0])
    for k in range(math.ceil(2 * w - 1), n + 1):
        assert qt.at(k) <= 2 * math.exp(w + k * math.log(w) - math.lgamma(k + 1))


@pytest.mark.parametrize("n", [4, 100])
def test_multi_jump_tail_bound(n):
    spec = lattice(40.0, n, 3, tiny=n == 4)
    c = truncation_constants(spec)
    W = c.W[-1]
    qt = enlarged_jump_distribution(spec)
    for k in range(3 * math.ceil(2 * W - 1), 3 * n + 1):
        m = k // 3
        assert qt.at(k) <= c.G * math.exp(m * math.log(W) - math.lgamma(m + 1))


def test_oracle_size_guard():
    with pytest.raises(ValueError):
        enumerate_paths_oracle(small(), lattice(40.0, 9, 1, tiny=True))
