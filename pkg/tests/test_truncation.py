import math

import numpy as np
import pytest

from jumptree import (
    BoundMethod,
    Kind,
    build_lattice,
    enlarged_jump_distribution,
    numerical_bounds,
    theoretical_bounds_american_put,
    theoretical_bounds_call,
    theoretical_bounds_put,
    truncation_constants,
)

from conftest import lattice, panel_a

W1 = 25 / 9  # n * max(q_1, q_-1) for Panel A at nu = 1, worked out by hand


def test_constants_nu1_closed_form():
    spec = lattice(40.0, 400, 1)
    c = truncation_constants(spec)
    assert c.W == pytest.approx((W1,), rel=1e-12)
    assert c.G == pytest.approx(2 * W1 * math.exp(W1), rel=1e-12)
    assert c.k_plus == pytest.approx(1 + W1**2 * math.exp(2 * spec.h), rel=1e-12)
    assert c.k_minus == pytest.approx(1 + W1**2, rel=1e-12)


def test_constants_recursion_nu3():
    spec = lattice(40.0, 400, 3)
    c = truncation_constants(spec)
    w = spec.w_consts
    W2 = w[1] + w[0] ** 2
    W3 = w[2] + W2**1.5
    assert c.W == pytest.approx((w[0], W2, W3))
    M = [max(Wi, Wi ** ((1 - i) / i)) for i, Wi in enumerate(c.W, start=1)]
    assert c.M == pytest.approx(M)
    assert c.G == pytest.approx(6 * W3 * math.exp(W3) * M[0] ** 2 * M[1] ** 2)


def test_constants_regression():
    c = truncation_constants(lattice(40.0, 400, 3))
    assert c.W == pytest.approx((1.389696441687084, 2.2368655401777335, 3.3822230504930895), rel=1e-10)
    assert c.G == pytest.approx(5772.367222841993, rel=1e-10)
    assert (c.k_plus, c.k_minus) == pytest.approx((326.31810875703894, 133.5538325829564), rel=1e-10)


@pytest.mark.parametrize("fn", [theoretical_bounds_call, theoretical_bounds_put, theoretical_bounds_american_put])
def test_theoretical_levels_grow_logarithmically(fn):
    levels = []
    for n in (100, 400, 1600, 6400):
        spec = build_lattice(panel_a(), n, 3)
        levels.append(fn(spec, truncation_constants(spec), panel_a(), 1.0 / n).kbar)
    assert all(a <= b for a, b in zip(levels, levels[1:]))
    # each quadrupling of n adds at most O(ln 4) levels
    assert max(b - a for a, b in zip(levels, levels[1:])) <= 10
    assert levels[-1] < 0.01 * 3 * 6400


def test_numerical_levels_grow_logarithmically():
    ks = []
    for n in (100, 200, 400, 800, 1600):
        spec = lattice(40.0, n, 3)
        ks.append(numerical_bounds(spec, enlarged_jump_distribution(spec), panel_a(), 1.0 / n, "put").kbar)
    assert ks == sorted(ks)
    assert ks[-1] / math.log(1600) < 2.5


def test_american_put_level_not_below_european():
    spec = lattice(40.0, 200, 3)
    c = truncation_constants(spec)
    eu = theoretical_bounds_put(spec, c, panel_a(), 1 / 200)
    am = theoretical_bounds_american_put(spec, c, panel_a(), 1 / 200)
    assert am.kbar >= eu.kbar and am.method is BoundMethod.THEORETICAL_AMERICAN_PUT


def test_nu1_keeps_smaller_pair():
    spec = lattice(40.0, 200, 1)
    b = theoretical_bounds_call(spec, truncation_constants(spec), panel_a(), 1 / 200)
    assert b.alt is not None
    assert b.kbar + b.lbar <= sum(b.alt) or (b.kbar, b.lbar) == b.alt


def test_levels_clamped_and_no_jump_default():
    spec = build_lattice(panel_a(lambda_=0.0), 10, 3)
    c = truncation_constants(spec)
    assert (theoretical_bounds_put(spec, c, panel_a(lambda_=0.0), 0.1).kbar,) == (1,)
    tiny = lattice(40.0, 10, 1)
    b = theoretical_bounds_call(tiny, truncation_constants(tiny), panel_a(), 1e-12)
    assert 1 <= b.kbar <= 10 and 1 <= b.lbar <= 10


def test_numerical_scan_semantics():
    spec = lattice(40.0, 400, 3)
    qt = enlarged_jump_distribution(spec)
    b = numerical_bounds(spec, qt, panel_a(), 1 / 400, Kind.PUT)
    assert b.kbar == b.lbar
    assert qt.tail(b.kbar) >= b.eta > qt.tail(b.kbar + 1)


def test_numerical_call_thresholds():
    spec = lattice(40.0, 400, 3)
    qt = enlarged_jump_distribution(spec)
    b = numerical_bounds(spec, qt, panel_a(), 1 / 400, Kind.CALL)
    lv = qt.levels[qt.levels >= 0]
    w = 4 * np.exp(spec.h * lv) * qt.probs[qt.levels >= 0]
    tail_e = lambda i: w[lv >= i].sum()
    assert tail_e(b.kbar) >= b.eta > tail_e(b.kbar + 1)
    thr = b.eta / (3 * math.exp(spec.h * b.kbar) + 1)
    assert qt.tail(b.lbar) >= thr > qt.tail(b.lbar + 1)


@pytest.mark.parametrize("eps", [0.0, -1.0, math.inf, math.nan])
def test_bad_epsilon(eps):
    spec = lattice(40.0, 50, 3)
    with pytest.raises(ValueError):
        theoretical_bounds_put(spec, truncation_constants(spec), panel_a(), eps)
    with pytest.raises(ValueError):
        numerical_bounds(spec, enlarged_jump_distribution(spec), panel_a(), eps, "put")


def test_numerical_requires_enlarged():
    from jumptree import forward_jump_distribution

    spec = lattice(40.0, 50, 3)
    with pytest.raises(ValueError):
        numerical_bounds(spec, forward_jump_distribution(spec), panel_a(), 0.1, "put")
