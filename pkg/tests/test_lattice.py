import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from jumptree import (
    build_lattice,
    enlarged_jump_distribution,
    first_exit_probabilities,
    forward_jump_distribution,
    jump_moments,
    solve_jump_probs,
    within_barrier_distribution,
)
from jumptree.lattice import DegenerateJumpError, InvalidProbabilityError, NegativeProbabilityError, terminal_brownian_pmf

from conftest import lattice, panel_a


def _mp_solve(params, n, nu):
    """Moment system solved at 50 digits, independent of numpy."""
    mpmath.mp.dps = 50
    dt = mpmath.mpf(params.tau) / n
    gp, d2 = mpmath.mpf(params.gamma_prime), mpmath.mpf(params.delta) ** 2
    h = mpmath.sqrt(gp**2 + d2)
    raw = [mpmath.mpf(1), gp]
    for i in range(2, 2 * nu + 1):
        raw.append(gp * raw[i - 1] + (i - 1) * d2 * raw[i - 2])
    ls = list(range(-nu, nu + 1))
    A = mpmath.matrix([[mpmath.mpf(l) ** i for l in ls] for i in range(2 * nu + 1)])
    b = mpmath.matrix([1] + [params.lambda_ * dt * raw[i] / h**i for i in range(1, 2 * nu + 1)])
    return [float(x) for x in mpmath.lu_solve(A, b)]


@pytest.mark.parametrize("n,nu", [(50, 1), (400, 3), (800, 4)])
def test_jump_probs_match_high_precision_solve(n, nu):
    spec = lattice(40.0, n, nu)
    assert spec.q == pytest.approx(_mp_solve(panel_a(), n, nu), rel=1e-9, abs=1e-16)


def test_lattice_geometry(params):
    spec = lattice(40.0, 400, 3)
    assert spec.h == pytest.approx(math.sqrt(0.025**2 + 0.05))
    assert spec.p == pytest.approx(0.5 * (1 + params.alpha * math.sqrt(spec.dt) / params.sigma))
    assert spec.levels == 2401
    assert spec.q.sum() == pytest.approx(1.0, abs=1e-14)
    assert spec.c_consts[3] == 0.0
    assert spec.w_consts.tolist() == pytest.approx(np.maximum(spec.c_consts[4:], spec.c_consts[2::-1]).tolist())


def test_no_jumps_gives_point_mass(params):
    spec = build_lattice(params.with_(lambda_=0.0), 10, 3)
    assert spec.q.tolist() == [0, 0, 0, 1, 0, 0, 0]


def test_errors(params):
    with pytest.raises(InvalidProbabilityError):
        build_lattice(params.with_(r=50.0), 1, 1)
    with pytest.raises(DegenerateJumpError):
        build_lattice(params.with_(gamma_prime=0.0, delta=0.0), 10, 1)
    with pytest.raises(NegativeProbabilityError):
        build_lattice(params, 400, 3, c=0.5)
    with pytest.raises(ValueError):
        build_lattice(params, 0, 3)


def test_solver_rejects_negative_solution():
    mom = jump_moments(panel_a(), 1.0, 2)
    with pytest.raises(NegativeProbabilityError):
        solve_jump_probs(mom, 0.225, 1)


@pytest.mark.parametrize("n,nu", [(50, 1), (400, 3), (200, 4)])
def test_forward_distribution_normalised(n, nu):
    dist = forward_jump_distribution(lattice(40.0, n, nu))
    assert (dist.lo, dist.hi) == (-nu * n, nu * n)
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-10)


def test_forward_mean_matches_cumulant():
    spec = lattice(40.0, 400, 3)
    dist = forward_jump_distribution(spec)
    mean = float(np.dot(dist.levels, dist.probs)) * spec.h
    assert mean == pytest.approx(5.0 * -0.025, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(gp=st.floats(-0.1, 0.1), d2=st.floats(0.005, 0.08), n=st.integers(20, 120))
def test_enlarged_dominates_and_is_symmetric(gp, d2, n):
    try:
        spec = build_lattice(panel_a(gamma_prime=gp, delta=math.sqrt(d2)), n, 3)
    except NegativeProbabilityError:
        assume(False)
    q = forward_jump_distribution(spec).probs
    qt = enlarged_jump_distribution(spec).probs
    assert np.array_equal(qt, qt[::-1])
    # equal at the extreme levels, so allow one rounding step
    assert np.all(qt >= q * (1 - 1e-12)) and np.all(qt >= q[::-1] * (1 - 1e-12))


@pytest.mark.parametrize("kbar,lbar", [(1, 1), (5, 20), (13, 13), (400, 400)])
def test_within_barrier_plus_exits_is_one(kbar, lbar):
    spec = lattice(40.0, 100, 3)
    qb = within_barrier_distribution(spec, kbar, lbar)
    exits = first_exit_probabilities(spec, kbar, lbar)
    assert qb.probs.sum() + exits.sum() == pytest.approx(1.0, abs=1e-12)
    assert qb.lo >= -lbar and qb.hi <= kbar
    full = forward_jump_distribution(spec)
    assert np.all(qb.probs <= full.probs[qb.lo - full.lo : qb.hi - full.lo + 1] + 1e-18)


def test_within_barrier_nondecreasing_in_barriers():
    spec = lattice(40.0, 100, 3)
    masses = [within_barrier_distribution(spec, k, k).probs.sum() for k in (2, 4, 8, 16, 32)]
    assert all(a <= b for a, b in zip(masses, masses[1:]))


def test_within_barrier_rejects_nonpositive():
    with pytest.raises(ValueError):
        within_barrier_distribution(lattice(40.0, 50, 3), 0, 3)


def test_brownian_pmf():
    spec = lattice(40.0, 50, 3)
    pmf = terminal_brownian_pmf(spec)
    assert pmf.sum() == pytest.approx(1.0)
    assert float(np.dot(np.arange(51), pmf)) == pytest.approx(50 * spec.p)


def test_nu1_closed_form_symmetric():
    spec = build_lattice(panel_a(gamma_prime=0.0), 100, 1)
    assert spec.h == pytest.approx(math.sqrt(0.05))
    assert spec.q == pytest.approx([0.025, 0.95, 0.025], abs=1e-15)


def test_nu1_closed_form_skewed():
    spec = build_lattice(panel_a(gamma_prime=-0.02), 200, 1)
    base = 5.0 / 200 / 2
    assert spec.q[0] == pytest.approx(base * (1 - -0.02 / spec.h) * (0.02**2 + 0.05) / spec.h**2)
    assert spec.q[2] == pytest.approx(base * (1 + -0.02 / spec.h) * (0.02**2 + 0.05) / spec.h**2)


def test_symmetric_jumps_enlarged_equals_full():
    spec = build_lattice(panel_a(gamma_prime=0.0), 100, 3)
    assert enlarged_jump_distribution(spec).probs == pytest.approx(forward_jump_distribution(spec).probs, rel=1e-12, abs=1e-300)


def test_enlarged_matches_enumeration_with_w_over_n():
    import itertools

    spec = build_lattice(panel_a(gamma_prime=-0.02, lambda_=2.0, tau=0.5), 3, 1)
    w = spec.w_consts[0] / spec.n
    step = {-1: w, 0: spec.q[1], 1: w}
    ref = {}
    for path in itertools.product((-1, 0, 1), repeat=3):
        ref[sum(path)] = ref.get(sum(path), 0.0) + math.prod(step[s] for s in path)
    qt = enlarged_jump_distribution(spec)
    for lvl, pr in ref.items():
        assert abs(qt.at(lvl) - pr) < 1e-15
