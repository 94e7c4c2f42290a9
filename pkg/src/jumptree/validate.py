"""Executable invariant checks, grouped into a fast and a full suite.

Each check returns a :class:`Check` with the measured slack, i.e. how far the
quantity sits inside its bound (positive means pass).
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import engine as eng
from .lattice import (
    LatticeSpec,
    build_lattice,
    enlarged_jump_distribution,
    forward_jump_distribution,
    jump_moments,
    within_barrier_distribution,
)
from .model import Kind, MarketParams, black_scholes_price, merton_series_price
from .oracle import enumerate_paths_oracle
from .truncation import (
    TruncationBounds,
    BoundMethod,
    numerical_bounds,
    theoretical_bounds_american_put,
    theoretical_bounds_call,
    theoretical_bounds_put,
    truncation_constants,
)


@dataclass
class Check:
    name: str
    passed: bool
    slack: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<42s} slack={self.slack:+.3e}{extra}"


def table1_params(K: float = 40.0) -> MarketParams:
    """Table 1 Panel A inputs (log-jump mean chosen so that E[J] = 0)."""
    return MarketParams.from_variances(40.0, K, 0.08, 0.05, 1.0, lambda_=5.0, gamma_prime=-0.025, delta2=0.05)


def tiny_params(K: float = 40.0) -> MarketParams:
    """Inputs mild enough for moment matching on trees of a few steps."""
    return table1_params(K).with_(lambda_=2.0, tau=0.5, gamma_prime=-0.06)


def _spec(params: MarketParams, n: int, nu: int, fault: bool) -> LatticeSpec:
    spec = build_lattice(params, n, nu)
    if fault:
        q = spec.q.copy()
        q[spec.nu] *= 1.0 + 1e-6
        spec = dataclasses.replace(spec, q=q)
    return spec


def check_moment_matching(fault: bool = False) -> Check:
    worst = 0.0
    for nu in (1, 2, 3, 4):
        params = table1_params()
        spec = _spec(params, 400, nu, fault)
        mom = jump_moments(params, spec.dt, 2 * nu)
        x = np.arange(-nu, nu + 1) * spec.h
        for i in range(1, 2 * nu + 1):
            target = mom.cumulants[i - 1]
            rel = abs(float(np.sum(x**i * spec.q)) - target) / abs(target)
            worst = max(worst, rel)
    return Check("moment matching (rel residual < 1e-10)", worst < 1e-10, 1e-10 - worst)


def check_normalization(fault: bool = False) -> Check:
    worst = 0.0
    for n, nu in ((50, 1), (400, 3), (2000, 4)):
        spec = _spec(table1_params(), n, nu, fault)
        worst = max(worst, abs(forward_jump_distribution(spec).probs.sum() - 1.0))
    return Check("sum of q_n equals 1 (tol 1e-10)", worst < 1e-10, 1e-10 - worst)


def check_enlarged_dominates(fault: bool = False) -> Check:
    slack = math.inf
    for gp in (-0.05, 0.0, 0.03):
        params = table1_params().with_(gamma_prime=gp)
        spec = _spec(params, 100, 3, fault)
        q = forward_jump_distribution(spec).probs
        qt = enlarged_jump_distribution(spec).probs
        lo = 1 - 1e-12  # extreme levels coincide up to rounding
        slack = min(slack, float(np.min(qt - lo * q)), float(np.min(qt - lo * q[::-1])))
        if not np.array_equal(qt, qt[::-1]):
            return Check("q_n(+-l) <= enlarged(l), symmetric", False, -1.0, "asymmetric")
    return Check("q_n(+-l) <= enlarged(l), symmetric", slack >= 0, slack)


def check_within_barrier(fault: bool = False) -> Check:
    spec = _spec(table1_params(), 200, 3, fault)
    full = forward_jump_distribution(spec)
    slack = math.inf
    for kbar, lbar in ((3, 3), (10, 4), (25, 40)):
        qb = within_barrier_distribution(spec, kbar, lbar)
        ref = full.probs[qb.lo - full.lo : qb.hi - full.lo + 1]
        slack = min(slack, float(np.min(ref - qb.probs)))
    return Check("within-barrier <= full per level", slack >= 0, slack)


def check_oracle_equivalence(fault: bool = False) -> Check:
    worst = 0.0
    for n, nu, kind in ((3, 1, Kind.PUT), (3, 3, Kind.CALL), (4, 1, Kind.CALL), (4, 3, Kind.PUT)):
        params = tiny_params()
        spec = _spec(params, n, nu, fault)
        ref = enumerate_paths_oracle(params, spec, None, kind).price
        worst = max(worst, abs(eng.price_european_full(params, spec, kind).value - ref))
    return Check("path enumeration == expected value (1e-13)", worst < 1e-13, 1e-13 - worst)


def check_reflection_bound(fault: bool = False) -> Check:
    slack = math.inf
    for nu, n, bars in ((1, 6, ((1, 1), (2, 1), (1, 3))), (3, 4, ((3, 3), (4, 2), (5, 6)))):
        params = tiny_params()
        spec = _spec(params, n, nu, fault)
        qt = enlarged_jump_distribution(spec)
        for kbar, lbar in bars:
            res = enumerate_paths_oracle(params, spec, TruncationBounds(kbar, lbar, None, BoundMethod.FULL))
            for k in range(-lbar, kbar + 1):
                up = sum(qt.at(2 * kbar - k + 2 * i) for i in range(1, nu + 1))
                down = sum(qt.at(2 * lbar + k + 2 * i) for i in range(1, nu + 1))
                slack = min(slack, up - res.crossed_above.get(k, 0.0), down - res.crossed_below.get(k, 0.0))
    return Check("reflection bound on crossing mass", slack >= -1e-15, slack)


def check_tail_bounds(fault: bool = False) -> Check:
    slack = math.inf
    params = table1_params().with_(gamma_prime=-0.06)
    for n in (50, 200):
        spec = _spec(params, n, 1, fault)
        qt = enlarged_jump_distribution(spec)
        w = float(spec.w_consts[0])
        for k in range(max(0, math.ceil(2 * w - 1)), n + 1):
            bound = 2 * math.exp(w + k * math.log(w) - math.lgamma(k + 1))
            slack = min(slack, (bound - qt.at(k)) / max(bound, 1e-300))
    spec = _spec(params, 100, 3, fault)
    consts = truncation_constants(spec)
    Wn = consts.W[-1]
    qt = enlarged_jump_distribution(spec)
    for k in range(3 * math.ceil(2 * Wn - 1), 3 * spec.n + 1):
        m = k // 3
        bound = consts.G * math.exp(m * math.log(Wn) - math.lgamma(m + 1))
        slack = min(slack, (bound - qt.at(k)) / max(bound, 1e-300))
    return Check("enlarged tail bounds (nu=1, nu=3)", slack >= 0, slack, "relative")


def check_expected_vs_backward(fault: bool = False) -> Check:
    worst = 0.0
    for kind in Kind:
        params = table1_params()
        spec = _spec(params, 100, 3, fault)
        a = eng.price_european_full(params, spec, kind).value
        b = eng.price_backward_full(params, spec, kind).value
        worst = max(worst, abs(a - b))
    return Check("expected value == backward (1e-10)", worst < 1e-10, 1e-10 - worst)


def _bounds_for(spec, params, kind, method, eps):
    if method == "numerical":
        return numerical_bounds(spec, enlarged_jump_distribution(spec), params, eps, kind)
    consts = truncation_constants(spec)
    if kind is Kind.CALL:
        return theoretical_bounds_call(spec, consts, params, eps)
    return theoretical_bounds_put(spec, consts, params, eps)


def error_guarantee_cases(ns, nus, strikes) -> Iterator[tuple]:
    for n, nu, K, kind, method in itertools.product(ns, nus, strikes, Kind, ("theoretical", "numerical")):
        yield n, nu, K, kind, method


def check_error_guarantee(ns=(50,), nus=(1, 3), strikes=(40.0,), fault: bool = False) -> tuple[Check, Check]:
    err_slack = chain_slack = math.inf
    for n, nu, K, kind, method in error_guarantee_cases(ns, nus, strikes):
        params = table1_params(K)
        spec = _spec(params, n, nu, fault)
        eps = 1.0 / n
        bounds = _bounds_for(spec, params, kind, method, eps)
        v = eng.price_european_full(params, spec, kind).value
        vt = eng.price_european_type_a(params, spec, bounds, kind).value
        vtt = eng.price_european_truncated(params, spec, bounds, kind).value
        err_slack = min(err_slack, eps - (v - vtt), eps + (v - vtt))
        chain_slack = min(chain_slack, vt - vtt, v - vt)
    return (
        Check("|V - V_TT| < 1/n for all bounds", err_slack > 0, err_slack),
        Check("V_TT <= V_T <= V", chain_slack >= -1e-12, chain_slack),
    )


def check_american_put(ns=(50,), fault: bool = False) -> tuple[Check, Check]:
    thm4 = err = math.inf
    for n in ns:
        for K in (30.0, 40.0, 50.0):
            params = table1_params(K)
            spec = _spec(params, n, 3, fault)
            bounds = theoretical_bounds_american_put(spec, truncation_constants(spec), params, 1.0 / n)
            # tighter numerical levels make the comparison non-trivial
            tight = numerical_bounds(spec, enlarged_jump_distribution(spec), params, 1.0 / n, Kind.PUT)
            va = eng.price_american_full(params, spec, Kind.PUT).value
            ve = eng.price_backward_full(params, spec, Kind.PUT).value
            for bnd in (bounds, tight):
                vak = eng.price_backward_boundary(params, spec, bnd, K, "american", Kind.PUT).value
                vek = eng.price_backward_boundary(params, spec, bnd, K, "european", Kind.PUT).value
                thm4 = min(thm4, abs(vek - ve) - abs(vak - va))
                err = min(err, 1.0 / n - abs(va - vak))
    return (
        Check("|V_A^K - V_A| <= |V_E^K - V_E|", thm4 >= -1e-12, thm4),
        Check("|V_A - V_A^K| < 1/n", err > 0, err),
    )


def check_series(fault: bool = False) -> Check:
    params = table1_params()
    bs = black_scholes_price(params, Kind.PUT)
    a = abs(merton_series_price(params.with_(lambda_=0.0), Kind.PUT) - bs)
    call = merton_series_price(params, Kind.CALL)
    put = merton_series_price(params, Kind.PUT)
    parity = abs(call - put - (params.S0 * math.exp(-params.d * params.tau) - params.K * math.exp(-params.r * params.tau)))
    worst = max(a, parity)
    return Check("series: lambda=0 == BS, put-call parity", worst < 1e-9, 1e-9 - worst)


def check_convergence(fault: bool = False) -> Check:
    worst = 0.0
    for K in (30.0, 40.0, 50.0):
        params = table1_params(K)
        spec = _spec(params, 800, 3, fault)
        bounds = numerical_bounds(spec, enlarged_jump_distribution(spec), params, 1 / 800, Kind.PUT)
        v = eng.price_european_truncated(params, spec, bounds, Kind.PUT).value
        worst = max(worst, abs(v - merton_series_price(params, Kind.PUT)))
    return Check("|V_800 - series| < 2e-3 (Table 1 A)", worst < 2e-3, 2e-3 - worst)


FAST: list[Callable[..., object]] = [
    check_moment_matching,
    check_normalization,
    check_enlarged_dominates,
    check_within_barrier,
    check_oracle_equivalence,
    check_reflection_bound,
    check_tail_bounds,
    check_expected_vs_backward,
    check_error_guarantee,
    check_american_put,
    check_series,
]


def run_suite(suite: str = "fast", fault: bool = False) -> list[Check]:
    if suite not in ("fast", "full"):
        raise ValueError("suite must be 'fast' or 'full'")
    checks: list[Check] = []
    for fn in FAST:
        if suite == "full" and fn is check_error_guarantee:
            out = fn(ns=(50, 100, 200), strikes=(30.0, 40.0, 50.0), fault=fault)
        elif suite == "full" and fn is check_american_put:
            out = fn(ns=(50, 100), fault=fault)
        else:
            out = fn(fault=fault)
        checks.extend(out if isinstance(out, tuple) else (out,))
    if suite == "full":
        checks.append(check_convergence(fault=fault))
    return checks
