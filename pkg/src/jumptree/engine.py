"""Option pricing on the bivariate lattice.

Expected-value pricers sum terminal payoffs against the product of the
binomial diffusion law and a jump-level distribution (full, cut at the
terminal date only, or killed on barrier exit).  Backward pricers roll the
grid back one step at a time; the boundary variant assigns a fixed value to
every node whose jump level lies outside ``[-lbar, kbar]``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .lattice import (
    LatticeSpec,
    enlarged_jump_distribution,
    first_exit_probabilities,
    forward_jump_distribution,
    terminal_brownian_pmf,
    within_barrier_distribution,
)
from .model import Exercise, Kind, MarketParams
from .truncation import (
    BoundMethod,
    TruncationBounds,
    full_bounds,
    numerical_bounds,
    theoretical_bounds_american_put,
    truncation_constants,
)

__all__ = [
    "PriceMethod",
    "PriceResult",
    "INTRINSIC",
    "price_european_full",
    "price_european_type_a",
    "price_european_truncated",
    "price_backward_full",
    "price_backward_boundary",
    "price_american_full",
    "price_american_put_truncated",
    "price_american_call_truncated",
    "boundary_value_by_paths",
]

INTRINSIC = "intrinsic"


class PriceMethod(str, Enum):
    EXPECTED_VALUE_FULL = "expected_value_full"
    EXPECTED_VALUE_TYPE_A = "expected_value_type_a"
    EXPECTED_VALUE_TRUNCATED = "expected_value_truncated"
    BACKWARD_FULL = "backward_full"
    BACKWARD_BOUNDARY = "backward_boundary"


@dataclass(frozen=True)
class PriceResult:
    value: float
    method: PriceMethod
    bounds: Optional[TruncationBounds] = None
    boundary_b: Optional[Union[float, str]] = None
    nodes_visited: int = 0
    elapsed: float = 0.0

    def __float__(self) -> float:
        return self.value


def _underlying(params: MarketParams, spec: LatticeSpec, i: int, lo: int, hi: int) -> np.ndarray:
    """``S(i, j, l)`` for ``j = 0..i`` (rows) and ``l = lo..hi`` (columns)."""
    diff = np.exp((2 * np.arange(i + 1) - i) * spec.dx)
    with np.errstate(over="ignore"):
        jump = np.exp(np.arange(lo, hi + 1) * spec.h)
        return params.S0 * np.outer(diff, jump)


def _intrinsic(S: np.ndarray, K: float, kind: Kind) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        if kind is Kind.CALL:
            return np.maximum(S - K, 0.0)
        return np.maximum(K - S, 0.0)


def _expected_value(params: MarketParams, spec: LatticeSpec, kind: Kind, lo: int, probs: np.ndarray) -> float:
    """Discounted ``sum_j sum_l payoff(S(n,j,l)) P_n(j) q(l)`` over levels ``lo..``."""
    pj = terminal_brownian_pmf(spec)
    live = np.nonzero(probs > 0)[0]
    if len(live) == 0:
        return 0.0
    a, b = int(live[0]), int(live[-1])
    levels = np.arange(lo + a, lo + b + 1)
    weights = probs[a : b + 1]
    diff = np.exp((2 * np.arange(spec.n + 1) - spec.n) * spec.dx)
    total = 0.0
    chunk = max(1, 4_000_000 // (spec.n + 1))
    for s in range(0, len(levels), chunk):
        lv = levels[s : s + chunk]
        with np.errstate(over="ignore"):
            S = params.S0 * np.outer(diff, np.exp(lv * spec.h))
        pay = _intrinsic(S, params.K, kind)
        w = weights[s : s + chunk]
        # inf payoff only at levels whose weight underflowed to zero
        pay[:, w == 0] = 0.0
        total += float(pj @ pay @ w)
    return math.exp(-params.r * params.tau) * total


def _forward_nodes(spec: LatticeSpec, kbar: int, lbar: int) -> int:
    i = np.arange(1, spec.n + 1)
    width = np.minimum(spec.nu * i, kbar) + np.minimum(spec.nu * i, lbar) + 1
    return int(width.sum())


def price_european_full(params: MarketParams, spec: LatticeSpec, kind: Kind | str) -> PriceResult:
    """Untruncated expected-value price; ``O(n^2)`` in the jump dimension."""
    kind = Kind(kind)
    t0 = time.perf_counter()
    dist = forward_jump_distribution(spec)
    value = _expected_value(params, spec, kind, dist.lo, dist.probs)
    top = spec.nu * spec.n
    nodes = _forward_nodes(spec, top, top) + (spec.n + 1) * (2 * top + 1)
    return PriceResult(
        value, PriceMethod.EXPECTED_VALUE_FULL, full_bounds(spec), None, nodes, time.perf_counter() - t0
    )


def price_european_type_a(
    params: MarketParams, spec: LatticeSpec, bounds: TruncationBounds, kind: Kind | str
) -> PriceResult:
    """Full jump law, but terminal levels outside ``[-lbar, kbar]`` are dropped."""
    kind = Kind(kind)
    t0 = time.perf_counter()
    dist = forward_jump_distribution(spec)
    a = -bounds.lbar - dist.lo
    b = bounds.kbar - dist.lo
    value = _expected_value(params, spec, kind, -bounds.lbar, dist.probs[a : b + 1])
    top = spec.nu * spec.n
    nodes = _forward_nodes(spec, top, top) + (spec.n + 1) * (bounds.kbar + bounds.lbar + 1)
    return PriceResult(value, PriceMethod.EXPECTED_VALUE_TYPE_A, bounds, None, nodes, time.perf_counter() - t0)


def price_european_truncated(
    params: MarketParams, spec: LatticeSpec, bounds: TruncationBounds, kind: Kind | str
) -> PriceResult:
    """Expected value over jump paths that never leave ``[-lbar, kbar]``.

    Costs ``O(n (kbar + lbar))``, which is ``O(n ln n)`` for levels derived
    from ``epsilon = 1/n``.
    """
    kind = Kind(kind)
    t0 = time.perf_counter()
    dist = within_barrier_distribution(spec, bounds.kbar, bounds.lbar)
    value = _expected_value(params, spec, kind, dist.lo, dist.probs)
    nodes = _forward_nodes(spec, bounds.kbar, bounds.lbar) + (spec.n + 1) * len(dist.probs)
    return PriceResult(
        value, PriceMethod.EXPECTED_VALUE_TRUNCATED, bounds, None, nodes, time.perf_counter() - t0
    )


def _rollback(
    params: MarketParams,
    spec: LatticeSpec,
    kind: Kind,
    american: bool,
    kbar: int,
    lbar: int,
    b: Optional[Union[float, str]],
) -> tuple[float, int]:
    n, nu, p = spec.n, spec.nu, spec.p
    disc = math.exp(-params.r * spec.dt)
    q = spec.q

    def outside(i: int, lo: int, hi: int) -> np.ndarray:
        if b == INTRINSIC:
            return _intrinsic(_underlying(params, spec, i, lo, hi), params.K, kind)
        return np.full((i + 1, hi - lo + 1), float(b))

    lo, hi = max(-nu * n, -lbar), min(nu * n, kbar)
    values = _intrinsic(_underlying(params, spec, n, lo, hi), params.K, kind)
    nodes = values.size
    for i in range(n - 1, -1, -1):
        new_lo, new_hi = max(-nu * i, -lbar), min(nu * i, kbar)
        ext_lo, ext_hi = new_lo - nu, new_hi + nu
        if ext_lo < lo or ext_hi > hi:
            ext = np.empty((i + 2, ext_hi - ext_lo + 1))
            ext[:, lo - ext_lo : hi - ext_lo + 1] = values
            if ext_lo < lo:
                ext[:, : lo - ext_lo] = outside(i + 1, ext_lo, lo - 1)
            if ext_hi > hi:
                ext[:, hi - ext_lo + 1 :] = outside(i + 1, hi + 1, ext_hi)
        else:
            ext = values[:, ext_lo - lo : ext_hi - lo + 1]
        mixed = p * ext[1:] + (1.0 - p) * ext[:-1]
        width = new_hi - new_lo + 1
        cont = np.zeros((i + 1, width))
        for k in range(-nu, nu + 1):
            if q[k + nu] != 0.0:
                cont += q[k + nu] * mixed[:, k + nu : k + nu + width]
        cont *= disc
        if american:
            np.maximum(cont, _intrinsic(_underlying(params, spec, i, new_lo, new_hi), params.K, kind), out=cont)
        values, lo, hi = cont, new_lo, new_hi
        nodes += cont.size
    return float(values[0, -lo]), nodes


def price_backward_full(
    params: MarketParams, spec: LatticeSpec, kind: Kind | str, exercise: Exercise | str = Exercise.EUROPEAN
) -> PriceResult:
    """Untruncated backward induction; ``O(n^3)`` work."""
    kind, exercise = Kind(kind), Exercise(exercise)
    t0 = time.perf_counter()
    top = spec.nu * spec.n
    value, nodes = _rollback(params, spec, kind, exercise is Exercise.AMERICAN, top, top, None)
    return PriceResult(value, PriceMethod.BACKWARD_FULL, full_bounds(spec), None, nodes, time.perf_counter() - t0)


def price_american_full(params: MarketParams, spec: LatticeSpec, kind: Kind | str) -> PriceResult:
    return price_backward_full(params, spec, kind, Exercise.AMERICAN)


def price_backward_boundary(
    params: MarketParams,
    spec: LatticeSpec,
    bounds: TruncationBounds,
    b: Union[float, str],
    exercise: Exercise | str,
    kind: Kind | str,
) -> PriceResult:
    """Backward induction with value ``b`` on every node outside ``[-lbar, kbar]``.

    ``b = 0`` reproduces the killed-path expected value; ``b = K`` is the
    American put scheme.  ``b = "intrinsic"`` uses the immediate-exercise
    value of each outside node instead of a constant.
    """
    if b != INTRINSIC and not float(b) >= 0:
        raise ValueError("boundary value b must be >= 0")
    kind, exercise = Kind(kind), Exercise(exercise)
    t0 = time.perf_counter()
    value, nodes = _rollback(
        params, spec, kind, exercise is Exercise.AMERICAN, bounds.kbar, bounds.lbar, b
    )
    return PriceResult(value, PriceMethod.BACKWARD_BOUNDARY, bounds, b, nodes, time.perf_counter() - t0)


def price_american_put_truncated(
    params: MarketParams,
    spec: LatticeSpec,
    epsilon: Optional[float] = None,
    bounds: Optional[TruncationBounds] = None,
) -> PriceResult:
    """American put on the cut lattice with value ``K`` outside the barriers.

    Levels default to the closed-form American-put level for ``epsilon``
    (``1/n`` when omitted); pass ``bounds`` to use e.g. numerical levels.
    """
    t0 = time.perf_counter()
    if bounds is None:
        eps = 1.0 / spec.n if epsilon is None else epsilon
        bounds = theoretical_bounds_american_put(spec, truncation_constants(spec), params, eps)
    res = price_backward_boundary(params, spec, bounds, params.K, Exercise.AMERICAN, Kind.PUT)
    return PriceResult(
        res.value, res.method, bounds, params.K, res.nodes_visited, time.perf_counter() - t0
    )


def price_american_call_truncated(
    params: MarketParams,
    spec: LatticeSpec,
    epsilon: Optional[float] = None,
    bounds: Optional[TruncationBounds] = None,
) -> PriceResult:
    """American call on the cut lattice (heuristic, no error guarantee).

    Nodes outside the barriers take their intrinsic value; barriers come from
    the European-call numerical search unless given.
    """
    t0 = time.perf_counter()
    if bounds is None:
        eps = 1.0 / spec.n if epsilon is None else epsilon
        bounds = numerical_bounds(spec, enlarged_jump_distribution(spec), params, eps, Kind.CALL)
    res = price_backward_boundary(params, spec, bounds, INTRINSIC, Exercise.AMERICAN, Kind.CALL)
    return PriceResult(
        res.value, res.method, bounds, INTRINSIC, res.nodes_visited, time.perf_counter() - t0
    )


def boundary_value_by_paths(
    params: MarketParams, spec: LatticeSpec, bounds: TruncationBounds, b: float, kind: Kind | str
) -> float:
    """Killed-path value plus ``b`` discounted from each path's first barrier exit.

    Equals the European boundary-backward price with constant ``b``.
    """
    vtt = price_european_truncated(params, spec, bounds, kind).value
    exits = first_exit_probabilities(spec, bounds.kbar, bounds.lbar)
    steps = np.arange(1, spec.n + 1)
    return vtt + b * float(np.sum(exits * np.exp(-params.r * spec.dt * steps)))
