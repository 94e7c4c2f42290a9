"""Barrier levels for cutting the jump dimension of the lattice.

Two families are provided:

* closed-form levels that guarantee a truncation error below ``epsilon``
  (general ``nu`` and the sharper ``nu = 1`` variants);
* a numerical scan of tail sums of the enlarged jump distribution, which
  gives much tighter levels at ``O(n^2)`` cost.

All levels are clamped into ``[1, nu*n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .lattice import DistKind, JumpDistribution, LatticeSpec
from .model import Kind, MarketParams

__all__ = [
    "BoundMethod",
    "TruncationConstants",
    "TruncationBounds",
    "truncation_constants",
    "theoretical_bounds_call",
    "theoretical_bounds_put",
    "theoretical_bounds_american_put",
    "numerical_bounds",
    "full_bounds",
]


class BoundMethod(str, Enum):
    THEORETICAL_CALL = "theoretical_call"
    THEORETICAL_PUT = "theoretical_put"
    THEORETICAL_AMERICAN_PUT = "theoretical_american_put"
    NUMERICAL_CALL = "numerical_call"
    NUMERICAL_PUT = "numerical_put"
    FULL = "full"


@dataclass(frozen=True)
class TruncationConstants:
    W: tuple[float, ...]
    M: tuple[float, ...]
    G: float
    k_plus: float
    k_minus: float
    w_nu1: float


@dataclass(frozen=True)
class TruncationBounds:
    kbar: int
    lbar: int
    epsilon: Optional[float]
    method: BoundMethod
    eta: Optional[float] = None
    # unclamped formula values, useful when checking growth rates
    raw: tuple[float, float] = field(default=(math.nan, math.nan), compare=False)
    # nu = 1 closed forms, kept for cross-checks
    alt: Optional[tuple[int, int]] = field(default=None, compare=False)


def _clamp(value: float, top: int) -> int:
    return int(min(max(value, 1), top))


def truncation_constants(spec: LatticeSpec) -> TruncationConstants:
    nu, h = spec.nu, spec.h
    w = [float(x) for x in spec.w_consts]
    W = [w[0]]
    for i in range(1, nu):
        W.append(w[i] + W[i - 1] ** ((i + 1) / i))
    M = []
    for i, Wi in enumerate(W, start=1):
        if Wi == 0.0:
            M.append(math.inf if i > 1 else 1.0)
        else:
            M.append(max(Wi, Wi ** ((1 - i) / i)))
    Wn = W[-1]
    prod = math.prod(m * m for m in M[:-1])
    G = 2 * nu * max(Wn, 1.0) * math.exp(Wn) * prod
    up = sum(math.exp(h * r) for r in range(nu))
    down = sum(math.exp(-h * r) for r in range(nu))
    scale = nu * max(Wn * Wn, 1.0)
    k_plus = up + scale * math.exp(2 * h * nu) * down
    k_minus = down + scale * up
    return TruncationConstants(tuple(W), tuple(M), G, k_plus, k_minus, w[0])


def _check_eps(epsilon: float) -> None:
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError("epsilon must be a positive finite number")


def _log(x: float, what: str) -> float:
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"cannot take log of {what} = {x!r}")
    return math.log(x)


def _no_jumps(spec: LatticeSpec) -> bool:
    return not np.any(spec.w_consts > 0)


def full_bounds(spec: LatticeSpec) -> TruncationBounds:
    top = spec.nu * spec.n
    return TruncationBounds(top, top, None, BoundMethod.FULL)


def theoretical_bounds_call(
    spec: LatticeSpec, consts: TruncationConstants, params: MarketParams, epsilon: float
) -> TruncationBounds:
    """Closed-form levels for a European call.

    For ``nu = 1`` the sharper single-jump formulas are evaluated as well and
    the pair with fewer retained levels is returned; the other is kept in
    ``alt``.
    """
    _check_eps(epsilon)
    nu, h, top = spec.nu, spec.h, spec.nu * spec.n
    if _no_jumps(spec):
        return TruncationBounds(1, 1, epsilon, BoundMethod.THEORETICAL_CALL)
    Wn = consts.W[-1]
    common = -math.log(epsilon) + _log(4 * params.S0 * consts.G, "4 S0 G") + (spec.alpha - params.r) * params.tau
    floor_k = nu * math.ceil(2 * math.exp(h * nu) * Wn - 1) - 1
    k_raw = max(
        nu * math.ceil(math.exp(h * nu + 1) * Wn + common + _log(consts.k_plus, "k_plus")) - 1,
        floor_k,
    )
    l_raw = max(
        nu * math.ceil(math.exp(-h * nu + 1) * Wn + common + _log(consts.k_minus, "k_minus")) - 1,
        floor_k,
    )
    general = (_clamp(k_raw, top), _clamp(l_raw, top))
    if nu != 1:
        return TruncationBounds(*general, epsilon, BoundMethod.THEORETICAL_CALL, raw=(k_raw, l_raw))

    w = consts.w_nu1
    c = w + (spec.alpha - params.r) * params.tau - 1 + _log(4 * params.S0, "4 S0")
    l1 = max(
        -math.log(epsilon) + w * math.exp(1 - h) + math.log(2 + math.exp(h) * w) + c,
        2 * w - 2,
        2 * math.exp(h) * w - 3,
    )
    k1 = max(
        -math.log(epsilon) + w * math.exp(1 + h) + math.log(2 + math.exp(-h) * w) + c,
        2 * math.exp(h) * w - 2,
    )
    special = (_clamp(math.ceil(k1), top), _clamp(math.ceil(l1), top))
    best, other = (special, general) if sum(special) <= sum(general) else (general, special)
    return TruncationBounds(*best, epsilon, BoundMethod.THEORETICAL_CALL, raw=(k_raw, l_raw), alt=other)


def _put_level(spec: LatticeSpec, consts: TruncationConstants, params: MarketParams, epsilon: float, rate_term: float):
    nu = spec.nu
    Wn = consts.W[-1]
    floor_k = nu * math.ceil(2 * Wn - 1) - 1
    main = (
        nu
        * math.ceil(
            Wn * math.e
            - math.log(epsilon)
            - rate_term
            + _log(4 * nu * (nu + 1) * params.K * consts.G, "4 nu (nu+1) K G")
        )
        - 1
    )
    return max(main, floor_k)


def theoretical_bounds_put(
    spec: LatticeSpec, consts: TruncationConstants, params: MarketParams, epsilon: float
) -> TruncationBounds:
    """Closed-form symmetric level ``kbar = lbar`` for a European put."""
    _check_eps(epsilon)
    top = spec.nu * spec.n
    if _no_jumps(spec):
        return TruncationBounds(1, 1, epsilon, BoundMethod.THEORETICAL_PUT)
    raw = _put_level(spec, consts, params, epsilon, params.r * params.tau)
    general = _clamp(raw, top)
    if spec.nu != 1:
        return TruncationBounds(general, general, epsilon, BoundMethod.THEORETICAL_PUT, raw=(raw, raw))
    w = consts.w_nu1
    c = w * (math.e + 1) - params.r * params.tau - 1 + _log(4 * params.K, "4 K") + math.log(2 + w)
    special = _clamp(math.ceil(max(-math.log(epsilon) + c, 2 * w - 2)), top)
    best, other = (special, general) if special <= general else (general, special)
    return TruncationBounds(best, best, epsilon, BoundMethod.THEORETICAL_PUT, raw=(raw, raw), alt=(other, other))


def theoretical_bounds_american_put(
    spec: LatticeSpec, consts: TruncationConstants, params: MarketParams, epsilon: float
) -> TruncationBounds:
    """Level for the American put; same as the European put without the ``-r*tau`` term."""
    _check_eps(epsilon)
    top = spec.nu * spec.n
    if _no_jumps(spec):
        return TruncationBounds(1, 1, epsilon, BoundMethod.THEORETICAL_AMERICAN_PUT)
    raw = _put_level(spec, consts, params, epsilon, 0.0)
    level = _clamp(raw, top)
    return TruncationBounds(level, level, epsilon, BoundMethod.THEORETICAL_AMERICAN_PUT, raw=(raw, raw))


def _scan(tail: np.ndarray, threshold: float, top: int) -> int:
    """Largest ``i`` (scanning down from ``top``) with ``tail[i] >= threshold``; 0 if none.

    ``tail[i]`` holds the sum over levels ``>= i`` for ``i = 0..top``.
    """
    hits = np.nonzero(tail >= threshold)[0]
    return int(hits[-1]) if len(hits) else 0


def numerical_bounds(
    spec: LatticeSpec,
    qtilde: JumpDistribution,
    params: MarketParams,
    epsilon: float,
    kind: Kind | str,
) -> TruncationBounds:
    """Barrier levels from tail sums of the enlarged distribution.

    Descending from the top level, the first index whose tail sum reaches the
    threshold becomes the barrier, so every level strictly beyond it carries
    tail mass below the threshold.
    """
    _check_eps(epsilon)
    if qtilde.kind is not DistKind.ENLARGED:
        raise ValueError("numerical bounds need the enlarged distribution")
    kind = Kind(kind)
    nu, h, top = spec.nu, spec.h, spec.nu * spec.n
    # nonnegative levels 0..top
    probs = qtilde.probs[-qtilde.lo :]
    tail = np.cumsum(probs[::-1])[::-1]

    if kind is Kind.CALL:
        eta = epsilon / (2 * math.exp((spec.alpha - params.r) * params.tau) * params.S0)
        with np.errstate(divide="ignore"):
            weighted = (nu + 1) * np.exp(h * np.arange(top + 1) + np.log(probs))
        tail_e = np.cumsum(weighted[::-1])[::-1]
        kbar = _scan(tail_e, eta, top)
        lbar = _scan(tail, eta / (nu * math.exp(h * kbar) + 1), top)
        method = BoundMethod.NUMERICAL_CALL
    else:
        eta = epsilon / (2 * math.exp(-params.r * params.tau) * params.K * (nu + 1))
        kbar = lbar = _scan(tail, eta, top)
        method = BoundMethod.NUMERICAL_PUT
    return TruncationBounds(
        _clamp(kbar, top), _clamp(lbar, top), epsilon, method, eta=eta, raw=(kbar, lbar)
    )
