"""Market inputs, lognormal-jump moments and closed-form benchmark prices.

The jump size ``J`` satisfies ``ln(1 + J) ~ N(gamma_prime, delta**2)`` and
arrivals follow a Poisson process of intensity ``lambda_``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import poisson

__all__ = [
    "Kind",
    "Exercise",
    "MarketParams",
    "OptionSpec",
    "JumpMoments",
    "normal_raw_moments",
    "compound_poisson_cumulants",
    "jump_moments",
    "mean_jump",
    "payoff",
    "black_scholes_price",
    "merton_series_price",
]

MAX_MOMENT_ORDER = 16


class Kind(str, Enum):
    CALL = "call"
    PUT = "put"


class Exercise(str, Enum):
    EUROPEAN = "european"
    AMERICAN = "american"


@dataclass(frozen=True)
class MarketParams:
    """Contract and model inputs.

    ``sigma`` and ``delta`` are standard deviations; use
    :meth:`from_variances` when quoting ``sigma**2`` and ``delta**2``.
    """

    S0: float
    K: float
    r: float
    sigma: float
    tau: float
    d: float = 0.0
    lambda_: float = 0.0
    gamma_prime: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        checks = (
            ("S0 > 0", self.S0 > 0),
            ("K > 0", self.K > 0),
            ("sigma > 0", self.sigma > 0),
            ("tau > 0", self.tau > 0),
            ("d >= 0", self.d >= 0),
            ("lambda >= 0", self.lambda_ >= 0),
            ("delta >= 0", self.delta >= 0),
        )
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid market parameters: {name} violated")
        for field in ("S0", "K", "r", "sigma", "tau", "d", "lambda_", "gamma_prime", "delta"):
            if not math.isfinite(getattr(self, field)):
                raise ValueError(f"invalid market parameters: {field} is not finite")

    @classmethod
    def from_variances(
        cls,
        S0: float,
        K: float,
        r: float,
        sigma2: float,
        tau: float,
        d: float = 0.0,
        lambda_: float = 0.0,
        gamma_prime: float = 0.0,
        delta2: float = 0.0,
    ) -> "MarketParams":
        if sigma2 < 0 or delta2 < 0:
            raise ValueError("invalid market parameters: variances must be >= 0")
        return cls(
            S0=S0,
            K=K,
            r=r,
            sigma=math.sqrt(sigma2),
            tau=tau,
            d=d,
            lambda_=lambda_,
            gamma_prime=gamma_prime,
            delta=math.sqrt(delta2),
        )

    def with_(self, **changes) -> "MarketParams":
        return replace(self, **changes)

    @property
    def j_bar(self) -> float:
        return mean_jump(self.gamma_prime, self.delta)

    @property
    def alpha(self) -> float:
        """Drift of the log-diffusion component, r - d - lambda*j_bar - sigma^2/2."""
        return self.r - self.d - self.lambda_ * self.j_bar - 0.5 * self.sigma**2


@dataclass(frozen=True)
class OptionSpec:
    kind: Kind = Kind.PUT
    exercise: Exercise = Exercise.EUROPEAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "exercise", Exercise(self.exercise))


@dataclass(frozen=True)
class JumpMoments:
    """Raw moments of ``ln(1+J)`` and the per-step compound-Poisson cumulants."""

    raw_moments: tuple[float, ...]
    cumulants: tuple[float, ...]
    j_bar: float


def normal_raw_moments(gamma_prime: float, delta: float, order: int) -> tuple[float, ...]:
    """Raw moments ``E[X^i]``, ``i = 1..order``, of ``X ~ N(gamma_prime, delta^2)``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > MAX_MOMENT_ORDER:
        raise ValueError(f"order must be <= {MAX_MOMENT_ORDER}")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    var = delta * delta
    m = [1.0, float(gamma_prime)]
    for i in range(2, order + 1):
        m.append(gamma_prime * m[i - 1] + (i - 1) * var * m[i - 2])
    return tuple(m[1 : order + 1])


def compound_poisson_cumulants(lambda_: float, dt: float, moments: Sequence[float]) -> tuple[float, ...]:
    """Cumulants of a compound Poisson increment over ``dt``: ``lambda*dt*E[X^i]``."""
    scale = lambda_ * dt
    return tuple(scale * m for m in moments)


def jump_moments(params: MarketParams, dt: float, order: int) -> JumpMoments:
    raw = normal_raw_moments(params.gamma_prime, params.delta, order)
    return JumpMoments(
        raw_moments=raw,
        cumulants=compound_poisson_cumulants(params.lambda_, dt, raw),
        j_bar=params.j_bar,
    )


def mean_jump(gamma_prime: float, delta: float) -> float:
    """``E(J) = exp(gamma' + delta^2/2) - 1``."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return math.expm1(gamma_prime + 0.5 * delta * delta)


def payoff(S, K: float, kind: Kind | str):
    """Intrinsic value, vectorised over ``S``."""
    if Kind(kind) is Kind.CALL:
        return np.maximum(S - K, 0.0)
    return np.maximum(K - S, 0.0)


def _bs(S0: float, K: float, r: float, d: float, sigma: float, tau: float, kind: Kind) -> float:
    vol = sigma * math.sqrt(tau)
    fwd_disc = S0 * math.exp(-d * tau)
    k_disc = K * math.exp(-r * tau)
    if vol == 0.0:
        intrinsic = fwd_disc - k_disc if kind is Kind.CALL else k_disc - fwd_disc
        return max(intrinsic, 0.0)
    d1 = (math.log(S0 / K) + (r - d + 0.5 * sigma * sigma) * tau) / vol
    d2 = d1 - vol
    if kind is Kind.CALL:
        return float(fwd_disc * ndtr(d1) - k_disc * ndtr(d2))
    return float(k_disc * ndtr(-d2) - fwd_disc * ndtr(-d1))


def black_scholes_price(params: MarketParams, kind: Kind | str) -> float:
    """Black-Scholes price with continuous dividend yield; jump inputs are ignored."""
    return _bs(params.S0, params.K, params.r, params.d, params.sigma, params.tau, Kind(kind))


def merton_series_price(
    params: MarketParams, kind: Kind | str, tol: float = 1e-10, max_terms: Optional[int] = None
) -> float:
    """European price from Merton's lognormal-jump series.

    Conditional on ``k`` jumps the price is Black-Scholes with volatility
    ``sqrt(sigma^2 + k delta^2 / tau)`` and rate
    ``r - lambda j_bar + k ln(1 + j_bar) / tau``, weighted by a Poisson law of
    mean ``lambda (1 + j_bar) tau``.

    Summation stops once the remaining terms are provably below ``tol``, or
    after ``max_terms`` terms when given (a hard cut, not an accuracy target).
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if max_terms is not None and max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    kind = Kind(kind)
    lam, tau = params.lambda_, params.tau
    if lam == 0.0:
        return black_scholes_price(params, kind)

    j_bar = params.j_bar
    lam_p = lam * (1.0 + j_bar)
    log1j = math.log1p(j_bar)
    mean_p = lam_p * tau
    mean = lam * tau
    # Each term is bounded by S0 e^{-d tau} (call) or K e^{-r tau} times a
    # Poisson(lambda tau) weight (put), so both tails together bound the rest.
    scale = max(params.S0, params.K) * max(1.0, math.exp(-params.r * tau), math.exp(-params.d * tau))

    total = 0.0
    log_w = -mean_p
    k = 0
    while True:
        w = math.exp(log_w)
        sig_k = math.sqrt(params.sigma**2 + k * params.delta**2 / tau)
        r_k = params.r - lam * j_bar + k * log1j / tau
        total += w * _bs(params.S0, params.K, r_k, params.d, sig_k, tau, kind)
        tail = poisson.sf(k, mean_p) + poisson.sf(k, mean)
        if k >= mean_p and tail * scale < tol:
            break
        if max_terms is not None and k + 1 >= max_terms:
            break
        k += 1
        log_w += math.log(mean_p) - math.log(k)
    return total
