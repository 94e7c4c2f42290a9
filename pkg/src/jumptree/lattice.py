"""Bivariate diffusion/jump lattice and its terminal distributions.

Each time step moves the log-price by ``+-sigma*sqrt(dt)`` (diffusion) and by
``l*h`` for ``l in -nu..nu`` (jumps).  Jump probabilities are chosen so the
first ``2*nu`` moments of the one-step jump match the compound-Poisson
cumulants of the continuous model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .model import JumpMoments, MarketParams, jump_moments

__all__ = [
    "LatticeError",
    "InvalidProbabilityError",
    "DegenerateJumpError",
    "NegativeProbabilityError",
    "LatticeSpec",
    "DistKind",
    "JumpDistribution",
    "build_lattice",
    "solve_jump_probs",
    "forward_jump_distribution",
    "enlarged_jump_distribution",
    "within_barrier_distribution",
    "terminal_brownian_pmf",
]

MAX_NU = 8
NEG_TOL = 1e-12


class LatticeError(ValueError):
    """Parameters fall outside the region where the lattice is well defined."""


class InvalidProbabilityError(LatticeError):
    pass


class DegenerateJumpError(LatticeError):
    pass


class NegativeProbabilityError(LatticeError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    n: int
    nu: int
    c: float
    h: float
    dt: float
    alpha: float
    p: float
    sigma: float
    q: np.ndarray  # q[l + nu] is the one-step probability of a jump of l*h
    c_consts: np.ndarray  # c_consts[l + nu] = n * q_l, zero at l = 0
    w_consts: np.ndarray  # w_consts[i - 1] = max(c_i, c_-i), i = 1..nu

    @property
    def levels(self) -> int:
        """Number of terminal jump levels, ``2*nu*n + 1``."""
        return 2 * self.nu * self.n + 1

    @property
    def dx(self) -> float:
        return self.sigma * math.sqrt(self.dt)

    def q_of(self, l: int) -> float:
        return float(self.q[l + self.nu])


def solve_jump_probs(moments: JumpMoments, h: float, nu: int) -> np.ndarray:
    """One-step jump probabilities ``q_-nu..q_nu`` by moment matching.

    Solves ``sum_l l^i q_l = kappa_i / h^i`` for ``i = 0..2nu`` with
    ``kappa_0 = 1``.
    """
    if not h > 0:
        raise DegenerateJumpError("jump step h must be > 0")
    if not 1 <= nu <= MAX_NU:
        raise ValueError(f"nu must be in [1, {MAX_NU}]")
    cum = moments.cumulants
    if len(cum) < 2 * nu:
        raise ValueError(f"need {2 * nu} cumulants, got {len(cum)}")
    nodes = np.arange(-nu, nu + 1, dtype=float)
    powers = np.arange(2 * nu + 1)
    A = nodes[None, :] ** powers[:, None]
    b = np.empty(2 * nu + 1)
    b[0] = 1.0
    for i in range(1, 2 * nu + 1):
        b[i] = cum[i - 1] / h**i
    try:
        q = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - Vandermonde on distinct nodes
        raise LatticeError("singular moment-matching system") from exc
    if np.any(q < -NEG_TOL):
        raise NegativeProbabilityError(
            f"moment matching gives negative jump probabilities (min {q.min():.3e}); "
            "try a larger n or a different c"
        )
    if np.any(q < 0):
        q = np.clip(q, 0.0, None)
        q /= q.sum()
    return q


def build_lattice(params: MarketParams, n: int, nu: int = 3, c: float = 1.0) -> LatticeSpec:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 1 <= nu <= MAX_NU:
        raise ValueError(f"nu must be in [1, {MAX_NU}]")
    if not 0 < c <= 1:
        raise ValueError("c must be in (0, 1]")
    dt = params.tau / n
    alpha = params.alpha
    drift_ratio = alpha * math.sqrt(dt) / params.sigma
    if abs(drift_ratio) > 1:
        raise InvalidProbabilityError(
            f"|alpha*sqrt(dt)/sigma| = {abs(drift_ratio):.4g} > 1; increase n"
        )
    p = 0.5 * (1.0 + drift_ratio)

    spread = math.hypot(params.gamma_prime, params.delta)
    if params.lambda_ == 0.0:
        h = c * spread if spread > 0 else 1.0
        q = np.zeros(2 * nu + 1)
        q[nu] = 1.0
    else:
        if spread == 0.0:
            raise DegenerateJumpError("gamma_prime = delta = 0 with lambda > 0")
        h = c * spread
        q = solve_jump_probs(jump_moments(params, dt, 2 * nu), h, nu)

    c_consts = n * q
    c_consts[nu] = 0.0
    w_consts = np.maximum(c_consts[nu + 1 :], c_consts[nu - 1 :: -1])
    return LatticeSpec(
        n=n,
        nu=nu,
        c=c,
        h=h,
        dt=dt,
        alpha=alpha,
        p=p,
        sigma=params.sigma,
        q=q,
        c_consts=c_consts,
        w_consts=w_consts,
    )


class DistKind(str, Enum):
    FULL = "full"
    ENLARGED = "enlarged"
    WITHIN_BARRIER = "within_barrier"


@dataclass(frozen=True)
class JumpDistribution:
    """Terminal jump-level probabilities; ``probs[i]`` belongs to level ``lo + i``."""

    kind: DistKind
    lo: int
    hi: int
    probs: np.ndarray
    bounds: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.probs.shape != (self.hi - self.lo + 1,):
            raise ValueError("probs length does not match level range")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, l: int) -> float:
        if l < self.lo or l > self.hi:
            return 0.0
        return float(self.probs[l - self.lo])

    def tail(self, start: int) -> float:
        """``sum_{k >= start} prob(k)``."""
        i = max(start, self.lo) - self.lo
        return float(self.probs[i:].sum()) if i < len(self.probs) else 0.0


def _convolve_forward(step: np.ndarray, n: int, lo_cut: Optional[int] = None, hi_cut: Optional[int] = None):
    """n-fold convolution of the one-step law, optionally killing mass outside [lo_cut, hi_cut].

    Returns ``(lo, probs, exits)`` where ``exits[i-1]`` is the mass removed at
    step ``i``.
    """
    nu = (len(step) - 1) // 2
    dist = np.ones(1)
    lo = 0
    exits = np.zeros(n)
    for i in range(1, n + 1):
        dist = np.convolve(dist, step)
        lo -= nu
        if lo_cut is not None:
            hi = lo + len(dist) - 1
            a = max(lo, lo_cut)
            b = min(hi, hi_cut)
            kept = dist[a - lo : b - lo + 1]
            exits[i - 1] = dist.sum() - kept.sum()
            dist = kept.copy()
            lo = a
    return lo, dist, exits


def forward_jump_distribution(spec: LatticeSpec) -> JumpDistribution:
    lo, probs, _ = _convolve_forward(spec.q, spec.n)
    return JumpDistribution(DistKind.FULL, lo, lo + len(probs) - 1, probs)


def enlarged_step(spec: LatticeSpec) -> np.ndarray:
    """One-step law with ``q_{+i}`` and ``q_{-i}`` both replaced by their maximum."""
    nu = spec.nu
    half = np.maximum(spec.q[nu + 1 :], spec.q[nu - 1 :: -1])
    return np.concatenate([half[::-1], [spec.q[nu]], half])


def enlarged_jump_distribution(spec: LatticeSpec) -> JumpDistribution:
    lo, probs, _ = _convolve_forward(enlarged_step(spec), spec.n)
    # symmetric by construction; enforce it bitwise
    probs = 0.5 * (probs + probs[::-1])
    return JumpDistribution(DistKind.ENLARGED, lo, lo + len(probs) - 1, probs)


def within_barrier_distribution(spec: LatticeSpec, kbar: int, lbar: int) -> JumpDistribution:
    """Probability of each terminal level for paths that never leave ``[-lbar, kbar]``."""
    dist, _ = _within_barrier(spec, kbar, lbar)
    return dist


def _within_barrier(spec: LatticeSpec, kbar: int, lbar: int):
    if kbar <= 0 or lbar <= 0:
        raise ValueError("barrier levels must be positive")
    top = spec.nu * spec.n
    kbar, lbar = min(kbar, top), min(lbar, top)
    lo, probs, exits = _convolve_forward(spec.q, spec.n, -lbar, kbar)
    dist = JumpDistribution(DistKind.WITHIN_BARRIER, lo, lo + len(probs) - 1, probs, (kbar, lbar))
    return dist, exits


def first_exit_probabilities(spec: LatticeSpec, kbar: int, lbar: int) -> np.ndarray:
    """Mass of jump paths whose first exit from ``[-lbar, kbar]`` happens at step ``i`` (index ``i-1``)."""
    return _within_barrier(spec, kbar, lbar)[1]


def terminal_brownian_pmf(spec: LatticeSpec) -> np.ndarray:
    """Binomial(n, p) pmf of the number of up-moves of the diffusion."""
    n, p = spec.n, spec.p
    j = np.arange(n + 1)
    if p <= 0.0 or p >= 1.0:
        out = np.zeros(n + 1)
        out[n if p >= 1.0 else 0] = 1.0
        return out
    logc = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
    return np.exp(logc + j * math.log(p) + (n - j) * math.log1p(-p))
