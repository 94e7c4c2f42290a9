"""Brute-force reference values by enumerating every lattice path.

Only meant for tiny trees (``n <= 8``, ``nu <= 3``).  Deliberately written
with plain Python loops and ``math`` so it shares no code path with the
vectorised engine.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .lattice import LatticeSpec
from .model import Exercise, Kind, MarketParams
from .truncation import TruncationBounds

MAX_STEPS = 8
MAX_NU = 3
MAX_PATHS = 3_000_000


@dataclass
class OracleResult:
    price: float
    q_full: dict[int, float]
    q_within: dict[int, float]
    # crossing[k]: mass ending at k after some level > kbar (above) / < -lbar (below)
    crossed_above: dict[int, float]
    crossed_below: dict[int, float]


def _check_size(spec: LatticeSpec) -> None:
    if spec.n > MAX_STEPS or spec.nu > MAX_NU:
        raise ValueError(f"path enumeration limited to n <= {MAX_STEPS}, nu <= {MAX_NU}")
    if (2 * spec.nu + 1) ** spec.n * 2**spec.n > MAX_PATHS:
        raise ValueError("too many paths to enumerate")


def _payoff(S: float, K: float, kind: Kind) -> float:
    return max(S - K, 0.0) if kind is Kind.CALL else max(K - S, 0.0)


def enumerate_jump_paths(spec: LatticeSpec, kbar: Optional[int] = None, lbar: Optional[int] = None):
    """Yield ``(end_level, probability, first_exit_step, went_above, went_below)`` per jump path."""
    nu = spec.nu
    steps = range(-nu, nu + 1)
    qs = [float(x) for x in spec.q]
    for path in itertools.product(steps, repeat=spec.n):
        prob = 1.0
        level = 0
        exit_step = None
        above = below = False
        for i, s in enumerate(path, start=1):
            prob *= qs[s + nu]
            level += s
            if kbar is not None and level > kbar:
                above = True
                exit_step = exit_step or i
            if lbar is not None and level < -lbar:
                below = True
                exit_step = exit_step or i
        yield level, prob, exit_step, above, below


def enumerate_paths_oracle(
    params: MarketParams,
    spec: LatticeSpec,
    bounds: Optional[TruncationBounds] = None,
    kind: Kind | str = Kind.PUT,
    exercise: Exercise | str = Exercise.EUROPEAN,
    b: float = 0.0,
) -> OracleResult:
    """Exact lattice price and jump-level distributions by listing all paths.

    Without ``bounds`` the price is the untruncated one.  With ``bounds`` a
    path that leaves ``[-lbar, kbar]`` is worth ``b`` (discounted from its
    first exit), so ``b = 0`` gives the killed-path price.  American prices
    are computed by exhaustive recursion over the branching tree.
    """
    _check_size(spec)
    kind, exercise = Kind(kind), Exercise(exercise)
    kbar = bounds.kbar if bounds else None
    lbar = bounds.lbar if bounds else None

    q_full: dict[int, float] = defaultdict(float)
    q_within: dict[int, float] = defaultdict(float)
    up: dict[int, float] = defaultdict(float)
    down: dict[int, float] = defaultdict(float)
    jump_paths = []
    for level, prob, exit_step, above, below in enumerate_jump_paths(spec, kbar, lbar):
        q_full[level] += prob
        if exit_step is None:
            q_within[level] += prob
        if above:
            up[level] += prob
        if below:
            down[level] += prob
        jump_paths.append((level, prob, exit_step))

    if exercise is Exercise.AMERICAN:
        price = _american_recursive(params, spec, kind, kbar, lbar, b)
    else:
        price = _european_paths(params, spec, kind, jump_paths, b)
    return OracleResult(price, dict(q_full), dict(q_within), dict(up), dict(down))


def _european_paths(params, spec, kind, jump_paths, b) -> float:
    n, p = spec.n, spec.p
    dx = params.sigma * math.sqrt(spec.dt)
    disc_step = math.exp(-params.r * spec.dt)
    total = 0.0
    for moves in itertools.product((0, 1), repeat=n):
        ups = sum(moves)
        pd = 1.0
        for m in moves:
            pd *= p if m else (1.0 - p)
        for level, pj, exit_step in jump_paths:
            if exit_step is None:
                S = params.S0 * math.exp((2 * ups - n) * dx + level * spec.h)
                total += pd * pj * _payoff(S, params.K, kind) * disc_step**n
            else:
                total += pd * pj * b * disc_step**exit_step
    return total


def _american_recursive(params, spec, kind, kbar, lbar, b) -> float:
    n, nu, p = spec.n, spec.nu, spec.p
    dx = params.sigma * math.sqrt(spec.dt)
    disc = math.exp(-params.r * spec.dt)
    qs = [float(x) for x in spec.q]

    def outside(level: int) -> bool:
        return (kbar is not None and level > kbar) or (lbar is not None and level < -lbar)

    def value(i: int, j: int, level: int) -> float:
        if outside(level):
            return b
        S = params.S0 * math.exp((2 * j - i) * dx + level * spec.h)
        exercise_now = _payoff(S, params.K, kind)
        if i == n:
            return exercise_now
        cont = 0.0
        for k in range(-nu, nu + 1):
            cont += qs[k + nu] * (p * value(i + 1, j + 1, level + k) + (1 - p) * value(i + 1, j, level + k))
        return max(disc * cont, exercise_now)

    return value(0, 0, 0)
