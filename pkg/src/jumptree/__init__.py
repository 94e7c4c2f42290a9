"""Truncated lattice pricing of European and American options under Merton jump-diffusion."""

from .engine import (
    PriceMethod,
    PriceResult,
    boundary_value_by_paths,
    price_american_call_truncated,
    price_american_full,
    price_american_put_truncated,
    price_backward_boundary,
    price_backward_full,
    price_european_full,
    price_european_truncated,
    price_european_type_a,
)
from .lattice import (
    JumpDistribution,
    LatticeError,
    LatticeSpec,
    build_lattice,
    enlarged_jump_distribution,
    first_exit_probabilities,
    forward_jump_distribution,
    solve_jump_probs,
    within_barrier_distribution,
)
from .model import (
    Exercise,
    Kind,
    MarketParams,
    OptionSpec,
    black_scholes_price,
    jump_moments,
    merton_series_price,
    payoff,
)
from .truncation import (
    BoundMethod,
    TruncationBounds,
    TruncationConstants,
    full_bounds,
    numerical_bounds,
    theoretical_bounds_american_put,
    theoretical_bounds_call,
    theoretical_bounds_put,
    truncation_constants,
)

__version__ = "0.1.0"
