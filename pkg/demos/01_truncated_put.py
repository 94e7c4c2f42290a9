"""Price the at-the-money put of Table 1 Panel A three ways.

The truncated lattice keeps only the jump levels that matter for a target
error of 1/n, which is why it runs in a fraction of the full lattice's time.
"""
from jumptree import (
    MarketParams,
    build_lattice,
    enlarged_jump_distribution,
    merton_series_price,
    numerical_bounds,
    price_european_full,
    price_european_truncated,
)

# E[J] = 0, so the log-jump mean is -delta^2 / 2
params = MarketParams.from_variances(40.0, 40.0, 0.08, 0.05, 1.0, lambda_=5.0, gamma_prime=-0.025, delta2=0.05)

for n in (200, 400, 800):
    spec = build_lattice(params, n, nu=3)
    bounds = numerical_bounds(spec, enlarged_jump_distribution(spec), params, 1.0 / n, "put")
    full = price_european_full(params, spec, "put")
    cut = price_european_truncated(params, spec, bounds, "put")
    print(f"n={n:4d}  full {full.value:.4f} ({full.nodes_visited:>9d} nodes)"
          f"  cut {cut.value:.4f} ({cut.nodes_visited:>7d} nodes, kbar={bounds.kbar})")

print(f"series  {merton_series_price(params, 'put'):.4f}")
