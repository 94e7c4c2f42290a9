"""American options on the truncated lattice.

Puts use the strike as the value beyond the barriers, which bounds the true
price from above.  Calls use the intrinsic value there; that choice has no
error guarantee but matches the full lattice closely in practice.
"""
from jumptree import (
    MarketParams,
    build_lattice,
    price_american_call_truncated,
    price_american_full,
    price_american_put_truncated,
)

put = MarketParams.from_variances(40.0, 40.0, 0.08, 0.05, 1.0, lambda_=5.0, gamma_prime=-0.025, delta2=0.05)
spec = build_lattice(put, 100, nu=3)
full = price_american_full(put, spec, "put")
cut = price_american_put_truncated(put, spec)
print(f"American put  full {full.value:.4f}  cut {cut.value:.4f}  levels {cut.bounds.kbar}")

for S0 in (80.0, 100.0, 120.0):
    call = MarketParams.from_variances(S0, 100.0, 0.08, 0.16, 0.5, d=0.03, lambda_=1.0, gamma_prime=-0.025, delta2=0.05)
    spec = build_lattice(call, 150, nu=3)
    full = price_american_full(call, spec, "call")
    cut = price_american_call_truncated(call, spec)
    print(f"American call S0={S0:5.1f}  full {full.value:.4f} ({full.elapsed:.2f}s)"
          f"  cut {cut.value:.4f} ({cut.elapsed:.2f}s)")
