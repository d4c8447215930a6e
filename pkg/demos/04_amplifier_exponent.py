# From the two-term bound to the exponent 5/6 (= 2 * (1/2 - 1/12)).

# %%
import math

import numpy as np

from ampsup.amplifier import (
    bound_rhs,
    build_amplifier,
    exponent_fit,
    moment_sums,
    optimal_N,
    solve_balanced_N,
    tail_integral_parts,
)

plan = build_amplifier(100, 6)
print("support:", plan.support, " primes:", plan.primes)
print("S1, S2, L =", moment_sums(plan))

# %% The tail integral, and its first summand in closed form
for n, k in [(1, 6), (5, 40), (20, 200)]:
    t = tail_integral_parts(n, k)
    print(f"n={n:2d} k={k:3d}: first {t.first:.6e} (closed {t.first_closed:.6e}), second {t.second:.6e}")

# %% Balancing the two terms
k = 12000 * math.log(10)
b = bound_rhs(k, 10)
print(f"k={k:.1f}: term1 {b.term1:.1f}, term2 {b.term2:.4f}")
print(optimal_N(k))

# %% The fitted exponent
curve = exponent_fit(1e5, 1e9, 40)
print(f"slope {curve.slope:.4f}  vs 5/6 = {5 / 6:.4f}")
ks = np.geomspace(1e5, 1e9, 5)
for k in ks:
    N = solve_balanced_N(k)
    print(f"k={k:.0e}  N={N:7.2f}  rhs/k^(5/6) = {bound_rhs(k, N).rhs / k ** (5 / 6):.3f}")

# The slope sits a little above 5/6 because term1 = k N^-1/2 and
# N^3 log N ~ k gives k^(5/6) times a slowly growing (log k)^(1/6).
