# Quaternion algebra (-1, 3) and its maximal order.
#
# Walks through the exact arithmetic: Hilbert symbols pick out the
# ramified primes, the trace form gives the discriminant, and the
# embedding turns quaternions into real 2x2 matrices.

# %%
from ampsup.order import OrderBasis, default_order, verify_order
from ampsup.quaternion import AlgebraParams, embed, to_real
from ampsup.ramification import hilbert_symbol, ramified_primes

A = AlgebraParams(-1, 3)
for p in (2, 3, 5, 7, "inf"):
    print(f"(-1, 3)_{p} = {hilbert_symbol(-1, 3, p):+d}")

ram = ramified_primes(A)
print("ramified primes:", ram.ramified_primes, " D =", ram.D)

# %% The order Z<1, i, j, (1+i+j+ij)/2>
R = default_order()
report = verify_order(R)
print(report.to_json())

# The naive lattice Z<1, i, j, ij> is a ring but not maximal: index 2, disc 144.
naive = OrderBasis.from_rows(A, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
print("naive basis fails:", verify_order(naive).failures, "disc", naive.discriminant)

# %% Elements act on the upper half-plane through real matrices
omega = R.basis[3]
m = embed(omega)
print("omega =", omega, " norm", omega.norm(), " trace", omega.trace())
print("image:\n", to_real(m))
print("det (exact):", m.det())
