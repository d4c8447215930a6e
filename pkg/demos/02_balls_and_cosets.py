# Lattice points in hyperbolic balls and Hecke cosets.
#
# The norm-n elements moving z by at most a given distance sit inside an
# ellipsoid of the 4-dimensional order lattice; we enumerate them and then
# collapse them into left cosets of the unit group.

# %%
import numpy as np

from ampsup import geometry
from ampsup.arith import sigma1
from ampsup.lattice import coset_reps, enumerate_ball
from ampsup.order import default_order

R = default_order()
z = 0.3 + 1.7j

for cap in (2, 8, 32, 128):
    ball = enumerate_ball(R, 1, z, cap)
    print(f"units with cosh d <= {cap:4d}: {len(ball):5d}")

# Growth is linear in cosh d: the hyperbolic disc of radius r has area
# 2 pi (cosh r - 1), and the fundamental domain has a fixed area.

# %% i is an elliptic point: its stabiliser is {±1, ±i}
print(enumerate_ball(R, 1, 1j, 1.0).coords)

# %% Hecke degrees away from 2 and 3 are sigma_1(n)
for n in (5, 7, 11, 25, 35):
    dec = coset_reps(R, n)
    print(f"deg({n}) = {dec.degree}  sigma_1 = {sigma1(n)}  caps tried {[c for c, _ in dec.history]}")

# %% and at the ramified primes there is a single coset
print("deg(2) =", coset_reps(R, 2).degree, " deg(3) =", coset_reps(R, 3).degree)

# %% The closest coset representatives move z the least
reps = coset_reps(R, 5).reps
mats = np.einsum("mi,iab->mab", reps.astype(float), R.real_basis)
print(np.round(geometry.dist(z, geometry.mobius(mats, z)), 4))
