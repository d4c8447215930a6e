# The weight-k Bergman kernel on the diagonal.
#
# B(z, z) in Petersson normalisation is a sum over the unit group of
# ((k-1)/4pi) cosh^-k(d(z, gz)/2) times a phase; on the diagonal all
# phases are +1 up to rounding, so the signed sum is a positive number.

# %%
import math

import numpy as np

from ampsup import geometry
from ampsup.bergman import covering_ball, hecke_translate_kernel, kernel_petersson
from ampsup.order import default_order

R = default_order()
z = 0.3 + 1.7j

for k in (4, 8, 20, 60, 200):
    ev = kernel_petersson(R, z, z, k, 256.0)
    floor = 2 * (k - 1) / (4 * math.pi)
    print(f"k={k:3d}  B/floor = {ev.signed_value.real / floor:.6f}  tail <= {ev.tail_bound:.1e}  ({ev.tail_status})")

# As k grows only the distance-0 elements ±1 survive, so B -> 2(k-1)/4pi.

# %% Weight 4 converges slowly: the number of terms grows like cosh d, each
# term like cosh^-2, so the tail after cap C is about 1/C.
for cap in (64, 256, 1024, 4096):
    ev = kernel_petersson(R, z, z, 4, float(cap))
    print(f"cap {cap:5d}: value {ev.signed_value.real:.9f}, terms {ev.terms_used:6d}, tail {ev.tail_bound:.2e}")

# %% A grid, sharing one enumeration
pts = geometry.sample_grid((-0.5, 0.5, 0.8, 1.6), 5, 4)
ball = covering_ball(R, pts, 64.0)
vals = np.array([kernel_petersson(R, p, p, 20, 64.0, ball=ball).signed_value.real for p in pts])
print(vals.reshape(4, 5).round(4))

# %% Hecke translates: sums over norm-n elements
for n in (1, 5, 7, 25):
    hv = hecke_translate_kernel(R, z, n, 40, tol=1e-12)
    print(f"n={n:2d}: {float(hv.value):.6f}  small-ball part {float(hv.small_ball):.4f}  terms {hv.terms_used}")
