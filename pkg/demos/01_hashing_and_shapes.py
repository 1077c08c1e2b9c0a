"""Random shifted grids and bucket-shaping functions.

A hash instance draws one width per coordinate from a Gamma law and a shift
uniform inside the cell.  Each point lands in an integer bucket and carries a
residual in [-1/2, 1/2]^d, which the bucket shape turns into a weight.
"""

import numpy as np

from wlsh_krr import RandomStream, gamma, hash_point, make_box_convolution, make_rect, residual, sample_lsh
from wlsh_krr.shapes import eval_f_tensor, self_convolution

# One instance in three dimensions, reproducible from its seed.
params = sample_lsh(3, gamma(2), RandomStream(2024))
print("widths:", np.round(params.widths, 3))
print("shifts:", np.round(params.shifts, 3))

x = np.array([0.4, -1.3, 2.2])
print("bucket of x:", hash_point(params, x))
print("residual of x:", np.round(residual(params, x), 3))

# Two shapes: the indicator of the cell and a smooth piecewise polynomial.
rect = make_rect()
smooth = make_box_convolution([1, 0.25, 0.25], 2)
print(f"\n{smooth.spec}: support half-width {smooth.support_halfwidth}, sup norm {smooth.sup_norm:.4f}")
for t in (0.0, 0.1, 0.2, 0.3, 0.375):
    print(f"  f({t:5.3f}) = {float(smooth(t)):.5f}")

# The weight of x under each shape.
r = residual(params, x)
print("\nweight of x, rect:", float(eval_f_tensor(rect, r)))
print("weight of x, smooth:", round(float(eval_f_tensor(smooth, r)), 5))

# f*f is computed exactly; its value at 0 is the squared L2 norm, 1 by construction.
conv = self_convolution(smooth)
print("\n(f*f)(0) =", round(float(conv(0.0)), 12), " pieces:", len(conv.pieces))
