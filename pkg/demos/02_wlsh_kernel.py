"""The kernel a weighted LSH sketch estimates, in one dimension.

For the indicator bucket and Gamma(2) widths the kernel is exactly e^{-|r|}.
The smooth bucket with Gamma(7) widths gives a kernel that is twice
differentiable at the origin.
"""

import math

import numpy as np

from wlsh_krr import gamma, make_box_convolution, make_rect, wlsh_1d
from wlsh_krr.kernels import wlsh_1d_closed_form

rect, smooth = make_rect(), make_box_convolution([1, 0.25, 0.25], 2)

print("   r    rect/gamma:2   exp(-r)    smooth/gamma:7")
for r in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0):
    print(f"{r:5.2f}   {wlsh_1d(rect, gamma(2), r):.10f}  {math.exp(-r):.10f}  {wlsh_1d(smooth, gamma(7), r):.10f}")

# Adaptive quadrature and the incomplete-Gamma closed form agree to roundoff.
rs = np.linspace(0, 6, 61)
quad = np.array([wlsh_1d(smooth, gamma(7), r) for r in rs])
print("\nmax |quadrature - closed form| =", np.abs(quad - wlsh_1d_closed_form(smooth, gamma(7), rs)).max())

# Behaviour at the origin: a kink for rect, a finite curvature for the smooth shape.
h = 1e-4
print("rect slope at 0+:", (wlsh_1d(rect, gamma(2), h) - 1) / h)
for h in (1e-2, 1e-3):
    k = wlsh_1d(smooth, gamma(7), h)
    print(f"smooth second difference at h={h:g}: {2 * (k - 1) / h**2:.5f}")
