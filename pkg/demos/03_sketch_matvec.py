"""A sketch of the kernel matrix and its linear-time product.

``build_sketch`` hashes every point with m independent grids and caches each
point's bucket and weight.  A product with the implicit matrix sums bucket
loads, so it costs O(n m) instead of O(n^2).
"""

import time

import numpy as np

from wlsh_krr import build_sketch, gamma, kernel_matrix, make_rect, parse_kernel
from wlsh_krr.sketch import dense_matrix

rng = np.random.default_rng(0)
X = rng.uniform(size=(400, 2))
beta = rng.normal(size=400)

for m in (10, 100, 1000):
    sk = build_sketch(X, make_rect(), gamma(2), m, seed=1)
    err = np.linalg.norm(sk @ beta - dense_matrix(sk) @ beta) / np.linalg.norm(dense_matrix(sk) @ beta)
    K = kernel_matrix(parse_kernel("laplace"), X)
    dev = np.linalg.norm(dense_matrix(sk) - K, 2) / np.linalg.norm(K, 2)
    print(f"m={m:5d}  matvec vs dense {err:.1e}   ||K~ - K|| / ||K|| = {dev:.3f}")

# Linear scaling in n.
for n in (25_000, 50_000, 100_000):
    Xn = rng.normal(size=(n, 5))
    t0 = time.perf_counter()
    sk = build_sketch(Xn, make_rect(), gamma(2), 20, seed=2)
    t1 = time.perf_counter()
    sk @ rng.normal(size=n)
    t2 = time.perf_counter()
    print(f"n={n:6d}  build {t1 - t0:5.2f}s  matvec {1e3 * (t2 - t1):6.1f}ms  memory {sk.nbytes / 2**20:6.1f} MiB")
