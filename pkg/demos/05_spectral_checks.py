"""How close the sketch is to the kernel matrix, spectrally.

``ose_epsilon`` is the smallest eps with
(1-eps)(K + lam I) <= K~ + lam I <= (1+eps)(K + lam I).
It shrinks like m^{-1/2}.  The two-cluster instance shows why m must grow with n / lam.
"""

import math

import numpy as np

from wlsh_krr import gamma, kernel_matrix, make_rect, parse_kernel
from wlsh_krr.verify import loglog_slope, lower_bound_instance, ose_trial, quadratic_form_trials, recommended_m

n, lam = 256, 4.0
X = np.random.default_rng(1).uniform(size=(n, 2))
K = kernel_matrix(parse_kernel("wlsh:rect:gamma:2"), X)
ms = [16, 64, 256, 1024]
eps = [ose_trial(X, make_rect(), gamma(2), m, lam, seed=m, K=K).epsilon_star for m in ms]
for m, e in zip(ms, eps):
    print(f"m={m:5d}  eps*={e:.3f}")
print(f"log-log slope {loglog_slope(ms, eps):.3f}")
m_rec = recommended_m(n, lam)
print(f"recommended m for eps 1/2: {m_rec}, measured eps* = {ose_trial(X, make_rect(), gamma(2), m_rec, lam, 0, K=K).epsilon_star:.3f}")

# Two clusters 2 lam / n apart with opposite signs: each instance either separates them or not.
n, lam = 64, 4.0
pts, beta = lower_bound_instance(n, 1, lam)
res = quadratic_form_trials(pts, beta, trials=10_000, seed=0)
print(f"\nquadratic form values: {res.histogram}")
print(f"separation frequency {res.p_hat:.4f}, predicted {1 - math.exp(-2 * lam / n):.4f}")
