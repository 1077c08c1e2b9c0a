"""Desk-scale checks of the spectral guarantees of WLSH sketches.

* :func:`ose_epsilon` is the smallest ``eps`` with
  ``(1-eps)(K + lam I) <= K~ + lam I <= (1+eps)(K + lam I)``.
* :func:`psd_bounds_check` tests ``0 <= K~^s <= n ||f^{(x)d}||_inf^2 I``.
* :func:`lower_bound_instance` / :func:`quadratic_form_trials` reproduce the
  two-cluster dataset on which a single instance's quadratic form is either
  ``0`` or ``n^2/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sketch as sk
from .errors import InvalidArgument
from .kernels import kernel_matrix, wlsh
from .shapes import BucketShape, make_rect, tensor_sup_norm
from .widths import WidthDistribution, gamma

SYMMETRY_TOL = 1e-10
M_CONSTANT = 2.0


@dataclass
class OseReport:
    epsilon_star: float
    m: int
    n: int
    lam: float
    seed: int


def _check_symmetric(A, name):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument(f"{name} must be square")
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL:
        raise InvalidArgument(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def ose_epsilon(K, K_tilde, lam: float) -> float:
    """``||(K + lam I)^{-1/2} (K~ + lam I) (K + lam I)^{-1/2} - I||_op``."""
    K = _check_symmetric(K, "K")
    Kt = _check_symmetric(K_tilde, "K_tilde")
    if K.shape != Kt.shape:
        raise InvalidArgument("K and K_tilde differ in shape")
    if not lam > 0:
        raise InvalidArgument("lambda must be positive")
    n = K.shape[0]
    evals, U = np.linalg.eigh(K + lam * np.eye(n))
    if evals[0] <= 0:
        raise InvalidArgument("K + lam I is not positive definite")
    Z = U / np.sqrt(evals)
    M = Z.T @ (Kt + lam * np.eye(n)) @ Z
    dev = np.linalg.eigvalsh(0.5 * (M + M.T)) - 1.0
    return float(np.max(np.abs(dev)))


def recommended_m(n: int, lam: float, eps: float = 0.5, shape: BucketShape | None = None, d: int = 1,
                  constant: float = M_CONSTANT) -> int:
    """``ceil(constant * ||f^{(x)d}||_inf^2 / eps^2 * (n / lam) * ln n)``.

    The constant is empirical; with the defaults (rect, ``eps = 1/2``) this
    is ``ceil(8 (n / lam) ln n)``.
    """
    sup2 = 1.0 if shape is None else tensor_sup_norm(shape, d) ** 2
    return int(math.ceil(constant * sup2 / eps**2 * (n / lam) * math.log(n)))


def ose_trial(points, shape: BucketShape, dist: WidthDistribution, m: int, lam: float, seed: int,
              K=None) -> OseReport:
    """Build one sketch and measure its OSE distortion against the exact kernel."""
    points = np.asarray(points, dtype=float)
    if K is None:
        K = kernel_matrix(wlsh(shape, dist), points)
    sketch = sk.build_sketch(points, shape, dist, m, seed)
    eps = ose_epsilon(K, sk.dense_matrix(sketch), lam)
    return OseReport(eps, m, points.shape[0], float(lam), seed)


def loglog_slope(ms, eps) -> float:
    """Least-squares slope of ``log eps`` against ``log m``."""
    return float(np.polyfit(np.log(np.asarray(ms, float)), np.log(np.asarray(eps, float)), 1)[0])


def psd_bounds_check(K_tilde_instance, shape: BucketShape, d: int, tol: float = 1e-8):
    """Extreme eigenvalues of a single-instance matrix and whether they fit the bounds.

    Returns:
        ``(min_eig, max_eig, passes)`` with the slack ``tol * n`` on both sides.
    """
    A = _check_symmetric(K_tilde_instance, "K_tilde_instance")
    n = A.shape[0]
    evals = np.linalg.eigvalsh(A)
    upper = n * tensor_sup_norm(shape, d) ** 2
    slack = tol * n
    lo, hi = float(evals[0]), float(evals[-1])
    return lo, hi, bool(lo >= -slack and hi <= upper + slack)


def lower_bound_instance(n: int, d: int, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Two clusters of ``n/2`` points at ``(-lam/n, 0, ...)`` and ``(lam/n, 0, ...)``.

    Returns:
        ``(points, beta)`` with ``beta = -1`` on the first cluster, ``+1`` on the second.
    """
    if n % 2 or n < 2:
        raise InvalidArgument("n must be a positive even integer")
    if n < 8 * lam:
        raise InvalidArgument("need n >= 8 * lambda")
    if d < 1:
        raise InvalidArgument("d must be at least 1")
    pts = np.zeros((n, d))
    pts[: n // 2, 0] = -lam / n
    pts[n // 2 :, 0] = lam / n
    beta = np.concatenate([-np.ones(n // 2), np.ones(n // 2)])
    return pts, beta


@dataclass
class QuadraticFormTrials:
    values: np.ndarray
    histogram: dict[float, int]
    p_hat: float


def quadratic_form_trials(points, beta, shape: BucketShape | None = None, dist: WidthDistribution | None = None,
                          trials: int = 10000, seed: int = 0) -> QuadraticFormTrials:
    """``beta^T K~^s beta`` for ``trials`` independent single instances.

    ``p_hat`` is the fraction of instances with a non-zero value, i.e. the
    instances in which the two clusters land in different buckets.
    """
    shape = make_rect() if shape is None else shape
    dist = gamma(2) if dist is None else dist
    sketch = sk.build_sketch(points, shape, dist, trials, seed)
    vals = sk.instance_quadratic_forms(sketch, beta)
    keys, counts = np.unique(vals, return_counts=True)
    hist = {float(k): int(c) for k, c in zip(keys, counts)}
    return QuadraticFormTrials(vals, hist, float(np.mean(vals != 0)))
