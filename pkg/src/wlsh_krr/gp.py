"""Synthetic Gaussian-process regression tasks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericFailure
from .kernels import KernelSpec, kernel_matrix

JITTER_START = 1e-10
JITTER_CAP = 1e-6


def cholesky_with_jitter(K, jitter: float = JITTER_START, cap: float = JITTER_CAP):
    """Cholesky factor of ``K + jitter I``, escalating ``jitter`` x10 up to ``cap``.

    Returns:
        ``(L, jitter_used)``.
    """
    n = K.shape[0]
    j = jitter
    while True:
        try:
            return np.linalg.cholesky(K + j * np.eye(n)), j
        except np.linalg.LinAlgError:
            if j * 10 > cap * (1 + 1e-9):
                raise NumericFailure(f"Cholesky failed with jitter up to {j:g}") from None
            j *= 10


def sample_gp(points, spec: KernelSpec, jitter: float = JITTER_START, seed: int = 0, size: int | None = None,
              dense_cap: int = 20000):
    """Zero-mean GP values at ``points`` with covariance ``K + jitter I``.

    Returns an array of shape ``(n,)``, or ``(size, n)`` when ``size`` is given.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[0] > dense_cap:
        raise InvalidArgument(f"{X.shape[0]} points exceed the dense cap")
    L, _ = cholesky_with_jitter(kernel_matrix(spec, X), jitter)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((1 if size is None else size, X.shape[0]))
    vals = z @ L.T
    return vals[0] if size is None else vals


@dataclass(eq=False)
class GpTask:
    points: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    covariance: KernelSpec
    train_idx: np.ndarray
    test_idx: np.ndarray
    noise_sd: float
    seed: int
    jitter: float
    meta: dict = field(default_factory=dict)

    @property
    def X_train(self):
        return self.points[self.train_idx]

    @property
    def X_test(self):
        return self.points[self.test_idx]

    @property
    def y_train(self):
        return self.labels[self.train_idx]

    @property
    def eta_test(self):
        return self.values[self.test_idx]


def make_gp_task(d: int, covariance: KernelSpec, n_total: int, n_train: int, noise_sd: float = 0.1,
                 seed: int = 0, split_seed: int | None = None) -> GpTask:
    """Uniform points in ``[0, 1]^d``, a GP sample path, noisy labels and a shuffled split.

    Points and values depend on ``seed`` only; the partition depends on
    ``split_seed`` (default ``seed``).
    """
    if not 0 < n_train < n_total:
        raise InvalidArgument("need 0 < n_train < n_total")
    if noise_sd < 0:
        raise InvalidArgument("noise_sd must be non-negative")
    rng = np.random.default_rng([seed, 0])
    X = rng.uniform(0.0, 1.0, size=(n_total, d))
    L, jit = cholesky_with_jitter(kernel_matrix(covariance, X))
    values = L @ rng.standard_normal(n_total)
    labels = values + noise_sd * np.random.default_rng([seed, 1]).standard_normal(n_total)
    perm = np.random.default_rng([seed if split_seed is None else split_seed, 2]).permutation(n_total)
    return GpTask(X, values, labels, covariance, np.sort(perm[:n_train]), np.sort(perm[n_train:]),
                  float(noise_sd), seed, jit, {"n_total": n_total, "n_train": n_train, "d": d})
