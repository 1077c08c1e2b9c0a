"""Kernel ridge regression with an exact kernel or a WLSH sketch."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import sketch as sk
from .errors import InvalidArgument
from .kernels import KernelSpec, cross_kernel, kernel_matrix
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, SolveStats, conjugate_gradient

DENSE_CAP = 20000


@dataclass(eq=False)
class KrrModel:
    """Fitted coefficients and the backend needed to predict.

    ``backend`` is ``"exact"`` (uses ``kernel`` and ``train_points``) or
    ``"sketch"`` (uses ``sketch``).  ``offset`` is the label mean removed
    before fitting, added back to predictions.
    """

    coefficients: np.ndarray
    lam: float
    backend: str
    kernel: KernelSpec | None = None
    sketch: sk.WlshSketch | None = None
    train_points: np.ndarray | None = None
    offset: float = 0.0
    stats: SolveStats | None = field(default=None, repr=False)


def _prepare(y, lam, center):
    y = np.asarray(y, dtype=float)
    if not lam > 0:
        raise InvalidArgument("lambda must be positive")
    if not np.all(np.isfinite(y)):
        raise InvalidArgument("labels must be finite")
    offset = float(np.mean(y)) if center and y.size else 0.0
    return y - offset, offset


def fit_exact(
    spec: KernelSpec, X, y, lam: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
    center: bool = False, dense_cap: int = DENSE_CAP, K=None,
) -> KrrModel:
    """Solve ``(K + lam I) beta = y`` by CG on the dense kernel matrix.

    A precomputed kernel matrix may be passed as ``K`` to reuse it across
    regularization values.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    yc, offset = _prepare(y, lam, center)
    if X.shape[0] != yc.shape[0]:
        raise InvalidArgument("X and y have different lengths")
    if X.shape[0] > dense_cap:
        raise InvalidArgument(f"n={X.shape[0]} exceeds the dense cap {dense_cap}")
    if not np.all(np.isfinite(X)):
        raise InvalidArgument("features must be finite")
    if K is None:
        K = kernel_matrix(spec, X)
    beta, stats = conjugate_gradient(lambda v: K @ v, yc, lam, tol, max_iter)
    return KrrModel(beta, float(lam), "exact", kernel=spec, train_points=X, offset=offset, stats=stats)


def fit_wlsh(
    sketch: sk.WlshSketch, y, lam: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
    center: bool = False, train_points=None,
) -> KrrModel:
    """Solve ``(K~ + lam I) beta = y`` by CG with the sketch matvec."""
    yc, offset = _prepare(y, lam, center)
    if yc.shape != (sketch.n,):
        raise InvalidArgument("label count does not match the sketch")
    beta, stats = conjugate_gradient(sketch.matvec, yc, lam, tol, max_iter)
    pts = None if train_points is None else np.asarray(train_points, dtype=float)
    return KrrModel(beta, float(lam), "sketch", sketch=sketch, train_points=pts, offset=offset, stats=stats)


def predict(model: KrrModel, Xq, block: int = 2048) -> np.ndarray:
    """Predictions at the rows of ``Xq``."""
    Xq = np.asarray(Xq, dtype=float)
    if Xq.ndim == 1:
        Xq = Xq[None, :]
    d = model.train_points.shape[1] if model.backend == "exact" else model.sketch.d
    if Xq.shape[0] == 0:
        return np.zeros(0)
    if Xq.shape[1] != d:
        raise InvalidArgument(f"query dimension {Xq.shape[1]} != training dimension {d}")
    if model.backend == "sketch":
        return sk.predict(model.sketch, model.coefficients, Xq) + model.offset
    out = np.empty(Xq.shape[0])
    for start in range(0, Xq.shape[0], block):
        Kq = cross_kernel(model.kernel, Xq[start : start + block], model.train_points)
        out[start : start + block] = Kq @ model.coefficients
    return out + model.offset


def fitted_values(model: KrrModel, K=None) -> np.ndarray:
    """In-sample predictions ``K beta`` (or ``K~ beta``)."""
    if model.backend == "sketch":
        return model.sketch.matvec(model.coefficients) + model.offset
    if K is None:
        K = kernel_matrix(model.kernel, model.train_points)
    return K @ model.coefficients + model.offset


def rmse(pred, truth) -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise InvalidArgument("prediction and truth lengths differ")
    if pred.size == 0:
        raise InvalidArgument("rmse of an empty vector")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def empirical_risk_samples(
    fit_in_sample: Callable[[np.ndarray], np.ndarray], eta_star, noise_sd: float, repeats: int, rng
) -> np.ndarray:
    """Per-repeat in-sample squared error ``mean((eta(x_i) - eta*(x_i))^2)``.

    ``fit_in_sample`` maps labels to fitted values at the training points.
    Each repeat draws fresh labels ``eta* + noise``.
    """
    if repeats < 1:
        raise InvalidArgument("repeats must be at least 1")
    eta_star = np.asarray(eta_star, dtype=float)
    rng = np.random.default_rng(rng)
    out = np.empty(repeats)
    for r in range(repeats):
        y = eta_star + noise_sd * rng.standard_normal(eta_star.shape)
        out[r] = np.mean((np.asarray(fit_in_sample(y)) - eta_star) ** 2)
    return out


def empirical_risk(fit_in_sample, eta_star, noise_sd: float, repeats: int, rng) -> float:
    """Monte-Carlo estimate of the empirical risk over ``repeats`` noise draws."""
    return float(np.mean(empirical_risk_samples(fit_in_sample, eta_star, noise_sd, repeats, rng)))
