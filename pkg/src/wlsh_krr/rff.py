"""Random Fourier features for ``exp(-|x - y|_2^2)``.

Frequencies ``omega ~ N(0, 2 I)`` (angular convention) and phases
``b ~ U[0, 2 pi)`` give ``phi(x) = sqrt(2/D) cos(Omega x + b)`` with
``E[phi(x) . phi(y)] = exp(-|x - y|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, SolveStats, conjugate_gradient


@dataclass(eq=False)
class RffMap:
    frequencies: np.ndarray  # (D, d)
    phases: np.ndarray  # (D,)

    @property
    def D(self) -> int:
        return self.phases.shape[0]

    @property
    def d(self) -> int:
        return self.frequencies.shape[1]


def build_rff(d: int, D: int, seed: int = 0) -> RffMap:
    if D < 1 or d < 1:
        raise InvalidArgument("need D >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    freqs = rng.normal(0.0, np.sqrt(2.0), size=(D, d))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=D)
    return RffMap(freqs, phases)


def featurize(rmap: RffMap, X, block: int = 4096) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != rmap.d:
        raise InvalidArgument(f"inputs have dimension {X.shape[1]}, map expects {rmap.d}")
    out = np.empty((X.shape[0], rmap.D))
    scale = np.sqrt(2.0 / rmap.D)
    for start in range(0, X.shape[0], block):
        out[start : start + block] = scale * np.cos(X[start : start + block] @ rmap.frequencies.T + rmap.phases)
    return out


def fit_rff(
    features, y, lam: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> tuple[np.ndarray, SolveStats]:
    """Primal ridge solve ``(Phi^T Phi + lam I) w = Phi^T y`` by CG."""
    Phi = np.asarray(features, dtype=float)
    y = np.asarray(y, dtype=float)
    if not lam > 0:
        raise InvalidArgument("lambda must be positive")
    if Phi.shape[0] != y.shape[0]:
        raise InvalidArgument("feature rows and labels differ in length")
    return conjugate_gradient(lambda v: Phi.T @ (Phi @ v), Phi.T @ y, lam, tol, max_iter)


def predict_rff(rmap: RffMap, weights, Xq) -> np.ndarray:
    return featurize(rmap, Xq) @ np.asarray(weights, dtype=float)
