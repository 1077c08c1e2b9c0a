"""Conjugate gradient for ``(A + lambda I) x = b`` with ``A`` symmetric PSD.

The plain CG recurrence is paired with minimal-residual smoothing: alongside
the CG iterate ``x_k`` a smoothed iterate ``y_k`` is kept whose residual is the
shortest vector on the segment between the previous smoothed residual and the
new CG residual.  ``||b - (A + lambda I) y_k||`` is therefore non-increasing,
and ``y_k`` is what gets returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument, NumericFailure

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 1000
# Recursively updated residuals are replaced by true ones this often.
RESIDUAL_REFRESH = 50


@dataclass
class SolveStats:
    iterations: int
    final_relative_residual: float
    converged: bool
    residual_history: list[float] = field(default_factory=list, repr=False)


def conjugate_gradient(
    apply_op: Callable[[np.ndarray], np.ndarray],
    b,
    lam: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, SolveStats]:
    """Solve ``(apply_op + lam * I) x = b``.

    Convergence means the true relative residual is at most ``tol``.  Running
    out of iterations is not an error: the best iterate is returned with
    ``converged=False``.

    Raises:
        NumericFailure: if a NaN or Inf appears.
    """
    b = np.asarray(b, dtype=float)
    if lam < 0:
        raise InvalidArgument("lambda must be non-negative")
    if not np.all(np.isfinite(b)):
        raise NumericFailure("right-hand side is not finite")

    def op(v):
        return np.asarray(apply_op(v), dtype=float) + lam * v

    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), SolveStats(0, 0.0, True, [0.0])

    x = np.zeros_like(b)
    r = b.copy()
    y, s = x.copy(), r.copy()
    p = r.copy()
    rr = float(r @ r)
    history = [1.0]
    it = 0
    while it < max_iter:
        Ap = op(p)
        pAp = float(p @ Ap)
        if not np.isfinite(pAp):
            raise NumericFailure(f"non-finite curvature at CG iteration {it}")
        if pAp <= 0:
            break
        alpha = rr / pAp
        x = x + alpha * p
        it += 1
        if it % RESIDUAL_REFRESH == 0:
            r = b - op(x)
            s = b - op(y)
        else:
            r = r - alpha * Ap
        rr_new = float(r @ r)
        if not np.isfinite(rr_new):
            raise NumericFailure(f"non-finite residual at CG iteration {it}")

        diff = r - s
        dd = float(diff @ diff)
        if dd > 0:
            eta = min(max(-float(s @ diff) / dd, 0.0), 1.0)
            y = y + eta * (x - y)
            s = s + eta * diff
        rel = float(np.linalg.norm(s)) / bnorm
        history.append(rel)
        if rel <= tol:
            true_rel = float(np.linalg.norm(b - op(y))) / bnorm
            if true_rel <= tol:
                return y, SolveStats(it, true_rel, True, history)
            s = b - op(y)
        p = r + (rr_new / rr) * p
        rr = rr_new
    final = float(np.linalg.norm(b - op(y))) / bnorm
    return y, SolveStats(it, final, final <= tol, history)
