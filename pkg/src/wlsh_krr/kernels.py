"""Exact shift-invariant kernels.

Laplace ``exp(-|d|_1)``, squared exponential ``exp(-|d|_2^2)``, Matern 5/2
``(1 + r + r^2/3) exp(-r)`` and the WLSH kernel
``prod_l int p(w) (f*f)(d_l / w) dw``.

The 1-d WLSH profile is evaluated two ways: :func:`wlsh_1d` by adaptive
quadrature, and :func:`wlsh_1d_closed_form`, which integrates each polynomial
piece of ``f*f`` against the Gamma density through incomplete Gamma functions.
The closed form is vectorized and is what dense kernel matrices use.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.spatial.distance import cdist

from .errors import InvalidArgument, NumericFailure
from .shapes import BucketShape, parse_shape
from .widths import WidthDistribution, parse_dist

KINDS = ("laplace", "se", "matern52", "wlsh")

QUAD_TOL = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """An exact kernel.

    Attributes:
        kind: One of ``"laplace"``, ``"se"``, ``"matern52"``, ``"wlsh"``.
        shape: Bucket shape (WLSH only).
        dist: Width distribution (WLSH only).
        lengthscale: Inputs are divided by this before evaluation.
    """

    kind: str
    shape: BucketShape | None = None
    dist: WidthDistribution | None = None
    lengthscale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown kernel kind {self.kind!r}")
        if not self.lengthscale > 0:
            raise InvalidArgument("lengthscale must be positive")
        if self.kind == "wlsh" and (self.shape is None or self.dist is None):
            raise InvalidArgument("WLSH kernel needs a shape and a width distribution")

    @property
    def spec(self) -> str:
        if self.kind == "wlsh":
            return f"wlsh:{self.shape.spec}:{self.dist.spec}"
        return self.kind


def laplace(lengthscale=1.0):
    return KernelSpec("laplace", lengthscale=lengthscale)


def squared_exponential(lengthscale=1.0):
    return KernelSpec("se", lengthscale=lengthscale)


def matern52(lengthscale=1.0):
    return KernelSpec("matern52", lengthscale=lengthscale)


def wlsh(shape: BucketShape, dist: WidthDistribution, lengthscale=1.0):
    return KernelSpec("wlsh", shape, dist, lengthscale)


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``laplace``, ``se``, ``matern52`` or ``wlsh:<shape>:<dist>``."""
    text = text.strip()
    low = text.lower()
    if low in ("laplace", "se", "matern52"):
        return KernelSpec(low)
    if low.startswith("wlsh:"):
        parts = text.split(":")
        if len(parts) < 4:
            raise InvalidArgument(f"malformed WLSH kernel {text!r}; expected wlsh:<shape>:<dist>")
        return wlsh(parse_shape(":".join(parts[1:-2])), parse_dist(":".join(parts[-2:])))
    raise InvalidArgument(f"unknown kernel {text!r}")


def _positive_pieces(shape: BucketShape):
    """Pieces of ``f*f`` restricted to ``u >= 0`` as ``(lo, hi, coef)``."""
    conv = shape.self_conv
    out = []
    for a, b, p in zip(conv.breakpoints[:-1], conv.breakpoints[1:], conv.pieces):
        if b <= 0:
            continue
        out.append((max(float(a), 0.0), float(b), p.coef))
    return out


def wlsh_1d(shape: BucketShape, dist: WidthDistribution, r: float) -> float:
    """``int p(w) (f*f)(r / w) dw`` by adaptive Gauss-Kronrod quadrature.

    The integrand vanishes for ``w < |r| / (2 * support_halfwidth)``; the
    subdivision is seeded at the widths where ``r / w`` crosses a breakpoint
    of ``f*f``.

    Raises:
        NumericFailure: if the quadrature does not reach the tolerance.
    """
    r = abs(float(r))
    if r == 0.0:
        return 1.0
    conv = shape.self_conv
    lower = r / (2.0 * shape.support_halfwidth)
    upper = dist.tail_cutoff()
    if lower >= upper:
        return 0.0
    k = dist.shape_k
    log_norm = math.lgamma(k)

    def integrand(w):
        return math.exp((k - 1) * math.log(w) - w - log_norm) * float(conv(r / w))

    pts = sorted({r / b for b in conv.breakpoints if b > 0 and lower < r / b < upper})
    val, err, info, *rest = integrate.quad(
        integrand, lower, upper, points=pts or None, epsabs=1e-12, epsrel=1e-12, limit=500, full_output=1
    )
    if err > QUAD_TOL or not np.isfinite(val):
        raise NumericFailure(
            f"WLSH quadrature did not converge at r={r}: estimate={val}, abserr={err}, "
            f"evaluations={info.get('neval')}, message={rest[0] if rest else ''}"
        )
    return float(min(max(val, 0.0), 1.0))


def _upper_gamma(s: int, x):
    """Unnormalized upper incomplete Gamma ``Gamma(s, x)`` for integer ``s``."""
    x = np.asarray(x, dtype=float)
    if s >= 1:
        return math.gamma(s) * special.gammaincc(s, x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(x > 0, x**s * special.expn(1 - s, x), np.inf)


def _breakpoint_jumps(shape: BucketShape):
    """``(t, D)`` pairs for the positive breakpoints of ``f*f``.

    ``D[j]`` is the coefficient of ``u^j`` on the piece ending at ``t`` minus
    that of the piece starting at ``t``, so that
    ``sum_pieces c_j r^j (G(k-j, r/b) - G(k-j, r/a)) = sum_t D_j(t) r^j G(k-j, r/t)``.
    """
    pieces = _positive_pieces(shape)
    deg = max(len(c) for _, _, c in pieces)
    pad = [np.pad(np.asarray(c, float), (0, deg - len(c))) for _, _, c in pieces]
    out = []
    for i, (a, b, _) in enumerate(pieces):
        nxt = pad[i + 1] if i + 1 < len(pieces) else np.zeros(deg)
        out.append((b, pad[i] - nxt))
    return out


def wlsh_1d_closed_form(shape: BucketShape, dist: WidthDistribution, r):
    """Vectorized WLSH profile via incomplete Gamma functions.

    On a piece ``[a, b]`` of ``f*f`` with coefficients ``c_j`` the width range
    is ``[r/b, r/a]`` and
    ``int p(w) c_j (r/w)^j dw = c_j r^j (Gamma(k-j, r/b) - Gamma(k-j, r/a)) / (k-1)!``.
    Terms are grouped by breakpoint, and ``Gamma(s, x)`` for ``s >= 1`` comes
    from the upward recurrence ``Gamma(s+1, x) = s Gamma(s, x) + x^s e^{-x}``,
    which only adds positive terms.
    """
    r = np.abs(np.asarray(r, dtype=float))
    k = dist.shape_k
    pos = r > 0
    rp = r[pos]
    acc = np.zeros(rp.shape)
    fact = math.gamma(k)
    for t, jump in _breakpoint_jumps(shape):
        x = rp / t
        ex = np.exp(-x)
        # gam[s] = Gamma(s, x) for s = 1..k
        gam = {1: ex}
        xs = np.ones_like(x)
        for s_ in range(1, k):
            xs = xs * x
            gam[s_ + 1] = s_ * gam[s_] + xs * ex
        rj = np.ones_like(rp)
        for j, c in enumerate(jump):
            if c != 0.0:
                g = gam[k - j] if k - j >= 1 else _upper_gamma(k - j, x)
                acc += c * rj * g
            rj = rj * rp
    total = np.ones(r.shape)
    total[pos] = acc / fact
    out = np.clip(total, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def _check_pair(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidArgument(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x, y


def kernel_value(spec: KernelSpec, x, y) -> float:
    """Kernel between two points; WLSH factors use :func:`wlsh_1d`."""
    x, y = _check_pair(x, y)
    delta = (x - y) / spec.lengthscale
    if spec.kind == "laplace":
        return float(np.exp(-np.sum(np.abs(delta))))
    if spec.kind == "se":
        return float(np.exp(-np.sum(delta**2)))
    if spec.kind == "matern52":
        r = float(np.sqrt(np.sum(delta**2)))
        return (1.0 + r + r * r / 3.0) * math.exp(-r)
    return float(np.prod([wlsh_1d(spec.shape, spec.dist, t) for t in delta]))


def _row_blocks(n, d):
    # Keep each temporary (rows x n x d) block near 2**22 doubles.
    return max(1, int(2**22 // max(1, n * d)))


def cross_kernel(spec: KernelSpec, A, B) -> np.ndarray:
    """Dense ``K[i, j] = k(A[i], B[j])``."""
    A = np.atleast_2d(np.asarray(A, dtype=float)) / spec.lengthscale
    B = np.atleast_2d(np.asarray(B, dtype=float)) / spec.lengthscale
    if A.shape[1] != B.shape[1]:
        raise InvalidArgument(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.kind == "laplace":
        return np.exp(-cdist(A, B, "cityblock"))
    if spec.kind == "se":
        return np.exp(-cdist(A, B, "sqeuclidean"))
    if spec.kind == "matern52":
        r = cdist(A, B, "euclidean")
        return (1.0 + r + r * r / 3.0) * np.exp(-r)
    out = np.empty((A.shape[0], B.shape[0]))
    step = _row_blocks(B.shape[0], A.shape[1])
    for start in range(0, A.shape[0], step):
        diff = A[start : start + step, None, :] - B[None, :, :]
        out[start : start + step] = np.prod(wlsh_1d_closed_form(spec.shape, spec.dist, diff), axis=-1)
    return out


def kernel_matrix(spec: KernelSpec, points) -> np.ndarray:
    """Dense symmetric kernel matrix with unit diagonal."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[0] < 1:
        raise InvalidArgument("need at least one point")
    K = cross_kernel(spec, X, X)
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def worker_count() -> int:
    """Worker cap from ``WLSH_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WLSH_THREADS", "1")))
    except ValueError:
        return 1
