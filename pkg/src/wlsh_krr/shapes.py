"""Bucket-shaping functions as exact piecewise polynomials.

A shape ``f`` is even, supported in ``[-1/2, 1/2]`` and has unit L2 norm.
Two families are provided: the rectangle and scaled convolutions of boxcars,
e.g. ``(rect * rect_{1/4} * rect_{1/4})(2x)`` for a C^1 bucket.  Everything
downstream (norms, ``f * f``, kernel values) is computed from the exact
polynomial pieces rather than from sampled grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InvalidArgument

_SUPPORT_SLACK = 1e-12


class PiecewisePolynomial:
    """A function equal to a polynomial on each interval and 0 outside.

    Polynomials are stored in the global variable ``t`` (ascending coefficients).
    At an interior breakpoint the right-hand piece is used; at the last
    breakpoint the left-hand piece is used.

    Args:
        breakpoints: Strictly increasing sequence of length ``p + 1``.
        pieces: ``p`` coefficient sequences.
    """

    def __init__(self, breakpoints, pieces):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise InvalidArgument("breakpoints must be strictly increasing with at least two entries")
        if len(pieces) != bp.size - 1:
            raise InvalidArgument("need exactly one polynomial per interval")
        self.breakpoints = bp
        self.pieces = [Polynomial(_coef_of(c)) for c in pieces]
        deg = max(len(p.coef) for p in self.pieces)
        coef = np.zeros((len(self.pieces), deg))
        for i, p in enumerate(self.pieces):
            coef[i, : len(p.coef)] = p.coef
        self._coef = coef

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def degree(self) -> int:
        return self._coef.shape[1] - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        bp = self.breakpoints
        idx = np.searchsorted(bp, t, side="right") - 1
        idx = np.where(t == bp[-1], len(self.pieces) - 1, idx)
        inside = (idx >= 0) & (idx < len(self.pieces))
        c = self._coef[np.clip(idx, 0, len(self.pieces) - 1)]
        # Horner in the global variable.
        val = np.zeros(t.shape)
        for j in range(c.shape[-1] - 1, -1, -1):
            val = val * t + c[..., j]
        out = np.where(inside, val, 0.0)
        return out[()] if out.ndim == 0 else out

    def scaled(self, factor: float, scale: float = 1.0) -> "PiecewisePolynomial":
        """``t -> scale * self(factor * t)``."""
        if factor <= 0:
            raise InvalidArgument("argument scale must be positive")
        arg = Polynomial([0.0, factor])
        return PiecewisePolynomial(self.breakpoints / factor, [scale * p(arg) for p in self.pieces])

    def integral(self) -> float:
        total = 0.0
        for a, b, p in zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces):
            q = p.integ()
            total += q(b) - q(a)
        return float(total)

    def squared(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.breakpoints, [p * p for p in self.pieces])

    def derivative(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.breakpoints, [p.deriv() if len(p.coef) > 1 else Polynomial([0.0]) for p in self.pieces])

    def sup_abs(self) -> float:
        """Maximum of ``|self|`` over the support, from breakpoints and critical points."""
        best = 0.0
        for a, b, p in zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces):
            cand = [a, b]
            if len(p.coef) > 2:
                for r in p.deriv().roots():
                    if abs(r.imag) < 1e-12 and a < r.real < b:
                        cand.append(r.real)
            best = max(best, float(np.max(np.abs(p(np.array(cand))))))
        return best

    def convolve(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        """Exact convolution ``(self * other)(t) = int self(s) other(t - s) ds``."""
        sums = np.unique(np.add.outer(self.breakpoints, other.breakpoints).ravel())
        out_bp = _merge_close(sums)
        t = Polynomial([0.0, 1.0])
        result = []
        for lo_t, hi_t in zip(out_bp[:-1], out_bp[1:]):
            mid = 0.5 * (lo_t + hi_t)
            acc = Polynomial([0.0])
            for a, b, g in zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces):
                for c, d, h in zip(other.breakpoints[:-1], other.breakpoints[1:], other.pieces):
                    # s ranges over [max(a, t - d), min(b, t - c)].
                    lo_const = a >= mid - d
                    hi_const = b <= mid - c
                    lo_mid = a if lo_const else mid - d
                    hi_mid = b if hi_const else mid - c
                    if hi_mid <= lo_mid:
                        continue
                    lo = Polynomial([a]) if lo_const else t - d
                    hi = Polynomial([b]) if hi_const else t - c
                    acc = acc + _integrate_product(g, h, lo, hi)
            result.append(acc.coef)
        return PiecewisePolynomial(out_bp, result)

    def trimmed(self, tol: float = 1e-14) -> "PiecewisePolynomial":
        """Drop leading/trailing pieces that vanish identically."""
        keep = [i for i, p in enumerate(self.pieces) if np.max(np.abs(p.coef)) > tol]
        lo, hi = keep[0], keep[-1]
        return PiecewisePolynomial(self.breakpoints[lo : hi + 2], [p.coef for p in self.pieces[lo : hi + 1]])


def _coef_of(c):
    if isinstance(c, Polynomial):
        c = c.coef
    return np.atleast_1d(np.asarray(c, dtype=float))


def _merge_close(values, tol=1e-13):
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] > tol:
            out.append(v)
    return np.array(out)


def _integrate_product(g: Polynomial, h: Polynomial, lo: Polynomial, hi: Polynomial) -> Polynomial:
    """``int_lo^hi g(s) h(t - s) ds`` as a polynomial in ``t``.

    ``lo`` and ``hi`` are polynomials in ``t`` (constants or ``t - c``).
    """
    t = Polynomial([0.0, 1.0])
    out = Polynomial([0.0])
    # h(t - s) = sum_k h_k (t - s)^k = sum_q t^q * P_q(s)
    hk = h.coef
    from math import comb

    for q in range(len(hk)):
        pq = Polynomial([0.0])
        for k in range(q, len(hk)):
            r = k - q
            pq = pq + Polynomial([0.0] * r + [hk[k] * comb(k, r) * (-1.0) ** r])
        antider = (g * pq).integ()
        out = out + (t**q) * (antider(hi) - antider(lo))
    return out


def box(width: float) -> PiecewisePolynomial:
    """The boxcar ``rect_width``: 1 on ``[-width/2, width/2]``."""
    if width <= 0:
        raise InvalidArgument("box width must be positive")
    return PiecewisePolynomial([-width / 2, width / 2], [[1.0]])


@dataclass(frozen=True, eq=False)
class BucketShape:
    """A normalized bucket-shaping function.

    Attributes:
        kind: ``"rect"`` or ``"boxes"``.
        box_widths: Boxcar widths being convolved (``(1.0,)`` for rect).
        scale: Argument scale; the shape is ``g(scale * t) / ||g(scale * .)||_2``.
        profile: The normalized function.
    """

    kind: str
    box_widths: tuple[float, ...]
    scale: float
    profile: PiecewisePolynomial = field(repr=False)

    @property
    def spec(self) -> str:
        if self.kind == "rect":
            return "rect"
        return "boxes:" + ",".join(_fmt(w) for w in self.box_widths) + ":" + _fmt(self.scale)

    @property
    def support_halfwidth(self) -> float:
        return float(self.profile.breakpoints[-1])

    @cached_property
    def sup_norm(self) -> float:
        return self.profile.sup_abs()

    @cached_property
    def self_conv(self) -> PiecewisePolynomial:
        return self.profile.convolve(self.profile).trimmed()

    def __call__(self, t):
        return self.profile(t)

    def __eq__(self, other):
        return isinstance(other, BucketShape) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)


def _fmt(x: float) -> str:
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def make_rect() -> BucketShape:
    """The unit rectangle, 1 on ``[-1/2, 1/2]``."""
    return BucketShape("rect", (1.0,), 1.0, box(1.0))


def make_box_convolution(box_widths, scale: float) -> BucketShape:
    """Normalized ``(rect_{a_1} * ... * rect_{a_k})(scale * t)``.

    Raises:
        InvalidArgument: if the scaled support exceeds ``[-1/2, 1/2]``.
    """
    widths = tuple(float(w) for w in box_widths)
    if not widths or any(w <= 0 for w in widths):
        raise InvalidArgument("box widths must be a non-empty sequence of positive reals")
    if scale <= 0:
        raise InvalidArgument("scale must be positive")
    half = sum(widths) / 2.0 / scale
    if half > 0.5 + _SUPPORT_SLACK:
        raise InvalidArgument(f"scaled support half-width {half} exceeds 1/2")
    g = box(widths[0])
    for w in widths[1:]:
        g = g.convolve(box(w))
    g = g.scaled(scale)
    norm = np.sqrt(g.squared().integral())
    profile = g.scaled(1.0, 1.0 / norm)
    if widths == (1.0,) and scale == 1.0:
        return make_rect()
    return BucketShape("boxes", widths, float(scale), profile)


def eval_f(shape: BucketShape, t):
    return shape.profile(t)


def eval_f_tensor(shape: BucketShape, v):
    """Product of ``f`` over the trailing axis of ``v``."""
    return np.prod(shape.profile(np.asarray(v, dtype=float)), axis=-1)


def self_convolution(shape: BucketShape) -> PiecewisePolynomial:
    return shape.self_conv


def sup_norm(shape: BucketShape) -> float:
    return shape.sup_norm


def l2_norm(shape: BucketShape) -> float:
    return float(np.sqrt(shape.profile.squared().integral()))


def tensor_sup_norm(shape: BucketShape, d: int) -> float:
    """``||f^{(x)d}||_inf = ||f||_inf ** d``."""
    if d < 1:
        raise InvalidArgument("d must be at least 1")
    return shape.sup_norm**d


def parse_shape(text: str) -> BucketShape:
    """Parse ``"rect"`` or ``"boxes:w1,w2,...:scale"``."""
    text = text.strip()
    if text.lower() == "rect":
        return make_rect()
    parts = text.split(":")
    if len(parts) != 3 or parts[0].lower() != "boxes":
        raise InvalidArgument(f"unknown shape {text!r}; expected 'rect' or 'boxes:w1,w2,...:scale'")
    try:
        widths = [float(w) for w in parts[1].split(",")]
        scale = float(parts[2])
    except ValueError:
        raise InvalidArgument(f"malformed shape spec {text!r}") from None
    return make_box_convolution(widths, scale)
