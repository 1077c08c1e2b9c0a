"""Width densities for the random grid: integer-shape, unit-rate Gamma laws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidArgument
from .rng import RandomStream


@dataclass(frozen=True)
class WidthDistribution:
    """Gamma(k, 1) law with density ``w**(k-1) * exp(-w) / (k-1)!``.

    Attributes:
        shape_k: Positive integer shape parameter.
    """

    shape_k: int

    def __post_init__(self):
        if int(self.shape_k) != self.shape_k or self.shape_k < 1:
            raise InvalidArgument(f"Gamma shape must be a positive integer, got {self.shape_k!r}")

    @property
    def spec(self) -> str:
        return f"gamma:{self.shape_k}"

    @property
    def mean(self) -> float:
        return float(self.shape_k)

    def tail_cutoff(self) -> float:
        """A width beyond which the remaining probability mass is below 1e-14."""
        return 40.0 + 10.0 * self.shape_k

    def pdf(self, w):
        return pdf(self, w)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, special.gammainc(self.shape_k, np.maximum(w, 0.0)), 0.0)


def gamma(k: int) -> WidthDistribution:
    return WidthDistribution(k)


def pdf(dist: WidthDistribution, w):
    """Density at ``w`` (0 for ``w <= 0``).  Accepts scalars or arrays."""
    k = dist.shape_k
    w = np.asarray(w, dtype=float)
    pos = np.maximum(w, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp((k - 1) * np.log(pos) - pos - math.lgamma(k)) if k > 1 else np.exp(-pos)
    out = np.where(w > 0, val, 0.0)
    return out[()] if out.ndim == 0 else out


def widths_from_uniforms(dist: WidthDistribution, u: np.ndarray) -> np.ndarray:
    """Sum ``k`` unit exponentials per width.

    ``u`` holds uniforms on (0, 1] with trailing axis of length ``d*k``; the
    ``k`` uniforms for width ``l`` are contiguous.
    """
    k = dist.shape_k
    e = -np.log(u)
    return e.reshape(u.shape[:-1] + (-1, k)).sum(axis=-1)


def sample_width(dist: WidthDistribution, rng: RandomStream, size: int | None = None):
    """Draw one width (or ``size`` widths) from ``dist``."""
    count = 1 if size is None else int(size)
    w = widths_from_uniforms(dist, rng.uniform_open(count * dist.shape_k)[None, :])[0]
    return float(w[0]) if size is None else w


def parse_dist(text: str) -> WidthDistribution:
    """Parse a CLI string such as ``"gamma:2"``."""
    parts = text.strip().split(":")
    if len(parts) != 2 or parts[0].lower() != "gamma":
        raise InvalidArgument(f"unknown width distribution {text!r}; expected 'gamma:<k>'")
    try:
        k = int(parts[1])
    except ValueError:
        raise InvalidArgument(f"Gamma shape must be an integer in {text!r}") from None
    return WidthDistribution(k)
