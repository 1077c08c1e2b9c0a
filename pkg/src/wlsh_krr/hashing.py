"""Randomly shifted grids: sampling, bucket coordinates and in-bucket residuals.

A grid is given by per-axis widths ``w`` and shifts ``z`` with
``0 <= z_l <= w_l``.  A point ``x`` lands in the bucket with integer
coordinates ``round((x_l - z_l) / w_l)``; the residual
``coords + (z - x) / w`` locates it inside that bucket and always lies in
``[-1/2, 1/2]^d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .rng import RandomStream, bits_to_half_open_unit, bits_to_open_unit, child_keys, raw_bits
from .widths import WidthDistribution, widths_from_uniforms

# Scaled coordinates must stay well inside int64.
_COORD_LIMIT = 2.0**62


@dataclass(frozen=True, eq=False)
class LshParams:
    """One draw of grid widths and shifts."""

    widths: np.ndarray
    shifts: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.widths, dtype=float)
        z = np.asarray(self.shifts, dtype=float)
        if w.ndim != 1 or w.shape != z.shape:
            raise InvalidArgument("widths and shifts must be 1-d arrays of equal length")
        if np.any(~(w > 0)):
            raise InvalidArgument("widths must be positive")
        if np.any(z < 0) or np.any(z > w):
            raise InvalidArgument("shifts must lie in [0, widths]")
        object.__setattr__(self, "widths", w)
        object.__setattr__(self, "shifts", z)

    @property
    def dim(self) -> int:
        return self.widths.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LshParams):
            return NotImplemented
        return np.array_equal(self.widths, other.widths) and np.array_equal(self.shifts, other.shifts)


def draws_per_instance(dim: int, dist: WidthDistribution) -> int:
    return dim * dist.shape_k + dim


def _params_from_bits(bits, dim, dist):
    nw = dim * dist.shape_k
    widths = widths_from_uniforms(dist, bits_to_open_unit(bits[..., :nw]))
    shifts = widths * bits_to_half_open_unit(bits[..., nw : nw + dim])
    return widths, shifts


def sample_lsh(dim: int, dist: WidthDistribution, rng: RandomStream) -> LshParams:
    """Draw iid widths from ``dist`` and shifts uniform on ``[0, widths]``."""
    if dim < 1:
        raise InvalidArgument("dimension must be at least 1")
    count = draws_per_instance(dim, dist)
    bits = raw_bits(rng.key, rng.position, count)
    rng.position += count
    widths, shifts = _params_from_bits(bits, dim, dist)
    return LshParams(widths, shifts)


def sample_lsh_batch(dim: int, dist: WidthDistribution, seed: int, instances) -> tuple[np.ndarray, np.ndarray]:
    """Grid parameters for several instances at once.

    Row ``r`` equals ``sample_lsh(dim, dist, RandomStream(seed).substream(instances[r]))``.

    Returns:
        ``(widths, shifts)``, each of shape ``(len(instances), dim)``.
    """
    if dim < 1:
        raise InvalidArgument("dimension must be at least 1")
    keys = child_keys(RandomStream(seed).key, np.asarray(instances))
    bits = raw_bits(keys, 0, draws_per_instance(dim, dist))
    return _params_from_bits(bits, dim, dist)


def round_half_away(t):
    """Nearest integer, exact half-integers rounded away from zero."""
    t = np.asarray(t, dtype=float)
    whole = np.trunc(t)
    frac = t - whole  # exact in binary floating point
    return whole + np.where(np.abs(frac) >= 0.5, np.sign(t), 0.0)


def scaled_coordinates(widths, shifts, x):
    """``(x - z) / w`` with broadcasting; validates finiteness and range."""
    x = np.asarray(x, dtype=float)
    t = (x - shifts) / widths
    if not np.all(np.isfinite(t)):
        raise InvalidArgument("coordinates must be finite")
    if np.any(np.abs(t) >= _COORD_LIMIT):
        raise InvalidArgument("scaled coordinates exceed the 64-bit bucket range")
    return t


def _check_dim(params: LshParams, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (params.dim,):
        raise InvalidArgument(f"point has dimension {x.shape[-1:]}, grid has {params.dim}")
    return x


def hash_point(params: LshParams, x) -> tuple[int, ...]:
    """Bucket coordinates of a single point."""
    x = _check_dim(params, x)
    if x.ndim != 1:
        raise InvalidArgument("hash_point expects a single point")
    t = scaled_coordinates(params.widths, params.shifts, x)
    return tuple(int(c) for c in round_half_away(t).astype(np.int64))


def hash_points(params: LshParams, x) -> np.ndarray:
    """Bucket coordinates for an ``(n, d)`` array, as int64."""
    x = _check_dim(params, x)
    return round_half_away(scaled_coordinates(params.widths, params.shifts, x)).astype(np.int64)


def residual(params: LshParams, x) -> np.ndarray:
    """Offset of ``x`` inside its bucket, in units of the widths."""
    x = _check_dim(params, x)
    t = scaled_coordinates(params.widths, params.shifts, x)
    return round_half_away(t) - t
