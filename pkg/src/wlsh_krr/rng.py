"""Counter-based, splittable random streams.

Every hash instance of a sketch draws its parameters from its own substream,
addressed by ``(master seed, instance index)``.  Values are a pure function of
the key and the position in the stream, so a batch of instances can be drawn
in one vectorized call and still match instance-by-instance draws exactly.

The generator is SplitMix64 evaluated at explicit counters.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SUB = np.uint64(0xD1B54A32D192ED03)
_TWO_M53 = 2.0**-53


def _mix(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _seed_key(seed: int) -> np.uint64:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    lo = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    hi = np.uint64((seed >> 64) & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return _mix(_mix(lo + _GOLDEN) ^ hi)[()]


def child_keys(key, indices):
    """Keys of the substreams ``indices`` of the stream with key ``key``."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(np.uint64(key) ^ _mix((idx + np.uint64(1)) * _SUB))


def raw_bits(keys, start: int, count: int):
    """64-bit outputs at counters ``start .. start+count-1`` for each key.

    Returns an array of shape ``keys.shape + (count,)``.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    ctr = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = keys[..., None] + ctr * _GOLDEN
    return _mix(state)


def bits_to_open_unit(bits):
    """Map 64-bit words to doubles in (0, 1]."""
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53


def bits_to_half_open_unit(bits):
    """Map 64-bit words to doubles in [0, 1)."""
    return (bits >> np.uint64(11)).astype(np.float64) * _TWO_M53


class RandomStream:
    """A seedable random stream with cheap, order-independent substreams.

    Args:
        seed: Non-negative integer master seed.

    Example:
        >>> s = RandomStream(7).substream(3)
        >>> u = s.uniform(4)
    """

    def __init__(self, seed: int = 0, *, _key=None):
        self.seed = seed
        self.key = _seed_key(seed) if _key is None else np.uint64(_key)
        self.position = 0

    def substream(self, index: int) -> "RandomStream":
        """Independent child stream number ``index``."""
        return RandomStream(self.seed, _key=child_keys(self.key, index)[()])

    def _take(self, count: int):
        out = raw_bits(self.key, self.position, count)
        self.position += count
        return out

    def uniform(self, size: int) -> np.ndarray:
        """``size`` uniforms on [0, 1)."""
        return bits_to_half_open_unit(self._take(int(size)))

    def uniform_open(self, size: int) -> np.ndarray:
        """``size`` uniforms on (0, 1]; never exactly 0."""
        return bits_to_open_unit(self._take(int(size)))

    def exponential(self, size: int) -> np.ndarray:
        """Unit-rate exponentials by inverse CDF, ``-log(u)`` with u in (0, 1]."""
        return -np.log(self.uniform_open(size))
