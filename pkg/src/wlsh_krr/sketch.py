"""The WLSH estimator as an implicit ``n x n`` matrix.

A sketch holds ``m`` independent hash instances.  For instance ``s`` each
training point ``i`` stores its bucket and its weight
``f^{(x)d}(residual_s(x^i))``.  The sketched kernel is

    K~[i, j] = (1/m) sum_s [bucket_s(i) == bucket_s(j)] w_s[i] w_s[j],

and ``K~ @ beta`` costs ``O(n m)``: sum ``beta_i w_s[i]`` into bucket loads,
then read each point's load back and scale by its weight.

Buckets of all instances share one global index space; instance ``s`` owns
the contiguous range ``bucket_start[s]:bucket_start[s+1]`` of
``bucket_keys``.  Keys are the full integer coordinate vectors, so distinct
cells never collide.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from .errors import InvalidArgument
from .hashing import LshParams, round_half_away, sample_lsh_batch, scaled_coordinates
from .rng import _mix
from .shapes import BucketShape
from .widths import WidthDistribution

# Rows of (instance, coords) keys deduplicated per np.unique call.
CHUNK_ROWS = 2**20


@dataclass(eq=False)
class SketchInstance:
    """Read-only view of one hash instance of a sketch."""

    params: LshParams
    point_weight: np.ndarray
    point_bucket: np.ndarray  # local bucket index per point
    bucket_keys: np.ndarray  # (buckets, d) coordinates

    @property
    def n(self) -> int:
        return self.point_weight.shape[0]

    def bucket_of(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.bucket_keys[self.point_bucket[i]])

    @property
    def point_coords(self) -> np.ndarray:
        return self.bucket_keys[self.point_bucket]

    @cached_property
    def buckets(self) -> dict[tuple[int, ...], np.ndarray]:
        """Bucket coordinates -> member point indices."""
        order = np.argsort(self.point_bucket, kind="stable")
        counts = np.bincount(self.point_bucket, minlength=self.bucket_keys.shape[0])
        members = np.split(order, np.cumsum(counts)[:-1])
        return {tuple(int(c) for c in key): mem for key, mem in zip(self.bucket_keys, members)}


def bucket_load(inst: SketchInstance, beta, b) -> float:
    """``sum_{i in bucket b} beta_i * w[i]``; 0 for a bucket with no members."""
    members = inst.buckets.get(tuple(int(c) for c in b))
    if members is None:
        return 0.0
    beta = np.asarray(beta, dtype=float)
    return float(np.dot(beta[members], inst.point_weight[members]))


@dataclass(eq=False)
class WlshSketch:
    shape: BucketShape
    dist: WidthDistribution
    n: int
    d: int
    m: int
    seed: int
    widths: np.ndarray  # (m, d)
    shifts: np.ndarray  # (m, d)
    point_bucket: np.ndarray  # (m, n) global bucket index
    point_weight: np.ndarray  # (m, n)
    bucket_keys: np.ndarray  # (B, d)
    bucket_start: np.ndarray  # (m + 1,)

    @property
    def num_buckets(self) -> int:
        return self.bucket_keys.shape[0]

    @property
    def nbytes(self) -> int:
        arrays = (self.widths, self.shifts, self.point_bucket, self.point_weight, self.bucket_keys, self.bucket_start)
        return int(sum(a.nbytes for a in arrays))

    def params(self, s: int) -> LshParams:
        return LshParams(self.widths[s].copy(), self.shifts[s].copy())

    def instance(self, s: int) -> SketchInstance:
        if not 0 <= s < self.m:
            raise InvalidArgument(f"instance index {s} out of range for m={self.m}")
        lo, hi = self.bucket_start[s], self.bucket_start[s + 1]
        return SketchInstance(
            self.params(s), self.point_weight[s], self.point_bucket[s] - lo, self.bucket_keys[lo:hi]
        )

    @cached_property
    def _bucket_instance(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), np.diff(self.bucket_start))

    def loads(self, beta) -> np.ndarray:
        """Load of every bucket of every instance, indexed globally."""
        beta = self._check_beta(beta)
        contrib = self.point_weight * beta[None, :]
        return np.bincount(self.point_bucket.ravel(), weights=contrib.ravel(), minlength=self.num_buckets)

    def _check_beta(self, beta):
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.n,):
            raise InvalidArgument(f"vector has shape {beta.shape}, sketch has n={self.n}")
        return beta

    def matvec(self, beta) -> np.ndarray:
        return matvec(self, beta)

    __matmul__ = matvec


def _row_hash(rows):
    h = np.full(rows.shape[0], 0x243F6A8885A308D3, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for col in rows.T:
            h = _mix(h ^ (col.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)))
    return h


def group_rows(inst, coords):
    """Exact grouping of ``(inst, coords)`` rows.

    Rows are ordered by instance, then by a 64-bit row hash; equal rows are
    verified coordinate by coordinate.  If two distinct rows share a hash the
    grouping falls back to a lexicographic ``np.unique``.

    Returns:
        ``(group_inst, group_coords, inverse)``.
    """
    h = _row_hash(coords)
    order = np.lexsort((h, inst))
    hs, ins, rs = h[order], inst[order], coords[order]
    same_hash = (hs[1:] == hs[:-1]) & (ins[1:] == ins[:-1])
    same_row = same_hash & np.all(rs[1:] == rs[:-1], axis=1)
    if np.any(same_hash & ~same_row):
        uniq, inv = np.unique(np.hstack([inst[:, None], coords]), axis=0, return_inverse=True)
        return uniq[:, 0], uniq[:, 1:], inv.ravel()
    new = np.ones(len(order), dtype=bool)
    new[1:] = ~same_row
    gid = np.cumsum(new) - 1
    inverse = np.empty(len(order), dtype=np.int64)
    inverse[order] = gid
    return ins[new], rs[new], inverse


def _hash_chunk(X, widths, shifts, shape):
    """Coordinates ``(c, n, d)`` and weights ``(c, n)`` for a block of instances."""
    t = scaled_coordinates(widths[:, None, :], shifts[:, None, :], X[None, :, :])
    coords = round_half_away(t)
    weights = np.prod(shape.profile(coords - t), axis=-1)
    return coords.astype(np.int64), weights


def _instances_per_chunk(n, d):
    return max(1, CHUNK_ROWS // max(1, n))


def build_sketch(points, shape: BucketShape, dist: WidthDistribution, m: int, seed: int = 0) -> WlshSketch:
    """Hash ``points`` with ``m`` independent grids drawn from substreams of ``seed``.

    Instance ``s`` depends only on ``(seed, s)``, never on ``m`` or on how
    instances are batched.

    Raises:
        InvalidArgument: for empty input, ``m < 1`` or non-finite coordinates.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidArgument("points must be a non-empty (n, d) array")
    if int(m) != m or m < 1:
        raise InvalidArgument("m must be a positive integer")
    if not np.all(np.isfinite(X)):
        raise InvalidArgument("points contain non-finite coordinates")
    n, d = X.shape
    m = int(m)
    widths = np.empty((m, d))
    shifts = np.empty((m, d))
    point_bucket = np.empty((m, n), dtype=np.int64)
    point_weight = np.empty((m, n))
    keys, starts = [], [0]
    step = _instances_per_chunk(n, d)
    total = 0
    for s0 in range(0, m, step):
        s1 = min(m, s0 + step)
        w, z = sample_lsh_batch(d, dist, seed, np.arange(s0, s1))
        widths[s0:s1], shifts[s0:s1] = w, z
        coords, weights = _hash_chunk(X, w, z, shape)
        point_weight[s0:s1] = weights
        c = s1 - s0
        inst = np.repeat(np.arange(c, dtype=np.int64), n)
        g_inst, g_coords, inv = group_rows(inst, coords.reshape(c * n, d))
        point_bucket[s0:s1] = inv.reshape(c, n) + total
        keys.append(g_coords)
        counts = np.bincount(g_inst, minlength=c)
        starts.extend((total + np.cumsum(counts)).tolist())
        total += g_coords.shape[0]
    return WlshSketch(
        shape, dist, n, d, m, int(seed), widths, shifts, point_bucket, point_weight,
        np.vstack(keys), np.asarray(starts, dtype=np.int64),
    )


def matvec(sketch: WlshSketch, beta) -> np.ndarray:
    """``K~ @ beta`` in ``O(n m)``, diagonal terms included."""
    loads = sketch.loads(beta)
    return np.sum(sketch.point_weight * loads[sketch.point_bucket], axis=0) / sketch.m


def instance_quadratic_forms(sketch: WlshSketch, beta) -> np.ndarray:
    """``beta^T K~^s beta`` for every instance ``s``: the sum of squared bucket loads."""
    loads = sketch.loads(beta)
    return np.bincount(sketch._bucket_instance, weights=loads**2, minlength=sketch.m)


def _check_index(sketch, i):
    if not 0 <= i < sketch.n:
        raise InvalidArgument(f"point index {i} out of range for n={sketch.n}")


def instance_entries(sketch: WlshSketch, i: int, j: int) -> np.ndarray:
    """Single-instance estimates ``K~^s[i, j]`` for all ``s``."""
    _check_index(sketch, i)
    _check_index(sketch, j)
    same = sketch.point_bucket[:, i] == sketch.point_bucket[:, j]
    return np.where(same, sketch.point_weight[:, i] * sketch.point_weight[:, j], 0.0)


def estimate_entry(sketch: WlshSketch, i: int, j: int) -> float:
    """``K~[i, j]`` averaged over instances."""
    return float(np.mean(instance_entries(sketch, i, j)))


def _incidence(sketch: WlshSketch, instances=None):
    rows = np.broadcast_to(np.arange(sketch.n), sketch.point_bucket.shape)
    if instances is not None:
        sel = np.atleast_1d(instances)
        return sparse.csr_matrix(
            (sketch.point_weight[sel].ravel(), (rows[sel].ravel(), sketch.point_bucket[sel].ravel())),
            shape=(sketch.n, sketch.num_buckets),
        )
    return sparse.csr_matrix(
        (sketch.point_weight.ravel(), (rows.ravel(), sketch.point_bucket.ravel())),
        shape=(sketch.n, sketch.num_buckets),
    )


def dense_matrix(sketch: WlshSketch) -> np.ndarray:
    """Dense ``K~`` (desk-scale use only)."""
    S = _incidence(sketch)
    return np.asarray((S @ S.T).todense()) / sketch.m


def instance_dense_matrix(sketch: WlshSketch, s: int) -> np.ndarray:
    """Dense single-instance matrix ``K~^s``."""
    if not 0 <= s < sketch.m:
        raise InvalidArgument(f"instance index {s} out of range for m={sketch.m}")
    S = _incidence(sketch, s)
    return np.asarray((S @ S.T).todense())


def query_buckets(sketch: WlshSketch, Xq) -> tuple[np.ndarray, np.ndarray]:
    """Global bucket index (``-1`` if empty) and weight of queries, per instance.

    Returns:
        ``(buckets, weights)``, each of shape ``(m, q)``.
    """
    Xq = np.asarray(Xq, dtype=float)
    if Xq.ndim == 1:
        Xq = Xq[None, :]
    if Xq.ndim != 2 or Xq.shape[1] != sketch.d:
        raise InvalidArgument(f"queries must have dimension {sketch.d}")
    q = Xq.shape[0]
    buckets = np.full((sketch.m, q), -1, dtype=np.int64)
    weights = np.zeros((sketch.m, q))
    if q == 0:
        return buckets, weights
    step = max(1, CHUNK_ROWS // max(1, q + sketch.n))
    for s0 in range(0, sketch.m, step):
        s1 = min(sketch.m, s0 + step)
        c = s1 - s0
        coords, w = _hash_chunk(Xq, sketch.widths[s0:s1], sketch.shifts[s0:s1], sketch.shape)
        weights[s0:s1] = w
        lo, hi = sketch.bucket_start[s0], sketch.bucket_start[s1]
        n_train = hi - lo
        inst = np.concatenate([sketch._bucket_instance[lo:hi] - s0, np.repeat(np.arange(c, dtype=np.int64), q)])
        rows = np.vstack([sketch.bucket_keys[lo:hi], coords.reshape(c * q, sketch.d)])
        _, _, inv = group_rows(inst, rows)
        lookup = np.full(inv.max() + 1, -1, dtype=np.int64)
        lookup[inv[:n_train]] = np.arange(lo, hi)
        buckets[s0:s1] = lookup[inv[n_train:]].reshape(c, q)
    return buckets, weights


def out_of_sample_weights(sketch: WlshSketch, x) -> list[tuple[tuple[int, ...], float]]:
    """Per instance, the bucket coordinates ``x`` hashes to and its weight."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sketch.d,):
        raise InvalidArgument(f"query must have dimension {sketch.d}")
    coords, w = _hash_chunk(x[None, :], sketch.widths, sketch.shifts, sketch.shape)
    return [(tuple(int(c) for c in coords[s, 0]), float(w[s, 0])) for s in range(sketch.m)]


def predict(sketch: WlshSketch, beta, Xq) -> np.ndarray:
    """``(1/m) sum_s load_s(bucket_s(x)) * w_s(x)`` for each query row."""
    loads = sketch.loads(beta)
    buckets, weights = query_buckets(sketch, Xq)
    hit = buckets >= 0
    vals = np.where(hit, loads[np.where(hit, buckets, 0)], 0.0) * weights
    return vals.sum(axis=0) / sketch.m
