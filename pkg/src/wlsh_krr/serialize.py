"""Binary containers for sketches and fitted models.

Layout (all integers little-endian)::

    magic    8 bytes   b"WLSHSKT\\0" (sketch) or b"WLSHMDL\\0" (model)
    version  uint16
    hlen     uint32    length of the JSON header
    header   hlen bytes, UTF-8 JSON
    arrays   zero or more .npy records, in the order listed in header["arrays"]

A sketch header carries ``d, n, m, shape, dist, seed`` and a SHA-256 of the
training points.  Without stored arrays the sketch is rebuilt on load from
the points and seed, which reproduces it bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .kernels import parse_kernel
from .krr import KrrModel
from .shapes import parse_shape
from .sketch import WlshSketch, build_sketch
from .widths import parse_dist

SKETCH_MAGIC = b"WLSHSKT\0"
MODEL_MAGIC = b"WLSHMDL\0"
VERSION = 1
_SKETCH_ARRAYS = ("widths", "shifts", "point_bucket", "point_weight", "bucket_keys", "bucket_start")


def points_digest(points) -> str:
    return hashlib.sha256(np.ascontiguousarray(points, dtype=np.float64).tobytes()).hexdigest()


def _write(path, magic, header, arrays):
    blob = json.dumps(header, sort_keys=True).encode()
    with Path(path).open("wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<HI", VERSION, len(blob)))
        fh.write(blob)
        for a in arrays:
            np.lib.format.write_array(fh, np.ascontiguousarray(a), allow_pickle=False)


def _read(path, magic):
    with Path(path).open("rb") as fh:
        got = fh.read(8)
        if got != magic:
            raise InvalidArgument(f"{path}: not a {magic[:-1].decode()} container")
        version, hlen = struct.unpack("<HI", fh.read(6))
        if version != VERSION:
            raise InvalidArgument(f"{path}: unsupported container version {version}")
        header = json.loads(fh.read(hlen).decode())
        arrays = {name: np.lib.format.read_array(fh, allow_pickle=False) for name in header.get("arrays", [])}
    return header, arrays


def _sketch_header(sketch: WlshSketch, points=None, store_buckets=False):
    return {
        "kind": "wlsh_sketch", "d": sketch.d, "n": sketch.n, "m": sketch.m, "shape": sketch.shape.spec,
        "dist": sketch.dist.spec, "seed": sketch.seed,
        "points_sha256": None if points is None else points_digest(points),
        "arrays": list(_SKETCH_ARRAYS) if store_buckets else [],
    }


def save_sketch(path, sketch: WlshSketch, points=None, store_buckets: bool = False) -> None:
    """Write a sketch; buckets are stored only when ``store_buckets`` is set."""
    header = _sketch_header(sketch, points, store_buckets)
    arrays = [getattr(sketch, a) for a in _SKETCH_ARRAYS] if store_buckets else []
    _write(path, SKETCH_MAGIC, header, arrays)


def _sketch_from(header, arrays, points):
    shape, dist = parse_shape(header["shape"]), parse_dist(header["dist"])
    if arrays:
        return WlshSketch(shape, dist, header["n"], header["d"], header["m"], header["seed"],
                          *(arrays[a] for a in _SKETCH_ARRAYS))
    if points is None:
        raise InvalidArgument("sketch was saved without buckets; pass the training points to rebuild it")
    points = np.asarray(points, dtype=float)
    if points.shape != (header["n"], header["d"]):
        raise InvalidArgument(f"points have shape {points.shape}, sketch expects ({header['n']}, {header['d']})")
    if header.get("points_sha256") and header["points_sha256"] != points_digest(points):
        raise InvalidArgument("points differ from those the sketch was built on")
    return build_sketch(points, shape, dist, header["m"], header["seed"])


def load_sketch(path, points=None) -> WlshSketch:
    header, arrays = _read(path, SKETCH_MAGIC)
    return _sketch_from(header, arrays, points)


def save_model(path, model: KrrModel) -> None:
    """Write coefficients, lambda, backend spec and training points."""
    if model.train_points is None:
        raise InvalidArgument("model has no training points to store")
    header = {"kind": "krr_model", "backend": model.backend, "lambda": model.lam, "offset": model.offset,
              "arrays": ["coefficients", "train_points"]}
    if model.backend == "exact":
        header["kernel"] = model.kernel.spec
        header["lengthscale"] = model.kernel.lengthscale
    else:
        header["sketch"] = _sketch_header(model.sketch, model.train_points)
    _write(path, MODEL_MAGIC, header, [model.coefficients, model.train_points])


def load_model(path) -> KrrModel:
    header, arrays = _read(path, MODEL_MAGIC)
    pts = arrays["train_points"]
    if header["backend"] == "exact":
        spec = parse_kernel(header["kernel"])
        if header.get("lengthscale", 1.0) != 1.0:
            spec = type(spec)(spec.kind, spec.shape, spec.dist, header["lengthscale"])
        return KrrModel(arrays["coefficients"], header["lambda"], "exact", kernel=spec, train_points=pts,
                        offset=header["offset"])
    sketch = _sketch_from(header["sketch"], {}, pts)
    return KrrModel(arrays["coefficients"], header["lambda"], "sketch", sketch=sketch, train_points=pts,
                    offset=header["offset"])
