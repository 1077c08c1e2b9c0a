"""Persisting sketches and fitted models.

A sketch file needs only the seed and settings; buckets are rebuilt from the
training points on load, and a digest guards against loading it with the
wrong points.  Buckets can be stored too for a self-contained file.
"""

import tempfile
from pathlib import Path

import numpy as np

from wlsh_krr import build_sketch, fit_wlsh, gamma, make_box_convolution, predict
from wlsh_krr.serialize import load_model, load_sketch, save_model, save_sketch

rng = np.random.default_rng(3)
X = rng.normal(size=(5000, 4))
y = np.sin(X).sum(axis=1)
sk = build_sketch(X, make_box_convolution([1, 0.25, 0.25], 2), gamma(7), 50, seed=7)

with tempfile.TemporaryDirectory() as tmp:
    light, full, model_path = Path(tmp) / "light.skt", Path(tmp) / "full.skt", Path(tmp) / "model.bin"
    save_sketch(light, sk, points=X)
    save_sketch(full, sk, store_buckets=True)
    print(f"sketch without buckets {light.stat().st_size:>10,d} bytes")
    print(f"sketch with buckets    {full.stat().st_size:>10,d} bytes")
    again = load_sketch(light, points=X)
    b = rng.normal(size=5000)
    print("rebuilt sketch gives identical products:", np.array_equal(sk @ b, again @ b))

    model = fit_wlsh(sk, y, 5.0, center=True, train_points=X)
    save_model(model_path, model)
    Xq = rng.normal(size=(5, 4))
    print("reloaded model predictions match:", np.array_equal(predict(model, Xq), predict(load_model(model_path), Xq)))
