import struct

import numpy as np
import pytest

from wlsh_krr.errors import InvalidArgument
from wlsh_krr.kernels import laplace
from wlsh_krr.krr import fit_exact, fit_wlsh, predict
from wlsh_krr.serialize import load_model, load_sketch, save_model, save_sketch
from wlsh_krr.shapes import make_box_convolution
from wlsh_krr.sketch import build_sketch
from wlsh_krr.widths import gamma

SMOOTH, G7 = make_box_convolution([1, 0.25, 0.25], 2), gamma(7)


@pytest.fixture
def data(rng):
    X = rng.normal(size=(80, 3))
    return X, np.sin(X).sum(axis=1)


def _same(a, b):
    for f in ("widths", "shifts", "point_bucket", "point_weight", "bucket_keys", "bucket_start"):
        np.testing.assert_array_equal(getattr(a, f), getattr(b, f))
    assert (a.shape, a.dist, a.n, a.d, a.m, a.seed) == (b.shape, b.dist, b.n, b.d, b.m, b.seed)


class TestSketchContainer:
    def test_rebuild_from_points(self, tmp_path, data):
        X, _ = data
        sk = build_sketch(X, SMOOTH, G7, 9, seed=4)
        save_sketch(tmp_path / "s.bin", sk, points=X)
        _same(sk, load_sketch(tmp_path / "s.bin", points=X))

    def test_stored_buckets(self, tmp_path, data):
        X, _ = data
        sk = build_sketch(X, SMOOTH, G7, 5, seed=1)
        save_sketch(tmp_path / "s.bin", sk, store_buckets=True)
        _same(sk, load_sketch(tmp_path / "s.bin"))

    def test_needs_points(self, tmp_path, data):
        X, _ = data
        save_sketch(tmp_path / "s.bin", build_sketch(X, SMOOTH, G7, 2))
        with pytest.raises(InvalidArgument):
            load_sketch(tmp_path / "s.bin")

    def test_wrong_points(self, tmp_path, data):
        X, _ = data
        save_sketch(tmp_path / "s.bin", build_sketch(X, SMOOTH, G7, 2), points=X)
        with pytest.raises(InvalidArgument):
            load_sketch(tmp_path / "s.bin", points=X + 1e-9)

    def test_header_layout(self, tmp_path, data):
        X, _ = data
        save_sketch(tmp_path / "s.bin", build_sketch(X, SMOOTH, G7, 2, seed=7), points=X)
        raw = (tmp_path / "s.bin").read_bytes()
        assert raw[:8] == b"WLSHSKT\0"
        version, hlen = struct.unpack("<HI", raw[8:14])
        assert version == 1
        header = raw[14 : 14 + hlen].decode()
        for token in ('"d": 3', '"n": 80', '"m": 2', '"seed": 7', "boxes:1,0.25,0.25:2", "gamma:7"):
            assert token in header

    def test_bad_magic(self, tmp_path):
        (tmp_path / "x.bin").write_bytes(b"NOTASKETCH" * 4)
        with pytest.raises(InvalidArgument):
            load_sketch(tmp_path / "x.bin")


class TestModelContainer:
    def test_sketch_model(self, tmp_path, data, rng):
        X, y = data
        m = fit_wlsh(build_sketch(X, SMOOTH, G7, 6, seed=2), y, 1.0, center=True, train_points=X)
        save_model(tmp_path / "m.bin", m)
        m2 = load_model(tmp_path / "m.bin")
        Xq = rng.normal(size=(7, 3))
        np.testing.assert_array_equal(predict(m, Xq), predict(m2, Xq))
        assert m2.lam == 1.0 and m2.offset == m.offset

    def test_exact_model(self, tmp_path, data, rng):
        X, y = data
        m = fit_exact(laplace(1.5), X, y, 0.2)
        save_model(tmp_path / "m.bin", m)
        m2 = load_model(tmp_path / "m.bin")
        Xq = rng.normal(size=(7, 3))
        np.testing.assert_array_equal(predict(m, Xq), predict(m2, Xq))
        assert m2.kernel == m.kernel

    def test_sketch_model_needs_points(self, tmp_path, data):
        X, y = data
        m = fit_wlsh(build_sketch(X, SMOOTH, G7, 2), y, 1.0)
        with pytest.raises(InvalidArgument):
            save_model(tmp_path / "m.bin", m)
