import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlsh_krr.errors import NumericFailure
from wlsh_krr.shapes import make_box_convolution, make_rect
from wlsh_krr.sketch import build_sketch, dense_matrix
from wlsh_krr.solver import DEFAULT_MAX_ITER, DEFAULT_TOL, conjugate_gradient
from wlsh_krr.widths import gamma


def _spd(rng, n, cond=100.0):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ np.diag(np.geomspace(1, cond, n)) @ Q.T


class TestConjugateGradient:
    def test_defaults(self):
        assert DEFAULT_TOL == 1e-6 and DEFAULT_MAX_ITER == 1000

    def test_identity_system(self, rng):
        b = rng.normal(size=7)
        x, st_ = conjugate_gradient(lambda v: np.zeros_like(v), b, lam=1.0)
        np.testing.assert_allclose(x, b, rtol=1e-15)
        assert st_.iterations == 1 and st_.converged

    def test_diagonal(self):
        x, st_ = conjugate_gradient(lambda v: np.array([1.0, 3.0]) * v, np.array([2.0, 8.0]), lam=1.0, tol=1e-12)
        np.testing.assert_allclose(x, [1.0, 2.0], rtol=1e-12)
        assert st_.converged

    def test_zero_rhs(self):
        x, st_ = conjugate_gradient(lambda v: 2 * v, np.zeros(4))
        np.testing.assert_array_equal(x, 0.0)
        assert st_.converged and st_.iterations == 0

    @pytest.mark.parametrize("shape,dist", [(make_rect(), gamma(2)), (make_box_convolution([1, 0.25, 0.25], 2), gamma(7))],
                             ids=["rect", "smooth"])
    def test_sketch_operator_matches_dense_solve(self, shape, dist, rng):
        n = 150
        X = rng.normal(size=(n, 3))
        sk = build_sketch(X, shape, dist, 20, seed=3)
        lam = n / 20
        b = rng.normal(size=n)
        x, st_ = conjugate_gradient(sk.matvec, b, lam, tol=1e-10)
        ref = np.linalg.solve(dense_matrix(sk) + lam * np.eye(n), b)
        assert st_.converged
        assert np.linalg.norm(x - ref) <= 1e-8 * np.linalg.norm(ref)

    def test_residual_guarantee(self, rng):
        A = _spd(rng, 60, 1e4)
        b = rng.normal(size=60)
        x, st_ = conjugate_gradient(lambda v: A @ v, b, lam=0.0, tol=1e-8)
        assert st_.converged
        assert np.linalg.norm(A @ x - b) <= 1e-8 * np.linalg.norm(b) * 1.0001
        assert st_.final_relative_residual <= 1e-8

    def test_non_convergence_flagged(self, rng):
        A = _spd(rng, 80, 1e6)
        b = rng.normal(size=80)
        x, st_ = conjugate_gradient(lambda v: A @ v, b, lam=0.0, tol=1e-14, max_iter=3)
        assert not st_.converged
        assert st_.iterations == 3
        assert np.all(np.isfinite(x))

    def test_nan_raises(self):
        with pytest.raises(NumericFailure):
            conjugate_gradient(lambda v: v * np.nan, np.ones(3), lam=1.0)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_monotone_residual(self, seed):
        r = np.random.default_rng(seed)
        A = _spd(r, 40, 1e3)
        b = r.normal(size=40)
        _, st_ = conjugate_gradient(lambda v: A @ v, b, lam=0.0, tol=1e-12, max_iter=200)
        h = np.asarray(st_.residual_history)
        assert np.all(np.diff(h) <= 10 * np.finfo(float).eps * h[:-1])

    def test_deterministic(self, rng):
        A = _spd(rng, 30)
        b = rng.normal(size=30)
        x1, _ = conjugate_gradient(lambda v: A @ v, b, 0.5)
        x2, _ = conjugate_gradient(lambda v: A @ v, b, 0.5)
        np.testing.assert_array_equal(x1, x2)
