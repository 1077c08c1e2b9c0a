import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlsh_krr.errors import InvalidArgument
from wlsh_krr.kernels import kernel_matrix, wlsh
from wlsh_krr.shapes import make_box_convolution, make_rect
from wlsh_krr.sketch import build_sketch, dense_matrix, instance_dense_matrix
from wlsh_krr.verify import (
    lower_bound_instance,
    loglog_slope,
    ose_epsilon,
    ose_trial,
    psd_bounds_check,
    quadratic_form_trials,
    recommended_m,
)
from wlsh_krr.widths import gamma

RECT, G2 = make_rect(), gamma(2)
SMOOTH, G7 = make_box_convolution([1, 0.25, 0.25], 2), gamma(7)


def _sandwich_holds(K, Kt, lam, eps):
    n = K.shape[0]
    A = K + lam * np.eye(n)
    B = Kt + lam * np.eye(n)
    lo = np.linalg.eigvalsh(B - (1 - eps) * A).min()
    hi = np.linalg.eigvalsh((1 + eps) * A - B).min()
    return lo >= -1e-9 and hi >= -1e-9


class TestOseEpsilon:
    def test_identical(self, rng):
        K = kernel_matrix(wlsh(RECT, G2), rng.uniform(size=(20, 2)))
        assert ose_epsilon(K, K, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_scalar(self):
        assert ose_epsilon([[1.0]], [[2.0]], 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_asymmetric_rejected(self):
        with pytest.raises(InvalidArgument):
            ose_epsilon([[1.0, 0.5], [0.4, 1.0]], np.eye(2), 1.0)

    def test_is_smallest_sandwich_epsilon(self, rng):
        X = rng.uniform(size=(40, 2))
        K = kernel_matrix(wlsh(RECT, G2), X)
        Kt = dense_matrix(build_sketch(X, RECT, G2, 30, seed=1))
        eps = ose_epsilon(K, Kt, 2.0)
        assert _sandwich_holds(K, Kt, 2.0, eps + 1e-9)
        assert not _sandwich_holds(K, Kt, 2.0, eps - 1e-3)

    @given(st.floats(1e-3, 1e3))
    @settings(max_examples=20, deadline=None)
    def test_scale_equivariant(self, c):
        r = np.random.default_rng(4)
        X = r.uniform(size=(15, 2))
        K = kernel_matrix(wlsh(RECT, G2), X)
        Kt = dense_matrix(build_sketch(X, RECT, G2, 5, seed=2))
        assert ose_epsilon(c * K, c * Kt, c * 0.5) == pytest.approx(ose_epsilon(K, Kt, 0.5), rel=1e-9)

    def test_convex_combination(self, rng):
        X = rng.uniform(size=(30, 2))
        K = kernel_matrix(wlsh(SMOOTH, G7), X)
        for seed in range(5):
            Kt = dense_matrix(build_sketch(X, SMOOTH, G7, 10, seed=seed))
            assert ose_epsilon(K, 0.5 * K + 0.5 * Kt, 1.0) <= ose_epsilon(K, Kt, 1.0) + 1e-12

    def test_slope_at_n64(self):
        ms = [16, 64, 256]
        X = np.random.default_rng(0).uniform(size=(64, 2))
        K = kernel_matrix(wlsh(RECT, G2), X)
        slopes = []
        for seed in range(10):
            eps = [ose_trial(X, RECT, G2, m, 1.0, seed * 1000 + m, K=K).epsilon_star for m in ms]
            slopes.append(loglog_slope(ms, eps))
        assert -0.65 <= np.median(slopes) <= -0.35

    def test_report_fields(self, rng):
        r = ose_trial(rng.uniform(size=(10, 1)), RECT, G2, 4, 1.0, seed=3)
        assert (r.m, r.n, r.lam, r.seed) == (4, 10, 1.0, 3)
        assert r.epsilon_star >= 0


class TestRecommendedM:
    def test_headline_value(self):
        assert recommended_m(512, 8.0) == math.ceil(8 * 64 * math.log(512))

    def test_scales_with_sup_norm(self):
        tri = make_box_convolution([1, 1], 2)
        assert recommended_m(100, 1.0, shape=tri, d=1) == math.ceil(8 * 3 * 100 * math.log(100))


class TestPsdBounds:
    def test_rect_max_at_most_n(self, rng):
        X = rng.uniform(size=(50, 2))
        sk = build_sketch(X, RECT, G2, 3, seed=0)
        for s in range(3):
            lo, hi, ok = psd_bounds_check(instance_dense_matrix(sk, s), RECT, 2)
            assert ok and hi <= 50 + 1e-8

    def test_single_point(self):
        sk = build_sketch(np.array([[0.2, 0.1, -0.3]]), SMOOTH, G7, 1, seed=4)
        A = instance_dense_matrix(sk, 0)
        assert A[0, 0] == pytest.approx(sk.point_weight[0, 0] ** 2)
        assert 0 <= A[0, 0] <= SMOOTH.sup_norm ** 6 + 1e-12
        assert psd_bounds_check(A, SMOOTH, 3)[2]

    @pytest.mark.parametrize("shape,dist", [(RECT, G2), (SMOOTH, G7)], ids=["rect", "smooth"])
    @pytest.mark.parametrize("d", [1, 3])
    def test_sweep(self, shape, dist, d):
        r = np.random.default_rng(d)
        for trial in range(50):
            n = int(r.integers(2, 60))
            X = r.uniform(size=(n, d)) * r.uniform(0.1, 5)
            sk = build_sketch(X, shape, dist, 1, seed=trial)
            assert psd_bounds_check(instance_dense_matrix(sk, 0), shape, d)[2]

    def test_violation_detected(self):
        assert not psd_bounds_check(-np.eye(3), RECT, 1)[2]
        assert not psd_bounds_check(10 * np.ones((3, 3)), RECT, 1)[2]


class TestLowerBoundInstance:
    def test_n8(self):
        pts, beta = lower_bound_instance(8, 1, 1.0)
        np.testing.assert_array_equal(pts[:, 0], [-1 / 8] * 4 + [1 / 8] * 4)
        np.testing.assert_array_equal(beta, [-1, -1, -1, -1, 1, 1, 1, 1])

    def test_exact_quadratic_form(self):
        n, lam = 64, 4.0
        pts, beta = lower_bound_instance(n, 1, lam)
        K = kernel_matrix(wlsh(RECT, G2), pts)
        assert beta @ K @ beta == pytest.approx(n * n * (1 - math.exp(-2 * lam / n)) / 2, rel=1e-9)

    def test_trailing_coordinates_zero(self):
        pts, _ = lower_bound_instance(16, 3, 2.0)
        np.testing.assert_array_equal(pts[:, 1:], 0.0)

    @pytest.mark.parametrize("n,lam", [(7, 0.5), (8, 2.0), (0, 0.1)])
    def test_bad(self, n, lam):
        with pytest.raises(InvalidArgument):
            lower_bound_instance(n, 1, lam)


class TestQuadraticFormTrials:
    def test_two_values_and_frequency(self):
        n, lam = 32, 2.0
        pts, beta = lower_bound_instance(n, 1, lam)
        res = quadratic_form_trials(pts, beta, trials=20_000, seed=5)
        assert set(res.histogram) <= {0.0, n * n / 2}
        p = 1 - math.exp(-2 * lam / n)
        assert abs(res.p_hat - p) <= 3 * math.sqrt(p * (1 - p) / 20_000)

    def test_mean_is_unbiased(self):
        n, lam = 32, 2.0
        pts, beta = lower_bound_instance(n, 2, lam)
        res = quadratic_form_trials(pts, beta, trials=20_000, seed=6)
        exact = beta @ kernel_matrix(wlsh(RECT, G2), pts) @ beta
        assert abs(res.values.mean() - exact) <= 3 * res.values.std(ddof=1) / math.sqrt(20_000)

    def test_reproducible(self):
        pts, beta = lower_bound_instance(16, 1, 1.0)
        a = quadratic_form_trials(pts, beta, trials=500, seed=1)
        b = quadratic_form_trials(pts, beta, trials=500, seed=1)
        np.testing.assert_array_equal(a.values, b.values)
