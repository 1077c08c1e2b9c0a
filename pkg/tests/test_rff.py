import math

import numpy as np
import pytest

from wlsh_krr.errors import InvalidArgument
from wlsh_krr.rff import build_rff, featurize, fit_rff, predict_rff


class TestBuildRff:
    def test_reproducible(self):
        a, b = build_rff(3, 20, seed=4), build_rff(3, 20, seed=4)
        np.testing.assert_array_equal(a.frequencies, b.frequencies)
        np.testing.assert_array_equal(a.phases, b.phases)

    def test_single_feature(self):
        m = build_rff(2, 1, seed=0)
        assert m.D == 1 and m.frequencies.shape == (1, 2) and m.phases.shape == (1,)

    def test_frequency_variance(self):
        m = build_rff(1, 100_000, seed=1)
        assert abs(m.frequencies.var() - 2.0) <= 0.05

    def test_phases_in_range(self):
        p = build_rff(2, 10_000, seed=2).phases
        assert p.min() >= 0 and p.max() < 2 * math.pi

    def test_bad(self):
        with pytest.raises(InvalidArgument):
            build_rff(2, 0)


class TestFeaturize:
    def test_formula(self, rng):
        m = build_rff(3, 8, seed=3)
        x = rng.normal(size=(2, 3))
        expect = math.sqrt(2 / 8) * np.cos(x @ m.frequencies.T + m.phases)
        np.testing.assert_allclose(featurize(m, x), expect, rtol=1e-14)

    def test_diagonal_expectation(self, rng):
        x = rng.normal(size=(1, 4))
        vals = []
        for s in range(5):
            phi = featurize(build_rff(4, 10_000, seed=s), x)[0]
            vals.append(float(phi @ phi))
        assert abs(np.mean(vals) - 1) <= 0.02
        assert min(vals) >= 0

    def test_kernel_expectation(self, rng):
        X = rng.normal(size=(10, 3)) * 0.5
        Y = X + rng.normal(size=(10, 3)) * 0.4
        D = 10_000
        phi = featurize(build_rff(3, D, seed=7), np.vstack([X, Y]))
        px, py = phi[:10], phi[10:]
        for i in range(10):
            terms = D * px[i] * py[i]
            est, se = terms.mean(), terms.std(ddof=1) / math.sqrt(D)
            assert abs(est - math.exp(-np.sum((X[i] - Y[i]) ** 2))) <= 3 * se + 1e-12

    def test_symmetric_estimate(self, rng):
        phi = featurize(build_rff(2, 64, seed=1), rng.normal(size=(6, 2)))
        G = phi @ phi.T
        np.testing.assert_allclose(G, G.T, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgument):
            featurize(build_rff(2, 4), np.zeros((3, 3)))


class TestFitRff:
    def test_zero_labels(self, rng):
        phi = featurize(build_rff(2, 30), rng.normal(size=(20, 2)))
        w, _ = fit_rff(phi, np.zeros(20), 1.0)
        np.testing.assert_array_equal(w, 0.0)

    def test_overparameterized_interpolation(self, rng):
        # d = 3 keeps rows well separated so the feature matrix is well conditioned
        X, y = rng.normal(size=(40, 3)), rng.normal(size=40)
        m = build_rff(3, 400, seed=5)
        w, stats = fit_rff(featurize(m, X), y, 1e-8, tol=1e-12, max_iter=5000)
        assert np.sqrt(np.mean((predict_rff(m, w, X) - y) ** 2)) <= 1e-3

    def test_primal_dual(self, rng):
        X, y = rng.normal(size=(100, 3)), rng.normal(size=100)
        m = build_rff(3, 60, seed=8)
        phi = featurize(m, X)
        lam = 0.5
        w, _ = fit_rff(phi, y, lam, tol=1e-13, max_iter=5000)
        alpha = np.linalg.solve(phi @ phi.T + lam * np.eye(100), y)
        Xq = rng.normal(size=(20, 3))
        np.testing.assert_allclose(predict_rff(m, w, Xq), featurize(m, Xq) @ (phi.T @ alpha), atol=1e-6)

    def test_bad_lambda(self, rng):
        with pytest.raises(InvalidArgument):
            fit_rff(np.ones((3, 2)), np.zeros(3), 0.0)
