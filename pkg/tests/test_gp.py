import numpy as np
import pytest

from wlsh_krr.errors import InvalidArgument, NumericFailure
from wlsh_krr.gp import cholesky_with_jitter, make_gp_task, sample_gp
from wlsh_krr.kernels import kernel_matrix, laplace, matern52, squared_exponential


class TestSampleGp:
    def test_single_point(self):
        draws = sample_gp(np.array([[0.5]]), laplace(), seed=0, size=20_000)
        assert draws.shape == (20_000, 1)
        assert abs(draws.mean()) < 4 / np.sqrt(20_000)
        assert abs(draws.var() - 1) < 4 * np.sqrt(2 / 20_000)

    def test_empirical_covariance(self, rng):
        X = rng.uniform(size=(5, 2))
        K = kernel_matrix(laplace(), X)
        draws = sample_gp(X, laplace(), seed=1, size=2000)
        C = draws.T @ draws / 2000
        # se of a product-moment estimate for Gaussian entries: sqrt((K_ii K_jj + K_ij^2) / N)
        se = np.sqrt((np.outer(np.diag(K), np.diag(K)) + K**2) / 2000)
        assert np.all(np.abs(C - K) <= 4 * se)

    def test_coincident_points(self):
        v = sample_gp(np.array([[0.3, 0.3], [0.3, 0.3]]), squared_exponential(), seed=2)
        assert abs(v[0] - v[1]) < 1e-3

    def test_marginal_variance(self, rng):
        X = rng.uniform(size=(3, 5))
        draws = sample_gp(X, matern52(), seed=3, size=5000)
        assert np.all(np.abs(draws.var(axis=0) - 1) < 4 * np.sqrt(2 / 5000))

    def test_reproducible(self, rng):
        X = rng.uniform(size=(10, 2))
        np.testing.assert_array_equal(sample_gp(X, laplace(), seed=5), sample_gp(X, laplace(), seed=5))

    def test_dense_cap(self, rng):
        with pytest.raises(InvalidArgument):
            sample_gp(rng.uniform(size=(10, 1)), laplace(), dense_cap=5)


class TestJitter:
    def test_escalates(self):
        K = np.ones((3, 3))  # rank one
        L, j = cholesky_with_jitter(K, 1e-16)
        assert j > 1e-16
        np.testing.assert_allclose(L @ L.T, K + j * np.eye(3), atol=1e-12)

    def test_failure(self):
        with pytest.raises(NumericFailure):
            cholesky_with_jitter(-np.eye(2))


class TestGpTask:
    def test_shapes_and_split_sizes(self):
        task = make_gp_task(5, laplace(), 400, 300, seed=0)
        assert task.points.shape == (400, 5)
        assert len(task.train_idx) == 300 and len(task.test_idx) == 100

    def test_desk_configuration(self):
        task = make_gp_task(5, squared_exponential(), 1200, 900, seed=1)
        assert task.X_train.shape == (900, 5) and task.X_test.shape == (300, 5)
        assert np.all((task.points >= 0) & (task.points <= 1))
        np.testing.assert_array_equal(np.sort(np.concatenate([task.train_idx, task.test_idx])), np.arange(1200))
        assert task.noise_sd == 0.1

    def test_labels_are_noisy_values(self):
        task = make_gp_task(2, laplace(), 500, 400, noise_sd=0.2, seed=2)
        noise = task.labels - task.values
        assert abs(noise.std() - 0.2) < 0.03

    def test_reproducible(self):
        a = make_gp_task(3, laplace(), 100, 80, seed=4)
        b = make_gp_task(3, laplace(), 100, 80, seed=4)
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.labels, b.labels)
        np.testing.assert_array_equal(a.train_idx, b.train_idx)

    def test_split_seed_only_changes_partition(self):
        a = make_gp_task(3, laplace(), 100, 80, seed=4, split_seed=1)
        b = make_gp_task(3, laplace(), 100, 80, seed=4, split_seed=2)
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.train_idx, b.train_idx)

    def test_bad_split(self):
        with pytest.raises(InvalidArgument):
            make_gp_task(2, laplace(), 100, 100)
