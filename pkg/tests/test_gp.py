# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from activeverify.exception import DimensionMismatchError
from activeverify.gp import (
    KernelParams,
    PredictiveDistribution,
    TrainingSet,
    fit,
    initial_params,
    kernel_eval,
    kernel_matrix,
    log_marginal_likelihood,
    maximize_likelihood,
    optimize_hyperparams,
    posterior_variance,
    predict,
    predict_many,
    prob_satisfaction,
    prob_satisfaction_moments,
)
from activeverify.grid import ParamGrid


def random_training(rng, n, dim):
    return TrainingSet(rng.uniform(0, 1, size=(n, dim)), rng.normal(size=n))


def random_params(rng, dim, jitter=0.0):
    return KernelParams(rng.uniform(0.5, 2.0), tuple(rng.uniform(0.1, 0.4, size=dim)), jitter)


def grid_points(rng, n, dim):
    """`n` distinct points of the 5-per-axis lattice on the unit cube, well separated for short lengthscales."""
    lattice = np.stack(np.meshgrid(*[np.linspace(0, 1, 5)] * dim, indexing='ij'), axis=-1).reshape(-1, dim)
    return lattice[rng.choice(lattice.shape[0], size=min(n, lattice.shape[0]), replace=False)]


def separated_params(rng, dim):
    return KernelParams(rng.uniform(0.5, 2.0), tuple(rng.uniform(0.1, 0.15, size=dim)))


class TestKernel:

    def test_zero_distance_gives_signal_variance(self):
        params = KernelParams(2.5, (1.0, 1.0))
        assert kernel_eval([0.3, -0.2], [0.3, -0.2], params) == pytest.approx(2.5)

    def test_closed_form(self):
        params = KernelParams(1.0, (1.0, 2.0))
        assert kernel_eval([0, 0], [1, 2], params) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_symmetry(self, rng):
        params = random_params(rng, 3)
        for _ in range(20):
            a, b = rng.normal(size=3), rng.normal(size=3)
            assert kernel_eval(a, b, params) == kernel_eval(b, a, params)

    def test_values_in_range(self, rng):
        params = random_params(rng, 2)
        a = rng.uniform(-3, 3, size=(30, 2))
        K = kernel_matrix(a, a, params)
        assert np.all(K > 0)
        assert np.all(K <= params.signal_variance + 1e-15)

    def test_dimension_mismatch(self):
        params = KernelParams(1.0, (1.0, 1.0))
        with pytest.raises(DimensionMismatchError):
            kernel_eval([0, 0, 0], [0, 0, 0], params)
        with pytest.raises(DimensionMismatchError):
            kernel_eval([0, 0], [0, 0, 0], params)

    @pytest.mark.parametrize('kwargs', [
        {'signal_variance': 0.0, 'lengthscales': (1.0,)},
        {'signal_variance': 1.0, 'lengthscales': (-1.0,)},
        {'signal_variance': 1.0, 'lengthscales': ()},
        {'signal_variance': 1.0, 'lengthscales': (1.0,), 'jitter': -1e-3},
    ])
    def test_invalid_params(self, kwargs):
        with pytest.raises(ValueError):
            KernelParams(**kwargs)

    def test_log_round_trip(self):
        params = KernelParams(2.0, (0.5, 3.0), 1e-6)
        again = KernelParams.from_log(params.to_log(), params.jitter)
        assert again.signal_variance == pytest.approx(2.0)
        assert again.lengthscales == pytest.approx((0.5, 3.0))
        assert again.jitter == 1e-6


class TestFit:

    def test_single_point_alpha(self):
        model = fit(TrainingSet([[0.0, 0.0]], [3.0]), KernelParams(2.0, (1.0, 1.0)))
        assert model.alpha[0] == pytest.approx(3.0 / (2.0 + model.params.jitter))

    def test_jitter_recorded(self):
        model = fit(TrainingSet([[0.0]], [1.0]), KernelParams(4.0, (1.0,)))
        assert model.params.jitter == pytest.approx(4e-10)

    def test_factor_identity(self, rng):
        training = random_training(rng, 8, 2)
        model = fit(training, random_params(rng, 2))
        K = kernel_matrix(training.points, training.points, model.params) + model.params.jitter * np.eye(8)
        L = model.chol_factor
        assert np.linalg.norm(L @ L.T - K) <= 1e-8 * np.linalg.norm(K)

    def test_alpha_matches_dense_solve(self, rng):
        training = TrainingSet(grid_points(rng, 3, 2), rng.normal(size=3))
        model = fit(training, separated_params(rng, 2))
        K = kernel_matrix(training.points, training.points, model.params) + model.params.jitter * np.eye(3)
        expected = np.linalg.solve(K, training.measurements)
        np.testing.assert_allclose(model.alpha, expected, rtol=1e-8, atol=1e-10)

    def test_rejects_empty_and_duplicates(self):
        params = KernelParams(1.0, (1.0,))
        with pytest.raises(ValueError):
            fit(TrainingSet.empty(1), params)
        with pytest.raises(ValueError):
            fit(TrainingSet([[0.0], [0.0]], [1.0, 2.0]), params)

    def test_deduplicated_keeps_first(self):
        training = TrainingSet([[0.0], [1.0], [0.0]], [1.0, 2.0, 3.0]).deduplicated()
        np.testing.assert_array_equal(training.points[:, 0], [0.0, 1.0])
        np.testing.assert_array_equal(training.measurements, [1.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fit(TrainingSet([[0.0, 1.0]], [1.0]), KernelParams(1.0, (1.0,)))


class TestPredict:

    def test_interpolation(self, rng):
        for _ in range(200):
            dim = int(rng.integers(1, 4))
            n = int(rng.integers(1, 9))
            training = TrainingSet(grid_points(rng, n, dim), rng.normal(size=min(n, 5 ** dim)))
            params = separated_params(rng, dim)
            model = fit(training, params)
            assert model.params.jitter <= 1e-10 * params.signal_variance * (1 + 1e-9)
            mean, variance = predict_many(model, training.points)
            tol = 1e-6 * np.maximum(1.0, np.abs(training.measurements))
            assert np.all(np.abs(mean - training.measurements) <= tol)
            assert np.all(variance <= 1e-6 * params.signal_variance)

    def test_far_query_recovers_prior(self):
        params = KernelParams(1.7, (1.0, 1.0))
        model = fit(TrainingSet([[0.0, 0.0], [0.5, 0.5]], [2.0, -1.0]), params)
        dist = predict(model, [100.0, 100.0])
        assert dist.mean == pytest.approx(0.0, abs=1e-6)
        assert dist.variance == pytest.approx(1.7, abs=1e-6)

    def test_single_point_closed_form(self):
        params = KernelParams(1.5, (0.7,))
        model = fit(TrainingSet([[0.2]], [2.0]), params)
        k = kernel_eval([0.5], [0.2], params)
        assert predict(model, [0.5]).mean == pytest.approx(k / (1.5 + model.params.jitter) * 2.0)

    def test_variance_bounds(self, rng):
        for _ in range(200):
            training = random_training(rng, 6, 2)
            model = fit(training, random_params(rng, 2))
            _, variance = predict_many(model, rng.uniform(-1, 2, size=(100, 2)))
            assert np.all(variance >= 0)
            assert np.all(variance <= model.params.signal_variance + model.params.jitter)

    def test_adding_points_never_increases_variance(self, rng):
        for _ in range(200):
            dim = int(rng.integers(1, 4))
            params = separated_params(rng, dim)
            points = grid_points(rng, 8, dim)
            queries = rng.uniform(0, 1, size=(50, dim))
            previous = posterior_variance(points[:0], params, queries)
            for n in range(1, points.shape[0] + 1):
                current = posterior_variance(points[:n], params, queries)
                assert np.all(current <= previous + 1e-8)
                previous = current

    def test_query_dimension_mismatch(self):
        model = fit(TrainingSet([[0.0, 0.0]], [1.0]), KernelParams(1.0, (1.0, 1.0)))
        with pytest.raises(DimensionMismatchError):
            predict(model, [0.0])


class TestLikelihood:

    def test_single_zero_measurement(self):
        params = KernelParams(2.0, (1.0,))
        value, _ = log_marginal_likelihood(TrainingSet([[0.3]], [0.0]), params)
        assert value == pytest.approx(-0.5 * math.log(2 * math.pi * 2.0), rel=1e-9)

    def test_zero_measurements_leave_log_determinant(self, rng):
        training = TrainingSet(grid_points(rng, 5, 2), np.zeros(5))
        params = separated_params(rng, 2)
        value, _ = log_marginal_likelihood(training, params)
        K = kernel_matrix(training.points, training.points, params)
        _, logdet = np.linalg.slogdet(K + 1e-10 * params.signal_variance * np.eye(5))
        assert value == pytest.approx(-0.5 * logdet - 2.5 * math.log(2 * math.pi), rel=1e-6)

    def test_gradient_matches_finite_differences(self, rng):
        step = 1e-5
        for _ in range(200):
            dim = int(rng.integers(1, 4))
            points = grid_points(rng, int(rng.integers(2, 9)), dim)
            training = TrainingSet(points, rng.normal(size=points.shape[0]))
            params = random_params(rng, dim, jitter=1e-6)
            _, grad = log_marginal_likelihood(training, params)
            x = params.to_log()
            numeric = np.empty_like(x)
            for j in range(x.size):
                up, down = x.copy(), x.copy()
                up[j] += step
                down[j] -= step
                f_up, _ = log_marginal_likelihood(training, KernelParams.from_log(up, params.jitter))
                f_down, _ = log_marginal_likelihood(training, KernelParams.from_log(down, params.jitter))
                numeric[j] = (f_up - f_down) / (2 * step)
            scale = max(1.0, float(np.max(np.abs(numeric))))
            assert np.max(np.abs(grad - numeric)) <= 1e-4 * scale


class TestOptimize:

    @pytest.fixture
    def sine_data(self):
        x = np.linspace(0.0, 2.0, 10)[:, None]
        held = np.linspace(0.1, 1.9, 7)[:, None]
        return TrainingSet(x, np.sin(3 * x[:, 0])), held, np.sin(3 * held[:, 0])

    def test_never_worse_than_init(self, sine_data):
        training, _, _ = sine_data
        init = KernelParams(float(np.var(training.measurements)), (0.05,))
        result = maximize_likelihood(training, init, restarts=3, rng=np.random.default_rng(1))
        init_lml, _ = log_marginal_likelihood(training, init)
        assert result.lml >= init_lml - 1e-9
        assert result.grad_norm <= 1e-3 or result.cap_reached
        assert 1 <= result.restarts_used <= 3

    def test_held_out_error_improves(self, sine_data):
        training, held, truth = sine_data
        init = KernelParams(float(np.var(training.measurements)), (0.05,))
        result = maximize_likelihood(training, init, restarts=3, rng=np.random.default_rng(1))
        assert all(np.isfinite(v) and v > 0 for v in result.params.lengthscales)

        def rmse(params):
            mean, _ = predict_many(fit(training, params), held)
            return float(np.sqrt(np.mean((mean - truth) ** 2)))

        assert rmse(result.params) < rmse(init)

    def test_params_accessor(self, sine_data):
        training, _, _ = sine_data
        init = KernelParams(float(np.var(training.measurements)), (0.05,))
        full = maximize_likelihood(training, init, restarts=2, rng=np.random.default_rng(6))
        params = optimize_hyperparams(training, init, restarts=2, rng=np.random.default_rng(6))
        assert params == full.params

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            maximize_likelihood(TrainingSet([[0.0]], [1.0]), KernelParams(1.0, (1.0,)))

    def test_initial_params_scale_aware(self):
        grid = ParamGrid.from_box([-10, 0], [10, 4], 5)
        training = TrainingSet([[0, 0], [1, 1], [2, 2]], [1.0, 2.0, 3.0])
        params = initial_params(training, grid)
        assert params.signal_variance == pytest.approx(np.var([1.0, 2.0, 3.0]))
        assert params.lengthscales == pytest.approx((5.0, 1.0))
        flat = initial_params(TrainingSet([[0, 0], [1, 1]], [1.0, 1.0]), grid, lengthscale_scale=2.0)
        assert flat.signal_variance == pytest.approx(1e-6)
        assert flat.lengthscales == pytest.approx((10.0, 2.0))


class TestProbability:

    @pytest.mark.parametrize('mean, variance, expected', [
        (0.0, 1.0, 0.5),
        (2.0, 0.0, 1.0),
        (-2.0, 0.0, 0.0),
        (0.0, 0.0, 0.5),
        (1.0, 1.0, 0.84134),
    ])
    def test_examples(self, mean, variance, expected):
        value = prob_satisfaction(PredictiveDistribution(mean, variance))
        assert value == pytest.approx(expected, abs=1e-5)

    def test_monotone_and_symmetric(self):
        mean = np.linspace(-3, 3, 61)
        prob = prob_satisfaction_moments(mean, np.full(61, 0.7))
        assert np.all(np.diff(prob) > 0)
        np.testing.assert_allclose(prob + prob[::-1], 1.0, atol=1e-12)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            prob_satisfaction_moments(np.array([0.0]), np.array([-1.0]))

    def test_matches_integrated_density(self, rng):
        mean = rng.uniform(-3, 3, size=1000)
        variance = rng.uniform(0.05, 4.0, size=1000)
        prob = prob_satisfaction_moments(mean, variance)
        for m, v, p in zip(mean, variance, prob):
            # P(y > 0) = 1/2 + integral of the standard density over [0, m / sd]
            half, _ = quad(norm.pdf, 0.0, m / math.sqrt(v), epsabs=1e-13)
            assert p == pytest.approx(0.5 + half, abs=1e-6)
