# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


import itertools
import math

import numpy as np
import pytest
from scipy.stats import chisquare

from activeverify.acquisition import AcquisitionScores, ImportanceDistribution, importance_distribution
from activeverify.common import Strategy
from activeverify.exception import DppSamplingError
from activeverify.grid import CandidatePool
from activeverify.kdpp import (
    DEFAULT_BANDWIDTH,
    DEFAULT_CANDIDATES,
    build_kernel,
    decompose,
    draw_candidates,
    elementary_symmetric,
    sample_k_dpp,
    select_batch,
)


def uniform_distribution(pool):
    indices = pool.available_indices
    return importance_distribution(AcquisitionScores(Strategy.ENTROPY, indices, np.ones(indices.size)))


class TestCandidates:

    def test_defaults(self):
        assert DEFAULT_CANDIDATES == 1000
        assert DEFAULT_BANDWIDTH == 5.0

    def test_point_mass(self, unit_grid, rng):
        pool = CandidatePool(unit_grid)
        dist = ImportanceDistribution(np.array([3, 4]), np.array([0.0, 1.0]), 1.0)
        drawn = draw_candidates(dist, pool, 50, 5, rng)
        np.testing.assert_array_equal(drawn, 4)

    def test_frequencies(self, unit_grid, rng):
        pool = CandidatePool(unit_grid)
        probs = np.array([0.2, 0.5, 0.3])
        dist = ImportanceDistribution(np.array([0, 7, 9]), probs, 1.0)
        drawn = draw_candidates(dist, pool, 100_000, 5, rng)
        freq = np.array([np.mean(drawn == i) for i in (0, 7, 9)])
        np.testing.assert_allclose(freq, probs, atol=0.01)

    def test_too_few(self, unit_grid, rng):
        pool = CandidatePool(unit_grid)
        with pytest.raises(ValueError):
            draw_candidates(uniform_distribution(pool), pool, 3, 5, rng)

    def test_unavailable_mass(self, unit_grid, rng):
        pool = CandidatePool(unit_grid)
        dist = uniform_distribution(pool)
        pool.remove([0])
        with pytest.raises(ValueError):
            draw_candidates(dist, pool, 10, 5, rng)


class TestKernel:

    def test_values(self):
        kernel = build_kernel(np.array([[0.0, 0.0], [3.0, 4.0], [0.0, 0.0]]), bandwidth=5.0)
        assert kernel.matrix[0, 1] == pytest.approx(math.exp(-1), abs=1e-12)
        assert kernel.matrix[0, 2] == 1.0
        assert kernel.size == 3

    def test_symmetric_psd(self, rng):
        for _ in range(10):
            kernel = build_kernel(rng.uniform(size=(40, 3)), bandwidth=0.5)
            np.testing.assert_array_equal(kernel.matrix, kernel.matrix.T)
            assert np.linalg.eigvalsh(kernel.matrix).min() >= -1e-9

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_kernel(np.array([[0.0]]), bandwidth=0.0)


class TestElementarySymmetric:

    def test_expansion(self):
        table = elementary_symmetric([2.0, 3.0], 2)
        np.testing.assert_allclose(table[:, -1], [1.0, 5.0, 6.0])
        np.testing.assert_array_equal(table[0], 1.0)

    def test_subset_oracle(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 9))
            lambdas = rng.uniform(0, 3, size=n)
            order = int(rng.integers(0, n + 1))
            table = elementary_symmetric(lambdas, order)
            for m in range(order + 1):
                for j in range(n + 1):
                    expected = sum(math.prod(c) for c in itertools.combinations(lambdas[:j], m))
                    assert table[m, j] == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_spectrum_sorted_and_scaled(self, rng):
        kernel = build_kernel(rng.uniform(size=(10, 2)), bandwidth=0.4)
        spectrum = decompose(kernel, 3)
        assert np.all(np.diff(spectrum.eigenvalues) <= 0)
        assert np.all(spectrum.eigenvalues >= 0)
        assert spectrum.esym.shape == (4, 11)


class TestSampling:

    def test_full_size_selects_everything(self, rng):
        kernel = build_kernel(np.array([[0.0], [0.3], [0.6], [1.0]]), bandwidth=1.0)
        picks = sample_k_dpp(kernel, 4, rng)
        assert sorted(picks.tolist()) == [0, 1, 2, 3]

    def test_coincident_points_never_together(self, rng):
        kernel = build_kernel(np.array([[0.2], [0.2], [0.9]]), bandwidth=0.5)
        for _ in range(500):
            picks = sorted(sample_k_dpp(kernel, 2, rng).tolist())
            assert picks != [0, 1]

    def test_distinct_in_range(self, rng):
        kernel = build_kernel(rng.uniform(size=(60, 2)), bandwidth=0.3)
        for _ in range(50):
            picks = sample_k_dpp(kernel, 5, rng)
            assert np.unique(picks).size == 5
            assert picks.min() >= 0 and picks.max() < 60

    def test_subset_frequencies(self, rng):
        kernel = build_kernel(np.array([[0.0], [0.3], [1.0]]), bandwidth=0.5)
        subsets = list(itertools.combinations(range(3), 2))
        dets = np.array([np.linalg.det(kernel.matrix[np.ix_(s, s)]) for s in subsets])
        expected = dets / dets.sum()
        draws = 20_000
        counts = dict.fromkeys(subsets, 0)
        for _ in range(draws):
            counts[tuple(sorted(sample_k_dpp(kernel, 2, rng).tolist()))] += 1
        observed = np.array([counts[s] / draws for s in subsets])
        np.testing.assert_allclose(observed, expected, atol=0.02)

    def test_replay(self):
        kernel = build_kernel(np.random.default_rng(0).uniform(size=(30, 2)), bandwidth=0.3)
        first = sample_k_dpp(kernel, 4, np.random.default_rng(11))
        second = sample_k_dpp(kernel, 4, np.random.default_rng(11))
        np.testing.assert_array_equal(first, second)

    def test_rank_deficient_kernel(self, rng):
        kernel = build_kernel(np.zeros((5, 2)), bandwidth=1.0)
        with pytest.raises(DppSamplingError):
            sample_k_dpp(kernel, 2, rng)

    def test_invalid_size(self, rng):
        kernel = build_kernel(np.array([[0.0], [1.0]]), bandwidth=1.0)
        with pytest.raises(ValueError):
            sample_k_dpp(kernel, 3, rng)


class TestSelectBatch:

    def test_distinct_available_locations(self, unit_grid):
        pool = CandidatePool(unit_grid)
        pool.remove(range(0, 60))
        dist = uniform_distribution(pool)
        batch = select_batch(dist, pool, 5, np.random.default_rng(4), candidates=200, bandwidth=0.5)
        assert len(batch) == 5
        assert np.unique(batch.locations).size == 5
        assert all(pool.is_available(i) for i in batch.locations)
        np.testing.assert_array_equal(batch.points, unit_grid.points[batch.locations])

    def test_replay(self, unit_grid):
        pool = CandidatePool(unit_grid)
        dist = uniform_distribution(pool)
        first = select_batch(dist, pool, 5, np.random.default_rng(8), candidates=300)
        second = select_batch(dist, pool, 5, np.random.default_rng(8), candidates=300)
        np.testing.assert_array_equal(first.locations, second.locations)

    def test_batch_larger_than_pool(self, unit_grid, rng):
        pool = CandidatePool(unit_grid)
        pool.remove(range(3, unit_grid.size))
        with pytest.raises(ValueError):
            select_batch(uniform_distribution(pool), pool, 5, rng, candidates=50)


@pytest.mark.slow
@pytest.mark.parametrize('points', [
    [[0.0], [0.3], [1.0]],
    [[0.0], [0.1], [0.2]],
    [[0.0, 0.0], [0.5, 0.1], [0.2, 0.8], [0.9, 0.9]],
    [[0.0], [0.05], [0.6], [0.65]],
], ids=['spread3', 'tight3', 'plane4', 'pairs4'])
def test_subset_frequencies_battery(points):
    kernel = build_kernel(np.array(points), bandwidth=0.5)
    subsets = list(itertools.combinations(range(kernel.size), 2))
    dets = np.array([np.linalg.det(kernel.matrix[np.ix_(s, s)]) for s in subsets])
    expected = dets / dets.sum()
    rng = np.random.default_rng(2024)
    draws = 50_000
    counts = dict.fromkeys(subsets, 0)
    for _ in range(draws):
        counts[tuple(sorted(sample_k_dpp(kernel, 2, rng).tolist()))] += 1
    observed = np.array([counts[s] / draws for s in subsets])
    np.testing.assert_allclose(observed, expected, atol=0.02)


@pytest.mark.parametrize('size', [1, 2, 3])
def test_chi_square_against_exact_distribution(size):
    kernel = build_kernel(np.array([[0.0], [0.2], [0.45], [0.6], [0.8], [1.0]]), bandwidth=0.5)
    subsets = list(itertools.combinations(range(6), size))
    dets = np.array([np.linalg.det(kernel.matrix[np.ix_(s, s)]) for s in subsets])
    draws = 20_000
    expected = draws * dets / dets.sum()
    assert expected.min() >= 5
    rng = np.random.default_rng(31 + size)
    counts = dict.fromkeys(subsets, 0)
    for _ in range(draws):
        counts[tuple(sorted(sample_k_dpp(kernel, size, rng).tolist()))] += 1
    observed = np.array([counts[s] for s in subsets])
    assert observed.sum() == draws
    assert chisquare(observed, expected).pvalue > 1e-3
