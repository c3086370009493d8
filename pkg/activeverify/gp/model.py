# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Noise-free, zero-mean Gaussian-process regression.

The posterior at `q` is
`mu(q) = K_q^T (K + jitter I)^-1 y` and
`Sigma(q) = k(q, q) - K_q^T (K + jitter I)^-1 K_q`,
with the inverse applied through a Cholesky factor.
"""


from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from ..exception import DimensionMismatchError, FactorizationError
from ..grid import as_point
from ..logging import LogConfig
from ..types import Coords, FloatArray
from .kernel import KernelParams, kernel_matrix


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

JITTER_START = 1e-10
"""First rung of the jitter ladder, relative to `sigma_f^2`."""

JITTER_STOP = 1e-4
"""Last rung of the jitter ladder, relative to `sigma_f^2`."""


@dataclass(frozen=True)
class TrainingSet:
    """
    Observed pairs `L = {D, y}`.

    Attributes:
        points: `D`, shape `(N, p)`.
        measurements: `y`, shape `(N,)`.
    """

    points: FloatArray
    measurements: FloatArray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        measurements = np.atleast_1d(np.asarray(self.measurements, dtype=float))
        if points.shape[0] != measurements.shape[0] or measurements.ndim != 1:
            raise DimensionMismatchError(
                f'{points.shape[0]} points but {measurements.shape[0]} measurements.'
            )
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(measurements))):
            raise ValueError('Training points and measurements must be finite.')
        points.setflags(write=False)
        measurements.setflags(write=False)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'measurements', measurements)

    @classmethod
    def empty(cls, dim: int) -> TrainingSet:
        return cls(np.empty((0, dim)), np.empty(0))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def has_duplicates(self) -> bool:
        return np.unique(self.points, axis=0).shape[0] != self.size

    def deduplicated(self) -> TrainingSet:
        """Keep the first occurrence of every exactly repeated point."""
        if self.size == 0:
            return self
        _, first = np.unique(self.points, axis=0, return_index=True)
        keep = np.sort(first)
        if keep.size != self.size:
            LOGGER.debug('Dropped %d duplicate training points.', self.size - keep.size)
        return TrainingSet(self.points[keep], self.measurements[keep])

    def extend(self, points: FloatArray, measurements: FloatArray) -> TrainingSet:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return TrainingSet(
            np.vstack([self.points, points]) if self.size else points,
            np.concatenate([self.measurements, np.atleast_1d(measurements)])
        )


@dataclass(frozen=True)
class PredictiveDistribution:
    """Posterior mean and variance at one query."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f'The "variance" must be non-negative, got {self.variance}.')


@dataclass(frozen=True)
class GpModel:
    """
    A fitted GP. Immutable, so read-only queries may run concurrently.

    Attributes:
        params: Hyperparameters, with `jitter` set to the rung actually used.
        training: The training set the model conditions on.
        chol_factor: Lower-triangular `L` with `L L^T = K + jitter I`.
        alpha: `(K + jitter I)^-1 y`.
    """

    params: KernelParams
    training: TrainingSet
    chol_factor: FloatArray
    alpha: FloatArray

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def size(self) -> int:
        return self.training.size


def factorize(points: FloatArray, params: KernelParams) -> tuple[FloatArray, float]:
    """
    Cholesky factor of `K + jitter I` using the jitter ladder.

    The ladder starts at `max(params.jitter, 1e-10 sigma_f^2)` and multiplies by 10
    on failure up to `1e-4 sigma_f^2`.

    Returns:
        `(L, jitter)`, the lower factor and the jitter that succeeded.

    Raises:
        FactorizationError: Every rung failed.
    """
    K = kernel_matrix(points, points, params)
    sf2 = params.signal_variance
    jitter = max(params.jitter, JITTER_START * sf2)
    stop = max(params.jitter, JITTER_STOP * sf2)
    eye = np.eye(K.shape[0])
    while True:
        try:
            return np.linalg.cholesky(K + jitter * eye), jitter
        except np.linalg.LinAlgError:
            if jitter >= stop * (1 - 1e-12):
                raise FactorizationError(
                    f'Kernel matrix of {K.shape[0]} points is not positive definite '
                    f'with jitter {jitter:.3g}.', jitter
                ) from None
            LOGGER.debug('Cholesky failed with jitter %.3g, escalating.', jitter)
            jitter = min(jitter * 10, stop)


def fit(training: TrainingSet, params: KernelParams) -> GpModel:
    """
    Condition the zero-mean GP prior on `training`.

    Raises:
        ValueError: `training` is empty or contains duplicate points.
        DimensionMismatchError: Point dimension differs from the lengthscales.
        FactorizationError: The jitter ladder was exhausted.
    """
    if training.size == 0:
        raise ValueError('Cannot fit a GP to an empty training set.')
    if training.dim != params.dim:
        raise DimensionMismatchError(f'Training points have dimension {training.dim}, kernel has {params.dim}.')
    if training.has_duplicates():
        raise ValueError('Training set contains duplicate points; call "deduplicated()" first.')
    L, jitter = factorize(training.points, params)
    alpha = cho_solve((L, True), training.measurements)
    return GpModel(params.with_jitter(jitter), training, L, alpha)


def predict_many(model: GpModel, queries: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    Posterior means and variances at every row of `queries`.
    Variances are clamped into `[0, sigma_f^2]`.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if queries.shape[1] != model.dim:
        raise DimensionMismatchError(f'Queries have dimension {queries.shape[1]}, model has {model.dim}.')
    K_star = kernel_matrix(model.training.points, queries, model.params)
    mean = K_star.T @ model.alpha
    v = solve_triangular(model.chol_factor, K_star, lower=True, check_finite=False)
    sf2 = model.params.signal_variance
    variance = np.clip(sf2 - np.einsum('ij,ij->j', v, v), 0.0, sf2)
    return mean, variance


def predict(model: GpModel, query: Coords) -> PredictiveDistribution:
    """Posterior at a single point."""
    query = as_point(query, model.dim)
    mean, variance = predict_many(model, query[None, :])
    return PredictiveDistribution(float(mean[0]), float(variance[0]))


def posterior_variance(points: FloatArray, params: KernelParams, queries: FloatArray) -> FloatArray:
    """
    Posterior variance at `queries` of a GP conditioned on the locations `points`.
    Measurements do not enter the variance, so none are needed.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    sf2 = params.signal_variance
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        return np.full(queries.shape[0], sf2)
    L, _ = factorize(points, params)
    v = solve_triangular(L, kernel_matrix(points, queries, params), lower=True, check_finite=False)
    return np.clip(sf2 - np.einsum('ij,ij->j', v, v), 0.0, sf2)
