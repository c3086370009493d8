# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Scores for unobserved locations and the entropy-weighted importance distribution.

Every strategy is a maximization: `emc` is stored as `-|mu|`.
"""


from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .common import Strategy
from .gp import GpModel, predict_many, prob_satisfaction_moments
from .grid import CandidatePool
from .logging import LogConfig
from .types import FloatArray, IntArray


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

NORMALIZER_FLOOR = 1e-12
"""Below this total score the importance distribution falls back to uniform."""


@dataclass(frozen=True, eq=False)
class AcquisitionScores:
    """
    Attributes:
        strategy: One of `Strategy.ALL`.
        indices: Available grid indices, increasing.
        scores: One score per entry of `indices`.
    """

    strategy: str
    indices: IntArray
    scores: FloatArray

    def __post_init__(self):
        if self.strategy not in Strategy.ALL:
            raise ValueError(f'Unknown strategy "{self.strategy}", expected one of {Strategy.ALL}.')
        indices = np.asarray(self.indices, dtype=np.intp)
        scores = np.asarray(self.scores, dtype=float)
        if indices.shape != scores.shape or indices.ndim != 1:
            raise ValueError('The "indices" and "scores" must be vectors of equal length.')
        object.__setattr__(self, 'indices', indices)
        object.__setattr__(self, 'scores', scores)

    def __len__(self) -> int:
        return self.indices.size


@dataclass(frozen=True, eq=False)
class ImportanceDistribution:
    """
    Attributes:
        indices: Grid indices the probabilities refer to.
        probabilities: Non-negative, summing to 1.
        normalizer: `Z_H`, the score total before normalization.
        uniform_fallback: True when `Z_H` was too small and a uniform distribution was used.
    """

    indices: IntArray
    probabilities: FloatArray
    normalizer: float
    uniform_fallback: bool = False


def entropy_score(p_sat: FloatArray | float) -> FloatArray | float:
    """
    Binary entropy in bits, `-(p log2 p + (1-p) log2 (1-p))` with `0 log 0 = 0`.

    Accepts a scalar or an array and returns the same kind.
    """
    p = np.asarray(p_sat, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError('Probabilities must lie in [0, 1].')
    h = np.clip((entr(p) + entr(1.0 - p)) / np.log(2.0), 0.0, 1.0)
    return float(h) if h.ndim == 0 else h


def score_from_moments(
    strategy: str,
    indices: IntArray,
    mean: FloatArray,
    variance: FloatArray,
    rng: np.random.Generator | None = None
) -> AcquisitionScores:
    """Scores from externally supplied predictive moments at `indices`."""
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    match strategy:
        case Strategy.ENTROPY:
            scores = entropy_score(prob_satisfaction_moments(mean, variance))
        case Strategy.VARIANCE:
            scores = variance.copy()
        case Strategy.EMC:
            scores = -np.abs(mean)
        case Strategy.RANDOM:
            if rng is None:
                raise ValueError('The "random" strategy needs a random generator.')
            scores = rng.uniform(size=mean.size)
        case _:
            raise ValueError(f'Unknown strategy "{strategy}", expected one of {Strategy.ALL}.')
    return AcquisitionScores(strategy, indices, np.atleast_1d(scores))


def score_pool(
    model: GpModel,
    pool: CandidatePool,
    strategy: str,
    rng: np.random.Generator | None = None
) -> AcquisitionScores:
    """
    Score every available location of `pool` under `model`.

    Raises:
        ValueError: The pool is empty, or `random` is requested without `rng`.
    """
    if pool.count == 0:
        raise ValueError('Cannot score an empty candidate pool.')
    mean, variance = predict_many(model, pool.available_points)
    return score_from_moments(strategy, pool.available_indices, mean, variance, rng)


def select_sequential(scores: AcquisitionScores) -> int:
    """Grid index of the highest score; ties go to the lowest grid index."""
    if len(scores) == 0:
        raise ValueError('Cannot select from empty scores.')
    return int(scores.indices[int(np.argmax(scores.scores))])


def select_top(scores: AcquisitionScores, count: int) -> IntArray:
    """Grid indices of the `count` highest scores, best first, ties by lowest grid index."""
    if not 0 < count <= len(scores):
        raise ValueError(f'Cannot select {count} of {len(scores)} scored locations.')
    order = np.lexsort((scores.indices, -scores.scores))
    return scores.indices[order[:count]]


def importance_distribution(scores: AcquisitionScores) -> ImportanceDistribution:
    """
    `P_H = H / Z_H` over the scored locations.

    Scores must be non-negative. When `Z_H < 1e-12` the distribution is
    uniform and `uniform_fallback` is set.
    """
    if len(scores) == 0:
        raise ValueError('Cannot build a distribution over empty scores.')
    values = scores.scores
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError(f'Importance weights must be finite and non-negative, got "{scores.strategy}" scores.')
    total = float(values.sum())
    if total < NORMALIZER_FLOOR:
        LOGGER.warning('Score total %.3g is degenerate, using a uniform distribution.', total)
        uniform = np.full(values.size, 1.0 / values.size)
        return ImportanceDistribution(scores.indices, uniform, total, True)
    probs = values / total
    probs /= probs.sum()
    return ImportanceDistribution(scores.indices, probs, total)
