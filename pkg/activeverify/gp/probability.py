# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import numpy as np
from scipy.special import erf

from ..types import FloatArray
from .model import PredictiveDistribution


def prob_satisfaction_moments(mean: FloatArray, variance: FloatArray) -> FloatArray:
    """
    Vectorized `P(y > 0) = 1/2 + 1/2 erf(mu / sqrt(2 Sigma))`.

    Where `Sigma == 0` the limit is used: 1 for `mu > 0`, 0 for `mu < 0`, 0.5 for `mu == 0`.
    """
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError('Variances must be non-negative.')
    degenerate = variance <= 0
    safe = np.where(degenerate, 1.0, variance)
    prob = 0.5 + 0.5 * erf(mean / np.sqrt(2.0 * safe))
    limit = 0.5 + 0.5 * np.sign(mean)
    return np.where(degenerate, limit, prob)


def prob_satisfaction(dist: PredictiveDistribution) -> float:
    """Probability that the robustness at the query is strictly positive."""
    return float(prob_satisfaction_moments(np.array(dist.mean), np.array(dist.variance)))
