# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..exception import DimensionMismatchError
from ..gp import GpModel, predict_many, prob_satisfaction_moments
from ..grid import ParamGrid
from ..logging import LogConfig
from ..types import BoolArray, FloatArray


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


@dataclass(frozen=True, eq=False)
class RegionEstimate:
    """
    Estimated satisfaction region over every grid location.

    Attributes:
        sat_mask: True where the predicted robustness is strictly positive.
        confidence: `P(y > 0)` per location.
        mean: Predicted robustness per location.
        variance: Predictive variance per location.
    """

    sat_mask: BoolArray
    confidence: FloatArray
    mean: FloatArray
    variance: FloatArray

    @property
    def fail_mask(self) -> BoolArray:
        return ~self.sat_mask


@dataclass(frozen=True)
class FilteredError:
    """
    Attributes:
        error: Misclassification rate over the retained locations.
        coverage: Fraction of the grid retained.
        empty: No location met the threshold; `error` and `coverage` are then 0.
    """

    error: float
    coverage: float
    empty: bool = False


def classify_regions(model: GpModel, grid: ParamGrid) -> RegionEstimate:
    """Split the grid by the sign of the predicted mean; `mu == 0` counts as failing."""
    mean, variance = predict_many(model, grid.points)
    return RegionEstimate(mean > 0, prob_satisfaction_moments(mean, variance), mean, variance)


def _verify_masks(estimate: RegionEstimate, truth: BoolArray) -> BoolArray:
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != estimate.sat_mask.shape:
        raise DimensionMismatchError(
            f'Truth mask has shape {truth.shape}, estimate has {estimate.sat_mask.shape}.'
        )
    return truth


def misclassification_error(estimate: RegionEstimate, truth: BoolArray) -> float:
    """Fraction of grid locations classified differently from `truth`."""
    truth = _verify_masks(estimate, truth)
    return float(np.mean(estimate.sat_mask != truth))


def confidence_filtered_error(
    estimate: RegionEstimate,
    truth: BoolArray,
    threshold: float = 0.95
) -> FilteredError:
    """
    Misclassification rate over the locations whose predicted class has
    probability at least `threshold`, with the retained fraction.
    """
    if not 0.5 <= threshold <= 1.0:
        raise ValueError(f'The "threshold" must lie in [0.5, 1], got {threshold}.')
    truth = _verify_masks(estimate, truth)
    confidence = np.maximum(estimate.confidence, 1.0 - estimate.confidence)
    keep = confidence >= threshold
    if not keep.any():
        LOGGER.warning('No location reaches confidence %.3g, filtered error undefined.', threshold)
        return FilteredError(0.0, 0.0, True)
    wrong = estimate.sat_mask[keep] != truth[keep]
    return FilteredError(float(wrong.mean()), float(keep.mean()))
