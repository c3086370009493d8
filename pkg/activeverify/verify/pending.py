# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..gp import GpModel, posterior_variance
from ..types import Coords, FloatArray


type VarianceQuery = Callable[[FloatArray], FloatArray]


def update_covariance_with_pending(model: GpModel, pending: Sequence[Coords]) -> VarianceQuery:
    """
    Posterior variance of `model` after also conditioning on the `pending`
    locations, whose measurements are not yet known. The mean is untouched and
    the hyperparameters stay those of `model`.

    Raises:
        ValueError: A pending point repeats a training point or another pending point.
    """
    params = model.params
    points = model.training.points
    if len(pending) == 0:
        return lambda queries: posterior_variance(points, params, queries)
    extra = np.atleast_2d(np.asarray(pending, dtype=float))
    combined = np.vstack([points, extra])
    if np.unique(combined, axis=0).shape[0] != combined.shape[0]:
        raise ValueError('Pending points must differ from each other and from the training points.')
    return lambda queries: posterior_variance(combined, params, queries)
