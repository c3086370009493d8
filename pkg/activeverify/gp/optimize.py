# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""Maximum-likelihood hyperparameters with L-BFGS-B in log space and random restarts."""


from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..exception import FactorizationError
from ..grid import ParamGrid
from ..logging import LogConfig
from ..types import FloatArray
from .kernel import KernelParams
from .likelihood import log_marginal_likelihood
from .model import TrainingSet


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

SIGNAL_VARIANCE_FLOOR = 1e-6
RESTART_SPREAD = 1e2
"""Random restarts draw each hyperparameter log-uniformly in `[init / spread, init * spread]`."""

SEARCH_SPREAD = 1e4
"""The optimizer is bounded to `[init / spread, init * spread]` per hyperparameter."""


@dataclass(frozen=True)
class OptimizationResult:
    """
    Outcome of `maximize_likelihood`.

    Attributes:
        params: The best hyperparameters found (never worse than the initial ones).
        lml: Log marginal likelihood at `params`.
        grad_norm: Norm of the projected log-space gradient at `params`.
        cap_reached: The optimizer stopped (iteration cap or line-search failure)
            without bringing `grad_norm` under `gtol`.
        restarts_used: Number of starts that factorized successfully.
    """

    params: KernelParams
    lml: float
    grad_norm: float
    cap_reached: bool
    restarts_used: int


def initial_params(training: TrainingSet, grid: ParamGrid, lengthscale_scale: float = 1.0) -> KernelParams:
    """
    Scale-aware starting point: `sigma_f^2 = var(y)` (floored at 1e-6) and
    every lengthscale a quarter of the grid span, times `lengthscale_scale`.
    """
    if lengthscale_scale <= 0:
        raise ValueError(f'The "lengthscale_scale" must be positive, got {lengthscale_scale}.')
    variance = float(np.var(training.measurements)) if training.size else 0.0
    return KernelParams(
        max(variance, SIGNAL_VARIANCE_FLOOR),
        tuple(grid.span / 4.0 * lengthscale_scale)
    )


def _projected_grad_norm(x: FloatArray, grad: FloatArray, bounds: list[tuple[float, float]]) -> float:
    """Gradient norm ignoring components that push against an active bound (ascent direction)."""
    g = grad.copy()
    for i, (lo, hi) in enumerate(bounds):
        if (x[i] <= lo + 1e-10 and g[i] < 0) or (x[i] >= hi - 1e-10 and g[i] > 0):
            g[i] = 0.0
    return float(np.linalg.norm(g))


def maximize_likelihood(
    training: TrainingSet,
    init: KernelParams,
    restarts: int = 3,
    rng: np.random.Generator | None = None,
    max_iter: int = 500,
    gtol: float = 1e-3
) -> OptimizationResult:
    """
    Local MLE from `init` plus `restarts - 1` random log-uniform starts.

    Raises:
        ValueError: Fewer than two training points or `restarts < 1`.
        FactorizationError: No start could be factorized.
    """
    if training.size < 2:
        raise ValueError(f'Hyperparameter optimization needs at least 2 points, got {training.size}.')
    if restarts < 1:
        raise ValueError(f'The "restarts" must be at least 1, got {restarts}.')
    rng = rng if rng is not None else np.random.default_rng(0)
    x0 = init.to_log()
    bounds = [(v - np.log(SEARCH_SPREAD), v + np.log(SEARCH_SPREAD)) for v in x0]
    jitter = init.jitter

    def negative(x: FloatArray) -> tuple[float, FloatArray]:
        try:
            value, grad = log_marginal_likelihood(training, KernelParams.from_log(x, jitter))
        except FactorizationError:
            return 1e25, np.zeros_like(x)
        return -value, -grad

    starts = [x0] + [
        x0 + rng.uniform(-np.log(RESTART_SPREAD), np.log(RESTART_SPREAD), size=x0.size)
        for _ in range(restarts - 1)
    ]
    best: tuple[float, FloatArray] | None = None
    used = 0
    for k, start in enumerate(starts):
        try:
            log_marginal_likelihood(training, KernelParams.from_log(start, jitter))
        except FactorizationError:
            LOGGER.debug('Restart %d does not factorize, skipped.', k)
            continue
        used += 1
        res = minimize(
            negative, start, jac=True, method='L-BFGS-B', bounds=bounds,
            options={'maxiter': max_iter, 'ftol': 1e-15, 'gtol': 1e-8}
        )
        lml = -float(res.fun)
        LOGGER.debug('Restart %d: lml %.6g after %d iterations (%s).', k, lml, res.nit, res.message)
        if best is None or lml > best[0]:
            best = (lml, np.asarray(res.x))
    if best is None:
        raise FactorizationError('No hyperparameter start could be factorized.', jitter)

    lml, x = best
    params = KernelParams.from_log(x, jitter)
    try:
        init_lml, _ = log_marginal_likelihood(training, init)
    except FactorizationError:
        init_lml = -np.inf
    if lml < init_lml:
        params, x = init, x0
    value, grad = log_marginal_likelihood(training, params)
    grad_norm = _projected_grad_norm(x, grad, bounds)
    return OptimizationResult(params, value, grad_norm, grad_norm > gtol, used)


def optimize_hyperparams(
    training: TrainingSet,
    init: KernelParams,
    restarts: int = 3,
    rng: np.random.Generator | None = None
) -> KernelParams:
    """The hyperparameters of `maximize_likelihood`, for callers that only need `psi`."""
    return maximize_likelihood(training, init, restarts, rng).params
