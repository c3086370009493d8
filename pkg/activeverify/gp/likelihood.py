# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve

from ..exception import DimensionMismatchError
from ..types import FloatArray
from .kernel import KernelParams, kernel_matrix
from .model import TrainingSet, factorize


def log_marginal_likelihood(training: TrainingSet, params: KernelParams) -> tuple[float, FloatArray]:
    """
    Gaussian log marginal likelihood of `training` under `params` and its gradient.

    `log p(y) = -1/2 y^T K^-1 y - 1/2 log|K| - N/2 log(2 pi)` with `K` including the
    jitter rung chosen by `factorize`.

    Returns:
        `(value, gradient)` where the gradient is taken with respect to
        `[log sigma_f^2, log l_1, ..., log l_p]`.

    Raises:
        FactorizationError: The kernel matrix could not be factorized.
    """
    if training.size == 0:
        raise ValueError('The log marginal likelihood needs at least one training point.')
    if training.dim != params.dim:
        raise DimensionMismatchError(f'Training points have dimension {training.dim}, kernel has {params.dim}.')
    X = training.points
    y = training.measurements
    n = training.size
    L, _ = factorize(X, params)
    alpha = cho_solve((L, True), y)
    value = -0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * np.log(2 * np.pi)

    K = kernel_matrix(X, X, params)
    # dLML/dtheta_j = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta_j)
    W = np.outer(alpha, alpha) - cho_solve((L, True), np.eye(n))
    grad = np.empty(params.dim + 1)
    grad[0] = 0.5 * np.sum(W * K)
    for d, ls in enumerate(params.lengthscales):
        diff = X[:, d][:, None] - X[:, d][None, :]
        grad[d + 1] = 0.5 * np.sum(W * K * (diff ** 2) / ls ** 2)
    return float(value), grad
