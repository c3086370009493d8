# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""Squared-exponential kernel with automatic relevance determination (one lengthscale per dimension)."""


from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from ..exception import DimensionMismatchError
from ..grid import as_point
from ..types import Coords, FloatArray


@dataclass(frozen=True)
class KernelParams:
    """
    Kernel hyperparameters `psi`.

    Attributes:
        signal_variance: `sigma_f^2 > 0`.
        lengthscales: One positive lengthscale per parameter dimension.
        jitter: Non-negative value added to the kernel diagonal.
    """

    signal_variance: float
    lengthscales: tuple[float, ...]
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'signal_variance', float(self.signal_variance))
        object.__setattr__(self, 'lengthscales', tuple(float(v) for v in np.atleast_1d(self.lengthscales)))
        object.__setattr__(self, 'jitter', float(self.jitter))
        if not (np.isfinite(self.signal_variance) and self.signal_variance > 0):
            raise ValueError(f'The "signal_variance" must be positive, got {self.signal_variance}.')
        if not self.lengthscales:
            raise ValueError('The "lengthscales" must not be empty.')
        if not all(np.isfinite(v) and v > 0 for v in self.lengthscales):
            raise ValueError(f'Every lengthscale must be positive, got {self.lengthscales}.')
        if not (np.isfinite(self.jitter) and self.jitter >= 0):
            raise ValueError(f'The "jitter" must be non-negative, got {self.jitter}.')

    @property
    def dim(self) -> int:
        return len(self.lengthscales)

    @property
    def lengthscale_array(self) -> FloatArray:
        return np.asarray(self.lengthscales)

    def to_log(self) -> FloatArray:
        """`[log sigma_f^2, log l_1, ..., log l_p]`, the optimizer's coordinates."""
        return np.log(np.concatenate(([self.signal_variance], self.lengthscales)))

    @classmethod
    def from_log(cls, log_params: FloatArray, jitter: float = 0.0) -> KernelParams:
        values = np.exp(np.asarray(log_params, dtype=float))
        return cls(values[0], tuple(values[1:]), jitter)

    def with_jitter(self, jitter: float) -> KernelParams:
        return replace(self, jitter=float(jitter))


def _verify_dim(points: FloatArray, params: KernelParams) -> None:
    if points.shape[-1] != params.dim:
        raise DimensionMismatchError(
            f'Points have dimension {points.shape[-1]} but the kernel has {params.dim} lengthscales.'
        )


def kernel_eval(a: Coords, b: Coords, params: KernelParams) -> float:
    """`sigma_f^2 * exp(-1/2 * sum_d (a_d - b_d)^2 / l_d^2)`."""
    a = as_point(a)
    b = as_point(b)
    if a.size != b.size:
        raise DimensionMismatchError(f'Points have dimensions {a.size} and {b.size}.')
    _verify_dim(a, params)
    scaled = (a - b) / params.lengthscale_array
    return params.signal_variance * float(np.exp(-0.5 * np.dot(scaled, scaled)))


def scaled_sqdist(a: FloatArray, b: FloatArray, params: KernelParams) -> FloatArray:
    """Pairwise squared distances after dividing each dimension by its lengthscale."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    _verify_dim(a, params)
    _verify_dim(b, params)
    ls = params.lengthscale_array
    return cdist(a / ls, b / ls, 'sqeuclidean')


def kernel_matrix(a: FloatArray, b: FloatArray, params: KernelParams) -> FloatArray:
    """Cross-covariance matrix between the rows of `a` and `b` (no jitter)."""
    return params.signal_variance * np.exp(-0.5 * scaled_sqdist(a, b, params))
