# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Diverse batch selection with a k-determinantal point process.

Candidates are drawn with replacement from the importance distribution,
compared with a squared-exponential similarity in normalized grid units,
and thinned to `M` items whose selection probability is proportional to
`det(L_S)`. Sampling is the two-phase spectral algorithm: choose `M`
eigenvectors through elementary symmetric polynomials, then pick items one
at a time while projecting the eigenvector basis away from each pick.
"""


from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, qr
from scipy.spatial.distance import cdist

from .acquisition import ImportanceDistribution
from .exception import DppSamplingError
from .grid import CandidatePool
from .logging import LogConfig
from .types import FloatArray, IntArray


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

DEFAULT_CANDIDATES = 1000
DEFAULT_BANDWIDTH = 5.0
EIGENVALUE_FLOOR = 1e-12
MAX_ATTEMPTS = 10


@dataclass(frozen=True, eq=False)
class DppKernel:
    """
    Attributes:
        points: Candidate coordinates, shape `(M_T, p)`, normalized to the grid's unit box.
        matrix: `L[i, j] = exp(-|points_i - points_j|^2 / bandwidth^2)`.
        bandwidth: The similarity length `l`.
        locations: Grid index of each candidate, if known.
    """

    points: FloatArray
    matrix: FloatArray
    bandwidth: float
    locations: IntArray | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class DppSpectrum:
    """
    Attributes:
        eigenvalues: Descending, clamped at zero below the floor.
        eigenvectors: Columns matching `eigenvalues`.
        esym: `esym[m, j]` is the degree-`m` elementary symmetric polynomial of the first `j`
            eigenvalues, computed on eigenvalues rescaled by their maximum.
    """

    eigenvalues: FloatArray
    eigenvectors: FloatArray
    esym: FloatArray


@dataclass(frozen=True, eq=False)
class Batch:
    """
    Attributes:
        indices: Distinct positions into the candidate list.
        locations: Distinct grid indices, one per batch slot.
        points: Grid coordinates of `locations`.
        redrawn: Slots whose DPP pick duplicated an earlier grid location and were re-drawn.
    """

    indices: IntArray
    locations: IntArray
    points: FloatArray
    redrawn: int = 0

    def __len__(self) -> int:
        return self.locations.size


def draw_candidates(
    dist: ImportanceDistribution,
    pool: CandidatePool,
    count: int,
    batch_size: int,
    rng: np.random.Generator
) -> IntArray:
    """
    `count` i.i.d. grid indices drawn with replacement from `dist`.

    Raises:
        ValueError: `count < batch_size`, or `dist` puts mass on an unavailable location.
    """
    if count < batch_size:
        raise ValueError(f'Need at least {batch_size} candidates, got "count" {count}.')
    if not np.all(pool.available_mask[dist.indices]):
        raise ValueError('The importance distribution covers unavailable grid locations.')
    return rng.choice(dist.indices, size=count, replace=True, p=dist.probabilities)


def build_kernel(
    points: FloatArray,
    bandwidth: float = DEFAULT_BANDWIDTH,
    locations: IntArray | None = None
) -> DppKernel:
    """Similarity matrix over candidate coordinates (already normalized by the caller)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValueError('Cannot build a DPP kernel over no candidates.')
    if bandwidth <= 0:
        raise ValueError(f'The "bandwidth" must be positive, got {bandwidth}.')
    matrix = np.exp(-cdist(points, points, 'sqeuclidean') / bandwidth**2)
    matrix = 0.5 * (matrix + matrix.T)
    np.fill_diagonal(matrix, 1.0)
    return DppKernel(points, matrix, float(bandwidth), locations)


def elementary_symmetric(lambdas: FloatArray, order: int) -> FloatArray:
    """
    Table `E` of shape `(order + 1, N + 1)` with `E[m, j] = e_m(lambda_1, ..., lambda_j)`.

    Examples:
        ::

            elementary_symmetric([2.0, 3.0], 2)[:, -1]  # [1, 5, 6]
    """
    lambdas = np.asarray(lambdas, dtype=float)
    n = lambdas.size
    table = np.zeros((order + 1, n + 1))
    table[0, :] = 1.0
    for m in range(1, order + 1):
        for j in range(1, n + 1):
            table[m, j] = table[m, j - 1] + lambdas[j - 1] * table[m - 1, j - 1]
    return table


def decompose(kernel: DppKernel, order: int) -> DppSpectrum:
    """Eigendecomposition of `kernel.matrix` plus the polynomial table up to `order`."""
    values, vectors = eigh(kernel.matrix)
    if values.min() < -1e-9 * max(1.0, values.max()):
        LOGGER.debug('DPP kernel has eigenvalue %.3g, clamped.', values.min())
    values = np.where(values < EIGENVALUE_FLOOR, 0.0, values)
    values, vectors = values[::-1], vectors[:, ::-1]
    scale = values.max() if values.max() > 0 else 1.0
    return DppSpectrum(values, vectors, elementary_symmetric(values / scale, order))


def eigen_select(spectrum: DppSpectrum, size: int, rng: np.random.Generator) -> IntArray | None:
    """
    Phase 1: pick `size` eigenvector indices, index `j` with probability
    `lambda_j e_{m-1}^{j-1} / e_m^j`. Returns None when the clamped spectrum cannot supply them.
    """
    esym = spectrum.esym
    scaled = spectrum.eigenvalues / (spectrum.eigenvalues.max() or 1.0)
    chosen: list[int] = []
    remaining = size
    j = scaled.size
    while remaining > 0 and j > 0:
        if esym[remaining, j] <= 0:
            return None
        if j == remaining:
            marginal = 1.0
        else:
            marginal = scaled[j - 1] * esym[remaining - 1, j - 1] / esym[remaining, j]
        if rng.uniform() < marginal:
            if scaled[j - 1] <= 0:
                return None
            chosen.append(j - 1)
            remaining -= 1
        j -= 1
    if remaining > 0:
        return None
    return np.array(chosen[::-1], dtype=np.intp)


def project_select(vectors: FloatArray, rng: np.random.Generator) -> IntArray:
    """
    Phase 2: draw one item per basis column, item `i` with probability
    `sum_v (v_i)^2 / |V|`, then restrict the basis to vectors vanishing at `i`.

    Raises:
        DppSamplingError: The basis lost rank or the item probabilities degenerated.
    """
    basis = np.array(vectors, dtype=float)
    picks: list[int] = []
    while basis.shape[1] > 0:
        weights = np.sum(basis**2, axis=1)
        total = weights.sum()
        if not np.isfinite(total) or abs(total - basis.shape[1]) > 1e-6 * basis.shape[1]:
            raise DppSamplingError(
                f'Projected basis of rank {basis.shape[1]} has total weight {total:.6g}.'
            )
        weights[weights < 1e-12 * weights.max()] = 0.0
        weights[picks] = 0.0
        if weights.sum() <= 0:
            raise DppSamplingError('No item has positive selection probability.')
        item = int(rng.choice(weights.size, p=weights / weights.sum()))
        picks.append(item)
        pivot = int(np.argmax(np.abs(basis[item])))
        column = basis[:, pivot].copy()
        basis = np.delete(basis, pivot, axis=1)
        if basis.shape[1] == 0:
            break
        basis = basis - np.outer(column, basis[item] / column[item])
        basis, _ = qr(basis, mode='economic')
    return np.array(picks, dtype=np.intp)


def sample_k_dpp(kernel: DppKernel, size: int, rng: np.random.Generator) -> IntArray:
    """
    `size` distinct candidate positions distributed as a k-DPP over `kernel`.

    Raises:
        ValueError: `size` exceeds the number of candidates or is not positive.
        DppSamplingError: Phase 1 failed `MAX_ATTEMPTS` times, or phase 2 failed.
    """
    if not 0 < size <= kernel.size:
        raise ValueError(f'Cannot draw {size} items from {kernel.size} candidates.')
    spectrum = decompose(kernel, size)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        chosen = eigen_select(spectrum, size, rng)
        if chosen is not None:
            return project_select(spectrum.eigenvectors[:, chosen], rng)
        LOGGER.debug('Eigenvector selection attempt %d of %d failed.', attempt, MAX_ATTEMPTS)
    rank = int(np.count_nonzero(spectrum.eigenvalues))
    raise DppSamplingError(
        f'Could not select {size} eigenvectors in {MAX_ATTEMPTS} attempts (kernel rank {rank}).'
    )


def _redraw(dist: ImportanceDistribution, taken: set[int], rng: np.random.Generator) -> int:
    free = np.array([i not in taken for i in dist.indices])
    if not free.any():
        raise DppSamplingError('No unselected location is left to fill the batch.')
    probs = dist.probabilities * free
    if probs.sum() <= 0:
        probs = free.astype(float)
    return int(rng.choice(dist.indices, p=probs / probs.sum()))


def select_batch(
    dist: ImportanceDistribution,
    pool: CandidatePool,
    size: int,
    rng: np.random.Generator,
    candidates: int = DEFAULT_CANDIDATES,
    bandwidth: float = DEFAULT_BANDWIDTH
) -> Batch:
    """
    Draw candidates from `dist`, thin them with a k-DPP and map the picks to
    `size` distinct grid locations. A pick that repeats an earlier location is
    re-drawn from `dist` restricted to locations not yet in the batch.
    """
    if size > dist.indices.size:
        raise ValueError(f'Cannot select {size} locations from {dist.indices.size} available.')
    drawn = draw_candidates(dist, pool, candidates, size, rng)
    kernel = build_kernel(pool.grid.normalize(pool.grid.points[drawn]), bandwidth, drawn)
    picks = sample_k_dpp(kernel, size, rng)
    locations: list[int] = []
    redrawn = 0
    for location in drawn[picks]:
        location = int(location)
        if location in locations:
            location = _redraw(dist, set(locations), rng)
            redrawn += 1
        locations.append(location)
    if redrawn:
        LOGGER.debug('Re-drew %d duplicate batch location(s).', redrawn)
    result = np.array(locations, dtype=np.intp)
    return Batch(picks, result, pool.grid.points[result], redrawn)
