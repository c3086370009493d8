# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Finite discretization of the uncertainty box and the pool of unobserved locations.

Locations are addressed by their flat index into `ParamGrid.points`
(C order over the axes), which is also the tie-break order everywhere.
"""


from __future__ import annotations

import logging
from typing import Any, Iterable, Sequence

import numpy as np

from .exception import DimensionMismatchError
from .logging import LogConfig
from .types import BoolArray, Coords, FloatArray, IntArray


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


def as_point(coords: Coords, dim: int | None = None) -> FloatArray:
    """Convert `coords` to a finite 1-D float array, optionally checking its dimension."""
    point = np.asarray(coords, dtype=float)
    if point.ndim != 1 or point.size == 0:
        raise DimensionMismatchError(f'A parameter point must be a non-empty vector, got shape {point.shape}.')
    if dim is not None and point.size != dim:
        raise DimensionMismatchError(f'Expected a point of dimension {dim}, got {point.size}.')
    if not np.all(np.isfinite(point)):
        raise ValueError(f'Parameter point coordinates must be finite, got {point}.')
    return point


class ParamGrid:
    """The regular grid `Theta_d` spanning a box, one axis per uncertain parameter."""

    def __init__(self, axes: Sequence[Coords]):
        """
        Args:
            axes: One strictly increasing coordinate vector per dimension.
        """
        self._verify_axes(axes)
        self._axes = tuple(np.asarray(axis, dtype=float) for axis in axes)
        mesh = np.meshgrid(*self._axes, indexing='ij')
        self._points = np.stack([m.ravel() for m in mesh], axis=1)
        self._lower = np.array([axis[0] for axis in self._axes])
        self._upper = np.array([axis[-1] for axis in self._axes])
        for array in (self._points, self._lower, self._upper):
            array.setflags(write=False)

    @classmethod
    def from_box(cls, lower: Coords, upper: Coords, resolution: int | Sequence[int]) -> ParamGrid:
        """Evenly spaced grid with `resolution` points per dimension (endpoints included)."""
        lower = as_point(lower)
        upper = as_point(upper, lower.size)
        if isinstance(resolution, int):
            resolution = [resolution] * lower.size
        if len(resolution) != lower.size:
            raise DimensionMismatchError(
                f'The "resolution" needs {lower.size} entries, got {len(resolution)}.'
            )
        return cls([np.linspace(lo, hi, int(n)) for lo, hi, n in zip(lower, upper, resolution)])

    def _verify_axes(self, axes: Any) -> None:
        if len(axes) == 0:
            raise ValueError('The "axes" must contain at least one dimension.')
        for d, axis in enumerate(axes):
            axis = np.asarray(axis, dtype=float)
            if axis.ndim != 1 or axis.size < 2:
                raise ValueError(f'Axis {d} must be a vector with at least 2 values.')
            if not np.all(np.isfinite(axis)) or np.any(np.diff(axis) <= 0):
                raise ValueError(f'Axis {d} must be finite and strictly increasing.')

    @property
    def axes(self) -> tuple[FloatArray, ...]:
        return self._axes

    @property
    def points(self) -> FloatArray:
        """All locations, shape `(size, dim)`."""
        return self._points

    @property
    def dim(self) -> int:
        return len(self._axes)

    @property
    def size(self) -> int:
        return self._points.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.size for axis in self._axes)

    @property
    def lower(self) -> FloatArray:
        return self._lower

    @property
    def upper(self) -> FloatArray:
        return self._upper

    @property
    def span(self) -> FloatArray:
        return self._upper - self._lower

    def normalize(self, points: FloatArray) -> FloatArray:
        """Map coordinates into the unit box of this grid."""
        return (np.asarray(points, dtype=float) - self._lower) / self.span

    @property
    def normalized_points(self) -> FloatArray:
        return self.normalize(self._points)

    def snap(self, coords: Coords) -> int:
        """Flat index of the grid location nearest to `coords`, per axis."""
        point = as_point(coords, self.dim)
        multi = tuple(int(np.argmin(np.abs(axis - x))) for axis, x in zip(self._axes, point))
        return int(np.ravel_multi_index(multi, self.shape))

    def key(self) -> tuple:
        """Hashable description of the grid, used for cache keys."""
        return tuple(tuple(float(v) for v in axis) for axis in self._axes)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f'ParamGrid(shape={self.shape}, lower={self._lower.tolist()}, upper={self._upper.tolist()})'


class CandidatePool:
    """The unobserved locations `U = Theta_d minus D`, kept as a mask over the grid."""

    def __init__(self, grid: ParamGrid, available_mask: BoolArray | None = None):
        self._grid = grid
        if available_mask is None:
            available_mask = np.ones(grid.size, dtype=bool)
        available_mask = np.asarray(available_mask, dtype=bool)
        if available_mask.shape != (grid.size,):
            raise DimensionMismatchError(
                f'The "available_mask" must have shape ({grid.size},), got {available_mask.shape}.'
            )
        self._mask = available_mask.copy()

    @property
    def grid(self) -> ParamGrid:
        return self._grid

    @property
    def available_mask(self) -> BoolArray:
        """A copy of the availability mask."""
        return self._mask.copy()

    @property
    def available_indices(self) -> IntArray:
        """Available flat grid indices in increasing order."""
        return np.flatnonzero(self._mask)

    @property
    def available_points(self) -> FloatArray:
        return self._grid.points[self._mask]

    @property
    def count(self) -> int:
        return int(self._mask.sum())

    def is_available(self, index: int) -> bool:
        return bool(self._mask[index])

    def remove(self, indices: Iterable[int]) -> None:
        """Mark `indices` as observed; each must currently be available."""
        indices = np.asarray(list(indices), dtype=np.intp)
        if indices.size and not np.all(self._mask[indices]):
            taken = indices[~self._mask[indices]].tolist()
            raise ValueError(f'Grid locations {taken} are not available.')
        if np.unique(indices).size != indices.size:
            raise ValueError(f'Duplicate grid locations in {indices.tolist()}.')
        self._mask[indices] = False
        LOGGER.debug('Removed %d locations, %d remain.', indices.size, self.count)

    def copy(self) -> CandidatePool:
        return CandidatePool(self._grid, self._mask)
