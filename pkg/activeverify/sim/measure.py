# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from ..exception import DimensionMismatchError, StlEvaluationError
from ..grid import ParamGrid, as_point
from ..logging import LogConfig
from ..stl import RobustnessMeasurement, StlFormula, Trace, robustness
from ..types import Coords, FloatArray
from .config import SimConfig, SystemSpec
from .integrate import rk4


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


def _verify_theta(spec: SystemSpec, theta: Coords) -> FloatArray:
    try:
        point = as_point(theta, spec.param_dim)
    except DimensionMismatchError:
        raise DimensionMismatchError(
            f'Benchmark "{spec.name}" expects {spec.param_dim} parameters, got {np.size(theta)}.'
        ) from None
    if not spec.contains(point):
        raise ValueError(f'Parameter point {point} lies outside the box of "{spec.name}".')
    return point


def simulate(spec: SystemSpec, theta: Coords, config: SimConfig | None = None) -> Trace:
    """
    Integrate the closed loop of `spec` at `theta` and sample every declared channel.

    Args:
        spec: The benchmark.
        theta: A point inside (or on the boundary of) the benchmark box.
        config: Horizon, step and constants; `spec.default_config` if None.

    Raises:
        DimensionMismatchError: `theta` has the wrong dimension.
        ValueError: `theta` lies outside the box.
        SimulationError: The state became non-finite.
    """
    point = _verify_theta(spec, theta)
    config = spec.default_config if config is None else config
    plant = spec.build(point, config)
    times, states = rk4(plant, config)
    return Trace(times, plant.outputs(times, states))


def measure(
    spec: SystemSpec,
    formula: StlFormula,
    theta: Coords,
    config: SimConfig | None = None
) -> RobustnessMeasurement:
    """Robustness of `formula` over `simulate(spec, theta, config)`."""
    missing = formula.channels() - set(spec.channels)
    if missing:
        raise StlEvaluationError(f'Benchmark "{spec.name}" has no channel(s) {sorted(missing)}.')
    return robustness(formula, simulate(spec, theta, config))


def _map(func, thetas: Iterable[Coords], jobs: int) -> list:
    thetas = [np.asarray(t, dtype=float) for t in thetas]
    if jobs <= 1 or len(thetas) <= 1:
        return [func(t) for t in thetas]
    LOGGER.debug('Mapping %d parameter points over %d processes.', len(thetas), jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, thetas))


def simulate_many(
    spec: SystemSpec,
    thetas: Iterable[Coords],
    config: SimConfig | None = None,
    jobs: int = 1
) -> list[Trace]:
    """`simulate` over many points, in input order; `jobs > 1` uses a process pool."""
    return _map(partial(simulate, spec, config=config), thetas, jobs)


def measure_many(
    spec: SystemSpec,
    formula: StlFormula,
    thetas: Iterable[Coords],
    config: SimConfig | None = None,
    jobs: int = 1
) -> FloatArray:
    """Robustness values of `measure` over many points, in input order."""
    results = _map(partial(measure, spec, formula, config=config), thetas, jobs)
    return np.array([r.value for r in results], dtype=float)


def satisfied_steps(values: FloatArray) -> FloatArray:
    """
    Absolute robustness differences between grid neighbours that both satisfy
    the requirement, over every axis of the grid-shaped `values`.
    """
    values = np.asarray(values, dtype=float)
    sat = values > 0
    steps = []
    for axis in range(values.ndim):
        n = values.shape[axis]
        step = np.abs(np.diff(values, axis=axis))
        both = sat.take(range(1, n), axis=axis) & sat.take(range(n - 1), axis=axis)
        steps.append(step[both])
    return np.concatenate(steps) if steps else np.empty(0)


def calibrate_continuity_bound(
    spec: SystemSpec,
    formula: StlFormula,
    resolution: int | Sequence[int] | None = None,
    config: SimConfig | None = None,
    jobs: int = 1
) -> float:
    """
    Sweep the default grid of `spec` and return the largest satisfied-side
    robustness jump between neighbours; 0.0 if no two neighbours are satisfied.
    """
    resolution = spec.default_resolution if resolution is None else resolution
    grid = ParamGrid.from_box(spec.lower, spec.upper, resolution)
    values = measure_many(spec, formula, grid.points, config, jobs).reshape(grid.shape)
    steps = satisfied_steps(values)
    bound = float(steps.max()) if steps.size else 0.0
    LOGGER.info('Continuity of "%s" over %d points: largest satisfied-side step %.6g.', spec.name, grid.size, bound)
    return bound
