# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""Exhaustive robustness over a grid, cached on disk as `.npz` files."""


from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..grid import ParamGrid
from ..logging import LogConfig
from ..sim import SimConfig, SystemSpec, measure_many
from ..stl import StlFormula
from ..types import BoolArray, FloatArray


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    Attributes:
        robustness: Measured robustness at every grid location.
        key: Cache key of the sweep.
    """

    robustness: FloatArray
    key: str

    @property
    def sat_mask(self) -> BoolArray:
        """Locations whose robustness is strictly positive."""
        return self.robustness > 0

    @property
    def sat_fraction(self) -> float:
        return float(self.sat_mask.mean())


def truth_key(spec: SystemSpec, formula_text: str, grid: ParamGrid, config: SimConfig) -> str:
    """sha256 over the benchmark, formula, grid axes, step, horizon and constants."""
    payload = json.dumps(
        [spec.name, formula_text, grid.key(), config.key()], sort_keys=True, default=repr
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def ground_truth_sweep(
    spec: SystemSpec,
    formula_text: str,
    formula: StlFormula,
    grid: ParamGrid,
    config: SimConfig | None = None,
    cache_dir: str | Path | None = None,
    jobs: int = 1
) -> GroundTruth:
    """
    Measure every grid location, reusing a cached sweep when one exists.

    Args:
        formula_text: Canonical text of `formula`, part of the cache key.
        cache_dir: Directory of `<key>.npz` files; None disables caching.
        jobs: Worker processes for the simulations.
    """
    config = spec.default_config if config is None else config
    key = truth_key(spec, formula_text, grid, config)
    path = Path(cache_dir) / f'{key}.npz' if cache_dir is not None else None
    if path is not None and path.exists():
        with np.load(path) as data:
            robustness = data['robustness']
        if robustness.shape == (grid.size,):
            LOGGER.info('Loaded ground truth of "%s" from %s.', spec.name, path)
            return GroundTruth(robustness, key)
        LOGGER.warning('Ignoring cached ground truth %s with shape %s.', path, robustness.shape)
    LOGGER.info('Sweeping %d locations of "%s".', grid.size, spec.name)
    robustness = measure_many(spec, formula, grid.points, config, jobs)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(path, robustness=robustness)
        LOGGER.info('Cached ground truth at %s.', path)
    return GroundTruth(robustness, key)
