# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


import numpy as np
import pytest

from activeverify.grid import ParamGrid
from activeverify.sim import MRAC2D
from activeverify.stl import resolve_formula
from activeverify.verify import GroundTruth, Problem


def disk_robustness(points: np.ndarray, radius: float = 7.0) -> np.ndarray:
    """Satisfied inside a disk around the origin, smooth and bounded by 1."""
    return 1.0 - np.sum(points ** 2, axis=1) / radius ** 2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def unit_grid() -> ParamGrid:
    return ParamGrid.from_box([-1.0, -1.0], [1.0, 1.0], 11)


@pytest.fixture
def disk_problem() -> Problem:
    """MRAC2D box on a 21 x 21 grid whose robustness is read from a synthetic sweep."""
    grid = ParamGrid.from_box(MRAC2D.lower, MRAC2D.upper, 21)
    _, formula = resolve_formula('mrac_bound')
    truth = GroundTruth(disk_robustness(grid.points), 'disk')
    return Problem(MRAC2D, formula, grid, truth, reuse_truth=True)
