# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

from types import MappingProxyType

import numpy as np

from ..exception import ConfigError
from .autopilot import AUTOPILOT_CHANNELS, AUTOPILOT_CONSTANTS, build_autopilot
from .config import SimConfig, SystemSpec
from .mrac import MRAC_CHANNELS, MRAC_CONSTANTS, build_mrac2d, build_mrac3d


MRAC_CONFIG = SimConfig(40.0, 0.01, MRAC_CONSTANTS)
AUTOPILOT_CONFIG = SimConfig(50.0, 0.01, AUTOPILOT_CONSTANTS)

# Satisfied-side MRAC robustness 1 - max|e1| lies in (0, 1], so no jump between
# satisfied neighbours reaches 1. `calibrate_continuity_bound` on the default
# sweep measures the actual largest jump, which must stay positive and below this.
MRAC_CONTINUITY_BOUND = 1.0

MRAC2D = SystemSpec(
    name='mrac2d',
    state_dim=6,
    param_names=('theta1', 'theta2'),
    lower=np.array([-10.0, -10.0]),
    upper=np.array([10.0, 10.0]),
    x0=np.zeros(6),
    build=build_mrac2d,
    channels=MRAC_CHANNELS,
    default_config=MRAC_CONFIG,
    default_formula='mrac_bound',
    default_resolution=(41, 41),
    continuity_bound=MRAC_CONTINUITY_BOUND,
    description='Concurrent-learning MRAC with uncertain plant coefficients.'
)

MRAC3D = SystemSpec(
    name='mrac3d',
    state_dim=6,
    param_names=('theta1', 'theta2', 'x1_0'),
    lower=np.array([-5.0, -5.0, -1.0]),
    upper=np.array([5.0, 5.0, 1.0]),
    x0=np.zeros(6),
    build=build_mrac3d,
    channels=MRAC_CHANNELS,
    default_config=MRAC_CONFIG,
    default_formula='mrac_bound',
    default_resolution=(21, 21, 11),
    continuity_bound=MRAC_CONTINUITY_BOUND,
    description='Concurrent-learning MRAC with an uncertain initial position.'
)

AUTOPILOT = SystemSpec(
    name='autopilot',
    state_dim=9,
    param_names=('roll_deg', 'pitch_deg', 'heading_deg'),
    lower=np.array([-60.0, 4.0, 75.0]),
    upper=np.array([60.0, 19.0, 145.0]),
    x0=np.zeros(9),
    build=build_autopilot,
    channels=AUTOPILOT_CHANNELS,
    default_config=AUTOPILOT_CONFIG,
    default_formula='autopilot_height',
    default_resolution=(13, 7, 8),
    description='Heading-hold and altitude-hold autopilot surrogate.'
)

AUTOPILOT4D = SystemSpec(
    name='autopilot4d',
    state_dim=9,
    param_names=('roll_deg', 'pitch_deg', 'heading_deg', 'inertia'),
    lower=np.array([-60.0, 4.0, 75.0, 5430.0]),
    upper=np.array([60.0, 19.0, 145.0, 8430.0]),
    x0=np.zeros(9),
    build=build_autopilot,
    channels=AUTOPILOT_CHANNELS,
    default_config=AUTOPILOT_CONFIG,
    default_formula='autopilot_height',
    default_resolution=(7, 6, 6, 4),
    description='Autopilot surrogate with an uncertain pitch moment of inertia.'
)

REGISTRY = MappingProxyType({spec.name: spec for spec in (MRAC2D, MRAC3D, AUTOPILOT, AUTOPILOT4D)})
BENCHMARK_NAMES = tuple(REGISTRY)


def get_system(name: str) -> SystemSpec:
    """Look up a benchmark by its registry name."""
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f'Unknown benchmark "{name}", expected one of {list(BENCHMARK_NAMES)}.') from None
