# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import numpy as np

from ..exception import SimulationError
from ..types import FloatArray
from .config import Plant, SimConfig


def rk4(plant: Plant, config: SimConfig) -> tuple[FloatArray, FloatArray]:
    """
    Fixed-step classical Runge-Kutta integration from `plant.initial_state()`.

    Returns:
        `(times, states)` with `times[k] = k * dt` and `states` of shape `(steps + 1, n)`.

    Raises:
        SimulationError: A state became non-finite; `time` is the first bad sample.
    """
    dt = config.dt
    steps = config.steps
    times = np.arange(steps + 1) * dt
    x = np.array(plant.initial_state(), dtype=float)
    states = np.empty((steps + 1, x.size))
    states[0] = x
    f = plant.derivative
    half = 0.5 * dt
    for k in range(steps):
        t = times[k]
        plant.begin_step(t, x)
        k1 = f(t, x)
        k2 = f(t + half, x + half * k1)
        k3 = f(t + half, x + half * k2)
        k4 = f(t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise SimulationError(f'Non-finite state at t = {times[k + 1]:.6g} s.', float(times[k + 1]))
        states[k + 1] = x
    return times, states
