# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Concurrent-learning model reference adaptive control of a second-order plant.

Plant with matched uncertainty `theta`:

    x1' = x2
    x2' = theta . x + u

Reference model (natural frequency `omega_n`, damping `zeta`) driven by a
piecewise-constant command `r`:

    xm1' = xm2
    xm2' = -omega_n^2 xm1 - 2 zeta omega_n xm2 + omega_n^2 r

Control `u = u_nom - theta_hat . x` where `u_nom` places the nominal loop on
the reference model. With `e = xm - x` and `P` solving
`A_m^T P + P A_m = -Q`, the estimate follows

    theta_hat' = -gamma x (e^T P B) - gamma_c sum_j x_j (theta_hat . x_j - delta_j)

where `(x_j, delta_j)` is a FIFO history stack of recorded states and model
errors. The model error is recorded exactly (`delta_j = theta . x_j`), which
stands in for a smoothed derivative estimate.

State layout: `[x1, x2, xm1, xm2, theta_hat1, theta_hat2]`.
"""


from __future__ import annotations

from collections import deque
from typing import Any

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from ..types import FloatArray
from .config import SimConfig


MRAC_CHANNELS = ('x1', 'x2', 'xm1', 'xm2', 'e1', 'e2', 'u', 'r', 'theta_hat1', 'theta_hat2')

MRAC_CONSTANTS: dict[str, Any] = {
    'omega_n': 1.0,
    'zeta': 0.5,
    'gamma': 2.0,
    'gamma_c': 0.5,
    'stack_size': 20,
    'record_interval': 0.5,
    'record_threshold': 0.05,
    'reference_levels': (1.0, 1.4, -1.4, 0.0),
    'reference_segment': 10.0,
}


def reference_command(t: float, levels: tuple[float, ...], segment: float) -> float:
    """Piecewise-constant command, periodic over `len(levels) * segment`."""
    k = int(np.floor(t / segment + 1e-9))
    return float(levels[k % len(levels)])


class MracPlant:
    """Closed loop for one uncertainty `theta`; `x1_offset` shifts the plant's initial position."""

    def __init__(self, theta: FloatArray, config: SimConfig, x1_offset: float = 0.0) -> None:
        self._theta = np.asarray(theta, dtype=float)[:2].copy()
        self._theta0, self._theta1 = (float(v) for v in self._theta)
        self._x1_offset = float(x1_offset)
        wn = float(config['omega_n'])
        zeta = float(config['zeta'])
        self._wn2 = wn * wn
        self._damp = 2.0 * zeta * wn
        self._gamma = float(config['gamma'])
        self._gamma_c = float(config['gamma_c'])
        self._levels = tuple(float(v) for v in config['reference_levels'])
        self._segment = float(config['reference_segment'])
        self._interval = float(config['record_interval'])
        self._threshold = float(config['record_threshold'])
        a_m = np.array([[0.0, 1.0], [-self._wn2, -self._damp]])
        p = solve_continuous_lyapunov(a_m.T, -np.eye(2))
        # P B with B = [0, 1]^T
        self._pb = (float(p[0, 1]), float(p[1, 1]))
        self._stack: deque[tuple[FloatArray, float]] = deque(maxlen=int(config['stack_size']))
        # sum_j x_j x_j^T and sum_j x_j delta_j over the stack
        self._gram = (0.0, 0.0, 0.0)
        self._moment = (0.0, 0.0)
        self._r = 0.0

    @property
    def stack(self) -> list[tuple[FloatArray, float]]:
        """Recorded `(x_j, delta_j)` pairs, oldest first."""
        return list(self._stack)

    def initial_state(self) -> FloatArray:
        return np.array([self._x1_offset, 0.0, 0.0, 0.0, 0.0, 0.0])

    def begin_step(self, t: float, x: FloatArray) -> None:
        self._r = reference_command(t, self._levels, self._segment)
        k = round(t / self._interval)
        if abs(t - k * self._interval) > 1e-9:
            return
        point = x[:2].copy()
        if self._stack and np.linalg.norm(point - self._stack[-1][0]) < self._threshold:
            return
        self._stack.append((point, float(self._theta @ point)))
        points = np.array([p for p, _ in self._stack])
        deltas = np.array([d for _, d in self._stack])
        gram = points.T @ points
        moment = points.T @ deltas
        self._gram = (float(gram[0, 0]), float(gram[0, 1]), float(gram[1, 1]))
        self._moment = (float(moment[0]), float(moment[1]))

    def derivative(self, t: float, x: FloatArray) -> FloatArray:
        x1, x2, xm1, xm2, th1, th2 = x.tolist()
        r = self._r
        wn2, damp = self._wn2, self._damp
        u_nom = -wn2 * x1 - damp * x2 + wn2 * r
        u = u_nom - (th1 * x1 + th2 * x2)
        # e^T P B
        epb = (xm1 - x1) * self._pb[0] + (xm2 - x2) * self._pb[1]
        g00, g01, g11 = self._gram
        m0, m1 = self._moment
        gc = self._gamma_c
        dth1 = -self._gamma * x1 * epb - gc * (g00 * th1 + g01 * th2 - m0)
        dth2 = -self._gamma * x2 * epb - gc * (g01 * th1 + g11 * th2 - m1)
        return np.array([
            x2,
            (self._theta0 * x1 + self._theta1 * x2) + u,
            xm2,
            -wn2 * xm1 - damp * xm2 + wn2 * r,
            dth1,
            dth2,
        ])

    def outputs(self, times: FloatArray, states: FloatArray) -> dict[str, FloatArray]:
        r = np.array([reference_command(t, self._levels, self._segment) for t in times])
        x1, x2, xm1, xm2, th1, th2 = states.T
        u = -self._wn2 * x1 - self._damp * x2 + self._wn2 * r - (th1 * x1 + th2 * x2)
        return {
            'x1': x1, 'x2': x2, 'xm1': xm1, 'xm2': xm2,
            'e1': xm1 - x1, 'e2': xm2 - x2,
            'u': u, 'r': r,
            'theta_hat1': th1, 'theta_hat2': th2,
        }


def build_mrac2d(theta: FloatArray, config: SimConfig) -> MracPlant:
    return MracPlant(theta, config)


def build_mrac3d(theta: FloatArray, config: SimConfig) -> MracPlant:
    """The third parameter offsets the plant's initial position `x1(0)`."""
    return MracPlant(theta, config, x1_offset=float(theta[2]))
