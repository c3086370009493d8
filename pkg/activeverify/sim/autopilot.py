# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Surrogate of a light-aircraft autopilot holding altitude and turning to a heading.

Lateral-directional motion is a linear stability-derivative model in
sideslip `beta`, roll rate `p`, yaw rate `r`, bank `phi` and heading `psi`.
Longitudinal motion tracks pitch rate `q`, pitch attitude `theta_p`, flight
path angle `gamma` and altitude `h`, coupled to the bank angle through the
vertical lift component:

    gamma' = (g / V) ((alpha / alpha_0) cos(phi) - cos(gamma)),  alpha = theta_p - gamma
    q'     = (M_alpha (alpha - alpha_0) + M_q q + M_de delta_e) / inertia_scale
    h'     = V sin(gamma)

The autopilot is a heading-hold outer loop commanding bank, a roll
attitude loop on the ailerons, a sideslip-feedback rudder and an altitude
hold commanding pitch on the elevator. Every surface deflection saturates.

Parameters are the initial roll, pitch and heading in degrees and,
optionally, the pitch moment of inertia.

State layout: `[beta, p, r, phi, psi, q, theta_p, gamma, h]`.
"""


from __future__ import annotations

import math
from typing import Any

import numpy as np

from ..types import FloatArray
from .config import SimConfig


FEET_PER_METER = 3.280839895

AUTOPILOT_CHANNELS = (
    'x', 'h', 'phi', 'theta', 'psi', 'beta', 'p', 'q', 'r', 'gamma', 'delta_a', 'delta_e', 'delta_r'
)

AUTOPILOT_CONSTANTS: dict[str, Any] = {
    'airspeed': 50.0,
    'gravity': 9.81,
    'alpha_0': 0.07,
    'nominal_inertia': 6930.0,
    'heading_ref_deg': 112.0,
    # lateral-directional derivatives
    'y_beta': -0.15,
    'l_beta': -4.0,
    'l_p': -5.0,
    'l_r': 1.2,
    'l_da': 6.0,
    'n_beta': 2.5,
    'n_p': -0.3,
    'n_r': -1.0,
    'n_dr': 2.0,
    # longitudinal derivatives
    'm_alpha': -8.0,
    'm_q': -3.0,
    'm_de': 10.0,
    # gains
    'k_psi': 1.0,
    'k_phi': 2.0,
    'k_p': 0.5,
    'k_beta': 2.0,
    'k_h': 0.01,
    'k_hdot': 0.03,
    'k_theta': 2.0,
    'k_q': 0.5,
    # limits, radians
    'bank_limit': np.deg2rad(30.0),
    'pitch_cmd_low': -0.2,
    'pitch_cmd_high': 0.25,
    'aileron_limit': np.deg2rad(20.0),
    'elevator_limit': np.deg2rad(20.0),
    'rudder_limit': np.deg2rad(25.0),
}


def wrap_angle(angle: float) -> float:
    """Wrap to `[-pi, pi)`."""
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _clip(value: float, limit: float) -> float:
    return min(max(value, -limit), limit)


class AutopilotPlant:

    def __init__(self, theta: FloatArray, config: SimConfig) -> None:
        theta = np.asarray(theta, dtype=float)
        self._roll0, self._pitch0, self._heading0 = np.deg2rad(theta[:3])
        c = {k: float(v) for k, v in config.constants.items() if isinstance(v, int | float)}
        self._c = c
        self._inertia_scale = float(theta[3]) / c['nominal_inertia'] if theta.size > 3 else 1.0
        self._g_over_v = c['gravity'] / c['airspeed']
        self._psi_ref = np.deg2rad(c['heading_ref_deg'])

    def initial_state(self) -> FloatArray:
        return np.array([0.0, 0.0, 0.0, self._roll0, self._heading0, 0.0, self._pitch0, 0.0, 0.0])

    def begin_step(self, t: float, x: FloatArray) -> None:
        pass

    def surfaces(self, x: FloatArray) -> tuple[float, float, float]:
        """Saturated aileron, elevator and rudder deflections for state `x`."""
        c = self._c
        beta, p, _, phi, psi, q, theta_p, gamma, h = x.tolist()
        phi_cmd = _clip(c['k_psi'] * wrap_angle(self._psi_ref - psi), c['bank_limit'])
        delta_a = _clip(c['k_phi'] * (phi_cmd - phi) - c['k_p'] * p, c['aileron_limit'])
        delta_r = _clip(c['k_beta'] * beta, c['rudder_limit'])
        h_dot = c['airspeed'] * math.sin(gamma)
        correction = min(max(-c['k_h'] * h - c['k_hdot'] * h_dot, c['pitch_cmd_low']), c['pitch_cmd_high'])
        theta_cmd = c['alpha_0'] + correction
        delta_e = _clip(c['k_theta'] * (theta_cmd - theta_p) - c['k_q'] * q, c['elevator_limit'])
        return delta_a, delta_e, delta_r

    def derivative(self, t: float, x: FloatArray) -> FloatArray:
        c = self._c
        beta, p, r, phi, _, q, theta_p, gamma, _ = x.tolist()
        delta_a, delta_e, delta_r = self.surfaces(x)
        alpha = theta_p - gamma
        return np.array([
            c['y_beta'] * beta - r + self._g_over_v * phi,
            c['l_beta'] * beta + c['l_p'] * p + c['l_r'] * r + c['l_da'] * delta_a,
            c['n_beta'] * beta + c['n_p'] * p + c['n_r'] * r + c['n_dr'] * delta_r,
            p,
            r,
            (c['m_alpha'] * (alpha - c['alpha_0']) + c['m_q'] * q + c['m_de'] * delta_e) / self._inertia_scale,
            q,
            self._g_over_v * ((alpha / c['alpha_0']) * math.cos(phi) - math.cos(gamma)),
            c['airspeed'] * math.sin(gamma),
        ])

    def outputs(self, times: FloatArray, states: FloatArray) -> dict[str, FloatArray]:
        deflections = np.array([self.surfaces(x) for x in states]).reshape(-1, 3)
        beta, p, r, phi, psi, q, theta_p, gamma, h = states.T
        return {
            'x': (h - h[0]) * FEET_PER_METER,
            'h': h,
            'phi': np.rad2deg(phi),
            'theta': np.rad2deg(theta_p),
            'psi': np.rad2deg(psi),
            'beta': beta, 'p': p, 'q': q, 'r': r, 'gamma': gamma,
            'delta_a': deflections[:, 0],
            'delta_e': deflections[:, 1],
            'delta_r': deflections[:, 2],
        }


def build_autopilot(theta: FloatArray, config: SimConfig) -> AutopilotPlant:
    return AutopilotPlant(theta, config)
