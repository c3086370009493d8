# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""Named requirement formulas of the shipped benchmarks."""


from __future__ import annotations

from .formula import StlFormula
from .parser import parse_formula


MRAC_BOUND = 'G[0,40](1 - abs(e1 - 0) >= 0)'
"""Tracking error component `e1` stays inside the unit ball for 40 s."""

MRAC_PHI1 = 'F[2,3](x1 - 0.7 >= 0) and F[2,3](1.3 - x1 >= 0)'

MRAC_PHI2 = 'F[12,13](x1 - 1.1 >= 0) and F[2,3](1.7 - x1 >= 0)'
"""As published; the second window is most likely meant to be [12,13], see `MRAC_PHI2_CORRECTED`."""

MRAC_PHI2_CORRECTED = 'F[12,13](x1 - 1.1 >= 0) and F[12,13](1.7 - x1 >= 0)'

MRAC_PHI3 = 'G[22.4,22.6](x1 + 1.6 >= 0) and G[22.4,22.6](-1.2 - x1 >= 0)'

AUTOPILOT_HEIGHT = 'G[0,50](35 - abs(x - 0) >= 0)'
"""Altitude (ft, relative to the altitude at t=0) stays within 35 ft for 50 s."""


def conjunction_parts(corrected_phi2: bool = False) -> tuple[str, str, str]:
    """The three MRAC requirements whose minimum robustness is the measurement."""
    return MRAC_PHI1, MRAC_PHI2_CORRECTED if corrected_phi2 else MRAC_PHI2, MRAC_PHI3


def preset_text(name: str, corrected_phi2: bool = False) -> str:
    """Formula text of a preset name."""
    if name == 'mrac_conjunction':
        return ' and '.join(f'({part})' for part in conjunction_parts(corrected_phi2))
    presets = {
        'mrac_bound': MRAC_BOUND,
        'mrac_phi1': MRAC_PHI1,
        'mrac_phi2': MRAC_PHI2_CORRECTED if corrected_phi2 else MRAC_PHI2,
        'mrac_phi3': MRAC_PHI3,
        'autopilot_height': AUTOPILOT_HEIGHT,
    }
    try:
        return presets[name]
    except KeyError:
        raise KeyError(
            f'Unknown formula preset "{name}"; choose from {sorted([*presets, "mrac_conjunction"])}.'
        ) from None


PRESET_NAMES = ('mrac_bound', 'mrac_phi1', 'mrac_phi2', 'mrac_phi3', 'mrac_conjunction', 'autopilot_height')


def resolve_formula(text_or_name: str, corrected_phi2: bool = False) -> tuple[str, StlFormula]:
    """Accept either a preset name or formula text; returns `(text, ast)`."""
    text = preset_text(text_or_name, corrected_phi2) if text_or_name in PRESET_NAMES else text_or_name
    return text, parse_formula(text)
