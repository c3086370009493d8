# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from .config import Plant, SimConfig, SystemSpec
from .integrate import rk4
from .mrac import MracPlant, reference_command
from .autopilot import AutopilotPlant, wrap_angle
from .registry import AUTOPILOT, AUTOPILOT4D, BENCHMARK_NAMES, MRAC2D, MRAC3D, REGISTRY, get_system
from .measure import calibrate_continuity_bound, measure, measure_many, satisfied_steps, simulate, simulate_many
