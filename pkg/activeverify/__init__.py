# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


__version__ = "0.1.0"


from .logging import LogConfig, PrefixFilter, RunLoggerAdapter
from .common import BatchMethod, Column, HyperMode, Strategy
from .grid import CandidatePool, ParamGrid
from .gp import GpModel, KernelParams, TrainingSet, fit, predict, prob_satisfaction
from .stl import parse_formula, robustness
from .sim import SimConfig, SystemSpec, get_system, measure, simulate
from .verify import LoopConfig, Problem, ground_truth_sweep, run_batch_approx_entropy, run_closed_loop
