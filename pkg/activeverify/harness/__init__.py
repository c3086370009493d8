# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from .config import ExperimentConfig, StrategyPlan, load_config, parse_config
from .report import ComparisonReport, Curve, WinRate, build_report
from .csvio import read_runs, read_table, write_aggregate, write_runs, write_truth, write_winrate
from .plots import build_figure, render_plots
from .runner import ExperimentResult, prepare_problem, run_experiment, run_once
