# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Command line entry point.

Verbs:

- `sweep`: exhaustive ground truth of the configured benchmark, written to `truth.csv`.
- `run`: one run of the first strategy label, written to `runs.csv`.
- `experiment`: every label over every run, with CSV, JSON and SVG artifacts.
- `plot`: re-render the report and plots from an existing `runs.csv`.

Exit codes: 0 on success, 2 when some runs aborted, 1 on configuration errors.
"""


from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Sequence

from .. import __version__
from ..exception import BudgetError, ConfigError, StlSyntaxError
from ..logging import LogConfig
from .config import ExperimentConfig, load_config
from .csvio import read_runs, write_aggregate, write_runs, write_truth, write_winrate
from .plots import render_plots
from .report import build_report
from .runner import prepare_problem, run_experiment, run_once


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='activeverify',
        description='Closed-loop statistical verification of control systems.'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='verb', required=True)
    for verb, help_text in (
        ('sweep', 'exhaustive ground truth over the grid'),
        ('run', 'a single closed-loop run'),
        ('experiment', 'multi-run, multi-strategy comparison'),
        ('plot', 're-render plots from runs.csv'),
    ):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument('--config', type=Path, help='experiment INI file')
        p.add_argument('--out', type=Path, default=Path('results'), help='output directory')
        p.add_argument('--jobs', type=int, default=1, help='worker processes')
        p.add_argument('--seed', type=int, help='master seed, overrides the file')
        p.add_argument('--log-level', default='INFO', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
        if verb == 'run':
            p.add_argument('--run-id', type=int, default=0, help='run index')
            p.add_argument('--strategy', help='strategy label, defaults to the first')
        if verb in ('run', 'experiment'):
            p.add_argument('--deterministic-time', action='store_true', help='write 0.0 seconds')
        if verb == 'plot':
            p.add_argument('--runs', type=Path, help='runs.csv to read, defaults to OUT/runs.csv')
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    if args.jobs < 1:
        raise ConfigError(f'The "--jobs" must be at least 1, got {args.jobs}.')
    return config


def _sweep(args: argparse.Namespace) -> int:
    config = _config(args)
    problem, text = prepare_problem(config, args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    write_truth(args.out / 'truth.csv', problem.grid.points, problem.truth.robustness, problem.spec.param_names)
    print(f'{problem.spec.name}: {text}')
    print(f'{problem.grid.size} locations, {100 * problem.truth.sat_fraction:.1f}% satisfied')
    return EXIT_OK


def _run(args: argparse.Namespace) -> int:
    config = _config(args)
    label = args.strategy or config.labels[0]
    if label not in config.labels:
        raise ConfigError(f'Unknown strategy label "{label}", expected one of {list(config.labels)}.')
    problem, _ = prepare_problem(config, args.jobs)
    problem = dataclasses.replace(problem, jobs=args.jobs)
    metrics = run_once(problem, label, config.loop_config(label, args.run_id))
    args.out.mkdir(parents=True, exist_ok=True)
    write_runs(args.out / 'runs.csv', [metrics], args.deterministic_time)
    for record in metrics.records:
        print(f'batch {record.batch_index:3d}  |L| = {record.training_size:5d}  error = {record.error:.4f}')
    return EXIT_OK if metrics.completed else EXIT_PARTIAL


def _experiment(args: argparse.Namespace) -> int:
    config = _config(args)
    result = run_experiment(config, args.out, args.jobs, args.deterministic_time)
    for curve in result.report.curves:
        print(f'{curve.label:>20s}: final error {curve.error_mean[-1]:.4f} over {int(curve.runs[-1])} run(s)')
    return EXIT_OK if result.complete else EXIT_PARTIAL


def _plot(args: argparse.Namespace) -> int:
    path = args.runs or args.out / 'runs.csv'
    try:
        metrics = read_runs(path)
    except OSError as exc:
        raise ConfigError(f'Cannot read {path}: {exc}') from None
    labels = tuple(dict.fromkeys(m.strategy for m in metrics))
    batches = max((len(m.records) for m in metrics), default=1) - 1
    report = build_report(metrics, labels, batches)
    args.out.mkdir(parents=True, exist_ok=True)
    write_aggregate(args.out / 'aggregate.csv', report)
    write_winrate(args.out / 'winrate.csv', report)
    render_plots(report, args.out)
    return EXIT_OK


VERBS = {'sweep': _sweep, 'run': _run, 'experiment': _experiment, 'plot': _plot}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(**LogConfig.basic_config(args.out, getattr(logging, args.log_level)), force=True)
    try:
        return VERBS[args.verb](args)
    except (ConfigError, BudgetError, StlSyntaxError) as exc:
        LOGGER.error('Configuration error: %s', exc)
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
