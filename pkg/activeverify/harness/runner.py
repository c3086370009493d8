# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..common import Strategy
from ..exception import ConfigError, RunAbortedError
from ..grid import ParamGrid
from ..logging import LogConfig
from ..sim import get_system
from ..stl import format_formula, resolve_formula
from ..verify import LoopConfig, Problem, RunMetrics, ground_truth_sweep, run_closed_loop
from .config import ExperimentConfig
from .csvio import write_aggregate, write_runs, write_winrate
from .plots import render_plots
from .report import ComparisonReport, build_report


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    report: ComparisonReport
    metrics: tuple[RunMetrics, ...]
    artifacts: tuple[Path, ...] = ()

    @property
    def complete(self) -> bool:
        return self.report.complete


def prepare_problem(config: ExperimentConfig, jobs: int = 1) -> tuple[Problem, str]:
    """
    Resolve the benchmark, formula and grid of `config` and run (or load) the
    ground-truth sweep. Returns the problem and the canonical formula text.
    """
    spec = get_system(config.benchmark)
    _, formula = resolve_formula(config.formula or spec.default_formula, config.corrected_phi2)
    missing = formula.channels() - set(spec.channels)
    if missing:
        raise ConfigError(f'Benchmark "{spec.name}" has no channel(s) {sorted(missing)}.')
    text = format_formula(formula)
    resolution = config.resolution or spec.default_resolution
    if len(resolution) == 1:
        resolution = resolution * spec.param_dim
    try:
        grid = ParamGrid.from_box(spec.lower, spec.upper, list(resolution))
    except ValueError as exc:
        raise ConfigError(f'Invalid resolution {list(resolution)}: {exc}') from None
    sim_config = spec.default_config if config.dt is None else spec.default_config.replace(dt=config.dt)
    truth = ground_truth_sweep(spec, text, formula, grid, sim_config, config.cache_dir, jobs)
    LOGGER.info('Ground truth of "%s": %.1f%% of %d locations satisfy.', spec.name, 100 * truth.sat_fraction, grid.size)
    return Problem(spec, formula, grid, truth, sim_config, 1, config.reuse_truth), text


def run_once(problem: Problem, label: str, loop_config: LoopConfig) -> RunMetrics:
    """One run under a strategy label; an aborted run returns its partial metrics."""
    try:
        metrics = run_closed_loop(problem, loop_config).metrics
    except RunAbortedError as exc:
        metrics = exc.metrics if isinstance(exc.metrics, RunMetrics) else RunMetrics(loop_config.run_id, label)
        if not metrics.failure:
            metrics.failure = exc.message
        if metrics.aborted_batch is None:
            metrics.aborted_batch = exc.batch_index
    metrics.strategy = label
    return metrics


def _reference(config: ExperimentConfig) -> str:
    for plan in config.plans:
        if plan.strategy == Strategy.ENTROPY:
            return plan.label
    return config.plans[0].label


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    jobs: int = 1,
    deterministic_time: bool = False
) -> ExperimentResult:
    """
    Run every strategy label `config.runs` times. Within a run index all labels
    share the initial training set. Aborted runs become incomplete cells.

    With `out_dir`, writes `runs.csv`, `aggregate.csv`, `winrate.csv`,
    `summary.json` and the SVG plots there.
    """
    problem, text = prepare_problem(config, jobs)
    tasks = [
        (label, config.loop_config(label, run_id))
        for run_id in range(config.runs)
        for label in config.labels
    ]
    for _, loop_config in tasks[:len(config.labels)]:
        loop_config.verify_budget(problem.grid.size)
    LOGGER.info('Running %d runs x %d strategies with %d job(s).', config.runs, len(config.labels), jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_once, problem, label, lc) for label, lc in tasks]
            metrics = tuple(f.result() for f in futures)
    else:
        metrics = tuple(run_once(problem, label, lc) for label, lc in tasks)

    report = build_report(metrics, config.labels, config.batch_count, _reference(config))
    for failure in report.failures:
        LOGGER.warning('Incomplete cell: %s', failure)
    artifacts: tuple[Path, ...] = ()
    if out_dir is not None:
        artifacts = write_artifacts(out_dir, config, text, problem, metrics, report, deterministic_time)
    return ExperimentResult(report, metrics, artifacts)


def write_artifacts(
    out_dir: str | Path,
    config: ExperimentConfig,
    formula_text: str,
    problem: Problem,
    metrics: tuple[RunMetrics, ...],
    report: ComparisonReport,
    deterministic_time: bool = False
) -> tuple[Path, ...]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs, aggregate, winrate, summary = (
        out_dir / name for name in ('runs.csv', 'aggregate.csv', 'winrate.csv', 'summary.json')
    )
    write_runs(runs, metrics, deterministic_time)
    write_aggregate(aggregate, report)
    write_winrate(winrate, report)
    final = {
        c.label: {
            'training_size': int(c.training_size[-1]),
            'runs': int(c.runs[-1]),
            'error_mean': float(c.error_mean[-1]),
            'filtered_error_mean': float(c.filtered_error_mean[-1]),
        }
        for c in report.curves
    }
    data = {
        'config': config.summary(),
        'formula': formula_text,
        'grid_size': problem.grid.size,
        'sat_fraction': problem.truth.sat_fraction,
        'truth_key': problem.truth.key,
        'reference': report.reference,
        'final': final,
        'failures': list(report.failures),
    }
    summary.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + '\n', encoding='utf-8')
    plots = render_plots(report, out_dir)
    LOGGER.info('Wrote artifacts to %s.', out_dir)
    return (runs, aggregate, winrate, summary, *plots)
