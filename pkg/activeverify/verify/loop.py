# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Closed-loop verification: fit a GP to robustness measurements, pick the next
batch of grid locations, simulate them, retrain, and track the
misclassification error against the exhaustive ground truth.

Three batch methods share one driver:

- `kdpp`: importance draws from the strategy's scores thinned by a k-DPP.
- `approx_entropy`: greedy picks; after each pick only the covariance is
  updated (the mean stays that of the trained model) before rescoring.
- `plain_argmax`: the `M` best current scores.
"""


from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..acquisition import (
    AcquisitionScores,
    importance_distribution,
    score_from_moments,
    score_pool,
    select_sequential,
    select_top,
)
from ..common import BatchMethod, HyperMode, Strategy
from ..exception import ActiveVerifyError, ConfigError, RunAbortedError
from ..gp import (
    GpModel,
    KernelParams,
    TrainingSet,
    fit,
    initial_params,
    maximize_likelihood,
    predict_many,
)
from ..grid import CandidatePool, ParamGrid
from ..kdpp import select_batch
from ..logging import LogConfig, RunLoggerAdapter
from ..sim import SimConfig, SystemSpec, measure_many
from ..stl import StlFormula
from ..types import FloatArray, IntArray
from .config import LoopConfig
from .metrics import BatchRecord, RunMetrics
from .pending import update_covariance_with_pending
from .regions import RegionEstimate, classify_regions, confidence_filtered_error, misclassification_error
from .truth import GroundTruth


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)


@dataclass(frozen=True, eq=False)
class Problem:
    """
    A benchmark bound to a requirement, a grid and its ground truth.

    With `reuse_truth` the robustness of a selected location is read from the
    ground-truth sweep, which holds the value the simulation would return;
    every read still counts as one simulation.
    """

    spec: SystemSpec
    formula: StlFormula
    grid: ParamGrid
    truth: GroundTruth
    sim_config: SimConfig | None = None
    jobs: int = 1
    reuse_truth: bool = True

    def __post_init__(self):
        if self.truth.robustness.shape != (self.grid.size,):
            raise ValueError(f'Ground truth covers {self.truth.robustness.size} locations, grid has {self.grid.size}.')
        if self.grid.dim != self.spec.param_dim:
            raise ValueError(f'Grid dimension {self.grid.dim} differs from "{self.spec.name}" ({self.spec.param_dim}).')

    def measure(self, locations: IntArray) -> FloatArray:
        locations = np.asarray(locations, dtype=np.intp)
        if self.reuse_truth:
            return self.truth.robustness[locations].copy()
        return measure_many(self.spec, self.formula, self.grid.points[locations], self.sim_config, self.jobs)


@dataclass(frozen=True, eq=False)
class RunResult:
    metrics: RunMetrics
    estimate: RegionEstimate
    training: TrainingSet
    params: KernelParams


@dataclass(frozen=True)
class Selection:
    locations: IntArray
    uniform_fallback: bool = False
    redrawn: int = 0


type Selector = Callable[[GpModel, CandidatePool, LoopConfig, np.random.Generator], Selection]


def select_kdpp(model: GpModel, pool: CandidatePool, config: LoopConfig, rng: np.random.Generator) -> Selection:
    """Importance distribution from the scores, then a k-DPP batch."""
    if config.strategy == Strategy.EMC:
        raise ConfigError('The "emc" scores are not a density and cannot drive the k-DPP.')
    if config.strategy == Strategy.RANDOM:
        indices = pool.available_indices
        scores = AcquisitionScores(Strategy.RANDOM, indices, np.ones(indices.size))
    else:
        scores = score_pool(model, pool, config.strategy, rng)
    dist = importance_distribution(scores)
    batch = select_batch(dist, pool, config.batch_size, rng, config.candidates, config.bandwidth)
    return Selection(batch.locations, dist.uniform_fallback, batch.redrawn)


def select_plain_argmax(
    model: GpModel,
    pool: CandidatePool,
    config: LoopConfig,
    rng: np.random.Generator
) -> Selection:
    """The `M` best current scores."""
    return Selection(select_top(score_pool(model, pool, config.strategy, rng), config.batch_size))


def select_approx_entropy(
    model: GpModel,
    pool: CandidatePool,
    config: LoopConfig,
    rng: np.random.Generator
) -> Selection:
    """
    Greedy batch: pick the best score, add the pick to the pending set, update
    the variance as if the pending locations were observed (mean held), rescore.
    """
    indices = pool.available_indices
    points = pool.grid.points[indices]
    mean, variance = predict_many(model, points)
    free = np.ones(indices.size, dtype=bool)
    pending: list[int] = []
    for _ in range(config.batch_size):
        if pending:
            variance = update_covariance_with_pending(model, pool.grid.points[pending])(points)
        scores = score_from_moments(config.strategy, indices[free], mean[free], variance[free], rng)
        pick = select_sequential(scores)
        pending.append(pick)
        free[np.searchsorted(indices, pick)] = False
    return Selection(np.array(pending, dtype=np.intp))


SELECTORS: dict[str, Selector] = {
    BatchMethod.KDPP: select_kdpp,
    BatchMethod.APPROX_ENTROPY: select_approx_entropy,
    BatchMethod.PLAIN_ARGMAX: select_plain_argmax,
}


def _hyperparameters(
    training: TrainingSet,
    grid: ParamGrid,
    previous: KernelParams | None,
    config: LoopConfig,
    batch_index: int
) -> KernelParams:
    if previous is None:
        previous = initial_params(training, grid, config.lengthscale_scale)
        if config.hyperparameter_mode == HyperMode.STATIC:
            return previous
    elif config.hyperparameter_mode == HyperMode.STATIC:
        return previous.with_jitter(0.0)
    result = maximize_likelihood(
        training, previous.with_jitter(0.0), config.restarts, config.hyper_rng(batch_index)
    )
    if result.cap_reached:
        LOGGER.debug('Likelihood search stopped with gradient norm %.3g.', result.grad_norm)
    return result.params.with_jitter(0.0)


def _record(
    model: GpModel,
    problem: Problem,
    config: LoopConfig,
    batch_index: int,
    started: float,
    simulations: int,
    selection: Selection | None = None
) -> tuple[BatchRecord, RegionEstimate]:
    estimate = classify_regions(model, problem.grid)
    truth = problem.truth.sat_mask
    filtered = confidence_filtered_error(estimate, truth, config.confidence_threshold)
    record = BatchRecord(
        batch_index=batch_index,
        training_size=model.size,
        simulations=simulations,
        error=misclassification_error(estimate, truth),
        filtered_error=filtered.error,
        coverage=filtered.coverage,
        filtered_empty=filtered.empty,
        signal_variance=model.params.signal_variance,
        lengthscales=model.params.lengthscales,
        seconds=time.perf_counter() - started,
        uniform_fallback=selection.uniform_fallback if selection else False,
        redrawn=selection.redrawn if selection else 0,
    )
    return record, estimate


def _drive(problem: Problem, config: LoopConfig, selector: Selector) -> RunResult:
    log = RunLoggerAdapter(LOGGER, config.strategy, config.run_id)
    grid = problem.grid
    config.verify_budget(grid.size)
    metrics = RunMetrics(config.run_id, config.strategy)
    rng = config.strategy_rng()
    pool = CandidatePool(grid)
    batch_index = 0
    try:
        started = time.perf_counter()
        initial = config.initial_rng().choice(grid.size, size=config.initial_count, replace=False)
        values = problem.measure(initial)
        simulations = len(values)
        training = TrainingSet(grid.points[initial], values)
        pool.remove(initial)
        params = _hyperparameters(training, grid, None, config, 0)
        model = fit(training, params)
        record, estimate = _record(model, problem, config, 0, started, simulations)
        metrics.records.append(record)
        log.info('initial |L| = %d, error %.4f.', training.size, record.error)

        for batch_index in range(1, config.batch_count + 1):
            started = time.perf_counter()
            selection = selector(model, pool, config, rng)
            values = problem.measure(selection.locations)
            simulations += len(values)
            training = training.extend(grid.points[selection.locations], values)
            pool.remove(selection.locations)
            params = _hyperparameters(training, grid, params, config, batch_index)
            model = fit(training, params)
            record, estimate = _record(model, problem, config, batch_index, started, simulations, selection)
            metrics.records.append(record)
            if selection.uniform_fallback:
                log.warning('batch %d used a uniform importance distribution.', batch_index)
            log.info('batch %d: |L| = %d, error %.4f.', batch_index, training.size, record.error)
    except ActiveVerifyError as exc:
        if isinstance(exc, ConfigError):
            raise
        metrics.aborted_batch = batch_index
        metrics.failure = f'{type(exc).__name__}: {exc.message}'
        log.error('aborted at batch %d: %s', batch_index, metrics.failure)
        raise RunAbortedError(
            f'Run {config.run_id} ({config.strategy}) aborted at batch {batch_index}: {metrics.failure}',
            batch_index,
            metrics
        ) from exc
    return RunResult(metrics, estimate, training, model.params)


def run_closed_loop(problem: Problem, config: LoopConfig) -> RunResult:
    """
    Run `config.batch_count` batches with the configured strategy and batch method.

    Raises:
        BudgetError: `N_total` exceeds the number of grid locations.
        ConfigError: The strategy cannot drive the batch method.
        RunAbortedError: A simulation, factorization or sampling failure stopped the run.
    """
    return _drive(problem, config, SELECTORS[config.batch_method])


def run_batch_approx_entropy(problem: Problem, config: LoopConfig) -> RunResult:
    """`run_closed_loop` with the pending-covariance greedy batch method."""
    if config.batch_method != BatchMethod.APPROX_ENTROPY:
        config = config.replace(batch_method=BatchMethod.APPROX_ENTROPY)
    return _drive(problem, config, select_approx_entropy)


def passive_baseline(problem: Problem, config: LoopConfig) -> list[float]:
    """
    Error trajectory of passive uniform sampling: after the shared initial set,
    each batch takes the locations with the largest uniform draws among those left.
    """
    grid = problem.grid
    config.verify_budget(grid.size)
    truth = problem.truth.sat_mask
    order = config.initial_rng().choice(grid.size, size=config.initial_count, replace=False)
    chosen = list(order)
    remaining = sorted(set(range(grid.size)) - set(chosen))
    draws = config.replace(strategy=Strategy.RANDOM).strategy_rng()

    def error_of(points: list[int], previous: KernelParams | None, batch_index: int) -> tuple[float, KernelParams]:
        locations = np.array(points, dtype=np.intp)
        training = TrainingSet(grid.points[locations], problem.measure(locations))
        params = _hyperparameters(training, grid, previous, config, batch_index)
        return misclassification_error(classify_regions(fit(training, params), grid), truth), params

    error, params = error_of(chosen, None, 0)
    errors = [error]
    for batch_index in range(1, config.batch_count + 1):
        u = draws.uniform(size=len(remaining))
        take = np.argsort(-u, kind='stable')[:config.batch_size].tolist()
        chosen.extend(remaining[i] for i in take)
        taken = set(take)
        remaining = [loc for i, loc in enumerate(remaining) if i not in taken]
        error, params = error_of(chosen, params, batch_index)
        errors.append(error)
    return errors
