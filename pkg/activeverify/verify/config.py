# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import zlib
from typing import Any

import numpy as np

from ..common import BatchMethod, HyperMode, Strategy
from ..exception import BudgetError, ConfigError


class LoopConfig:
    """Knobs of one closed-loop run: budget, strategy, batch method and seeding."""

    def __init__(
        self,
        initial_count: int = 50,
        batch_size: int = 5,
        batch_count: int = 20,
        strategy: str = Strategy.ENTROPY,
        batch_method: str = BatchMethod.KDPP,
        hyperparameter_mode: str = HyperMode.OPTIMIZE_EACH_BATCH,
        seed: int = 0,
        run_id: int = 0,
        lengthscale_scale: float = 1.0,
        candidates: int = 1000,
        bandwidth: float = 5.0,
        confidence_threshold: float = 0.95,
        restarts: int = 3
    ) -> None:
        """
        Args:
            initial_count: Size of the random initial training set.
            batch_size: Locations `M` simulated per batch.
            batch_count: Number of batches `T`.
            strategy: One of `Strategy.ALL`.
            batch_method: One of `BatchMethod.ALL`.
            hyperparameter_mode: One of `HyperMode.ALL`.
            seed: Master seed of the experiment.
            run_id: Index of the run; with `seed` it fixes the initial training set.
            lengthscale_scale: Multiplier on the default initial lengthscales.
            candidates: Importance draws `M_T` fed to the k-DPP.
            bandwidth: k-DPP similarity length in normalized grid units.
            confidence_threshold: Threshold of the confidence-filtered error.
            restarts: Likelihood maximization starts per optimization.
        """
        self._verify_int('initial_count', initial_count, 1)
        self._verify_int('batch_size', batch_size, 1)
        self._verify_int('batch_count', batch_count, 1)
        self._verify_int('seed', seed, 0)
        self._verify_int('run_id', run_id, 0)
        self._verify_int('candidates', candidates, 1)
        self._verify_int('restarts', restarts, 1)
        self._verify_choice('strategy', strategy, Strategy.ALL)
        self._verify_choice('batch_method', batch_method, BatchMethod.ALL)
        self._verify_choice('hyperparameter_mode', hyperparameter_mode, HyperMode.ALL)
        self._verify_positive('lengthscale_scale', lengthscale_scale)
        self._verify_positive('bandwidth', bandwidth)
        self._verify_positive('confidence_threshold', confidence_threshold)
        if not 0.5 <= confidence_threshold <= 1.0:
            raise ConfigError(f'The "confidence_threshold" must lie in [0.5, 1], got {confidence_threshold}.')
        if batch_method == BatchMethod.KDPP:
            if strategy == Strategy.EMC:
                raise ConfigError('The "emc" scores are not a density; use "approx_entropy" or "plain_argmax".')
            if candidates < batch_size:
                raise ConfigError(f'The "candidates" ({candidates}) must be at least "batch_size" ({batch_size}).')
        self._initial_count = initial_count
        self._batch_size = batch_size
        self._batch_count = batch_count
        self._strategy = strategy
        self._batch_method = batch_method
        self._hyperparameter_mode = hyperparameter_mode
        self._seed = seed
        self._run_id = run_id
        self._lengthscale_scale = float(lengthscale_scale)
        self._candidates = candidates
        self._bandwidth = float(bandwidth)
        self._confidence_threshold = float(confidence_threshold)
        self._restarts = restarts

    def _verify_int(self, name: str, value: Any, minimum: int) -> None:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f'The "{name}" must be "int", got {type(value).__name__}.')
        if value < minimum:
            raise ConfigError(f'The "{name}" must be at least {minimum}, got {value}.')

    def _verify_positive(self, name: str, value: Any) -> None:
        if not isinstance(value, int | float) or isinstance(value, bool):
            raise ConfigError(f'The "{name}" must be "float", got {type(value).__name__}.')
        if not np.isfinite(value) or value <= 0:
            raise ConfigError(f'The "{name}" must be a positive number, got {value}.')

    def _verify_choice(self, name: str, value: Any, choices: tuple[str, ...]) -> None:
        if value not in choices:
            raise ConfigError(f'The "{name}" must be one of {list(choices)}, got {value!r}.')

    @property
    def initial_count(self) -> int:
        return self._initial_count

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @property
    def batch_count(self) -> int:
        return self._batch_count

    @property
    def total_budget(self) -> int:
        """`N_total = initial_count + batch_size * batch_count`."""
        return self._initial_count + self._batch_size * self._batch_count

    @property
    def strategy(self) -> str:
        return self._strategy

    @property
    def batch_method(self) -> str:
        return self._batch_method

    @property
    def hyperparameter_mode(self) -> str:
        return self._hyperparameter_mode

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def run_id(self) -> int:
        return self._run_id

    @property
    def lengthscale_scale(self) -> float:
        return self._lengthscale_scale

    @property
    def candidates(self) -> int:
        return self._candidates

    @property
    def bandwidth(self) -> float:
        return self._bandwidth

    @property
    def confidence_threshold(self) -> float:
        return self._confidence_threshold

    @property
    def restarts(self) -> int:
        return self._restarts

    def verify_budget(self, grid_size: int) -> None:
        """Raise `BudgetError` unless `N_total` fits in a grid of `grid_size` locations."""
        if self.total_budget > grid_size:
            raise BudgetError(
                f'Budget {self.total_budget} exceeds the {grid_size} grid locations.'
            )

    def initial_rng(self) -> np.random.Generator:
        """Stream of the initial training set, shared by every strategy of a run."""
        return np.random.default_rng(np.random.SeedSequence([self._seed, self._run_id]))

    def strategy_rng(self) -> np.random.Generator:
        """Stream of scores, candidate draws and DPP picks for this strategy."""
        tag = zlib.crc32(self._strategy.encode())
        return np.random.default_rng(np.random.SeedSequence([self._seed, self._run_id, tag]))

    def hyper_rng(self, batch_index: int) -> np.random.Generator:
        """Restart stream of the hyperparameter search after `batch_index` batches."""
        return np.random.default_rng(np.random.SeedSequence([self._seed, self._run_id, 0, batch_index]))

    def replace(self, **changes: Any) -> LoopConfig:
        """A copy with some fields changed."""
        fields = {name: getattr(self, name) for name in _FIELDS}
        fields.update(changes)
        return LoopConfig(**fields)

    def __repr__(self) -> str:
        args = ', '.join(f'{name}={getattr(self, name)!r}' for name in _FIELDS)
        return f'LoopConfig({args})'


_FIELDS = (
    'initial_count', 'batch_size', 'batch_count', 'strategy', 'batch_method', 'hyperparameter_mode',
    'seed', 'run_id', 'lengthscale_scale', 'candidates', 'bandwidth', 'confidence_threshold', 'restarts',
)
