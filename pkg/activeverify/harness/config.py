# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Experiment files.

An experiment is an INI file with one `[experiment]` section::

    [experiment]
    benchmark = mrac2d
    formula = mrac_bound
    resolution = 41
    initial_count = 50
    batch_size = 5
    batch_count = 20
    strategies = entropy, variance, emc, random
    batch_method = kdpp
    baseline_batch_method = approx_entropy
    runs = 20
    seed = 2024

Each entry of `strategies` is a label. A `[strategy.<label>]` section may
override `strategy` (the scoring rule, defaults to the label),
`batch_method`, `hyperparameter_mode` and `lengthscale_scale` for that label.
A strategy whose scores cannot drive the configured `batch_method` uses
`baseline_batch_method` instead.
"""


from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

from ..common import BatchMethod, HyperMode, Strategy
from ..exception import ConfigError
from ..sim import BENCHMARK_NAMES
from ..verify import LoopConfig


SECTION = 'experiment'
STRATEGY_PREFIX = 'strategy.'


@dataclass(frozen=True)
class StrategyPlan:
    """How one labelled competitor is run."""

    label: str
    strategy: str
    batch_method: str
    hyperparameter_mode: str
    lengthscale_scale: float


class ExperimentConfig:
    """Every knob of a multi-run, multi-strategy comparison."""

    def __init__(
        self,
        benchmark: str = 'mrac2d',
        formula: str | None = None,
        resolution: tuple[int, ...] | int | None = None,
        initial_count: int = 50,
        batch_size: int = 5,
        batch_count: int = 20,
        strategies: tuple[str, ...] = Strategy.ALL,
        batch_method: str = BatchMethod.KDPP,
        baseline_batch_method: str = BatchMethod.APPROX_ENTROPY,
        hyperparameter_mode: str = HyperMode.OPTIMIZE_EACH_BATCH,
        lengthscale_scale: float = 1.0,
        runs: int = 20,
        seed: int = 0,
        m_t: int = 1000,
        dpp_bandwidth: float = 5.0,
        dt: float | None = None,
        confidence_threshold: float = 0.95,
        corrected_phi2: bool = False,
        cache_dir: str | Path | None = None,
        restarts: int = 3,
        reuse_truth: bool = True,
        overrides: Mapping[str, Mapping[str, Any]] | None = None
    ) -> None:
        if benchmark not in BENCHMARK_NAMES:
            raise ConfigError(f'Unknown benchmark "{benchmark}", expected one of {list(BENCHMARK_NAMES)}.')
        if not strategies:
            raise ConfigError('The "strategies" list must not be empty.')
        if len(set(strategies)) != len(strategies):
            raise ConfigError(f'Duplicate strategy labels in {list(strategies)}.')
        if not isinstance(runs, int) or runs < 1:
            raise ConfigError(f'The "runs" must be a positive "int", got {runs!r}.')
        if baseline_batch_method not in BatchMethod.ALL:
            raise ConfigError(f'The "baseline_batch_method" must be one of {list(BatchMethod.ALL)}.')
        if isinstance(resolution, int):
            resolution = (resolution,)
        self._benchmark = benchmark
        self._formula = formula
        self._resolution = tuple(resolution) if resolution else None
        self._runs = runs
        self._seed = seed
        self._dt = dt
        self._corrected_phi2 = bool(corrected_phi2)
        self._cache_dir = Path(cache_dir) if cache_dir is not None else None
        self._reuse_truth = bool(reuse_truth)
        overrides = overrides or {}
        unknown = set(overrides) - set(strategies)
        if unknown:
            raise ConfigError(f'Strategy sections {sorted(unknown)} are not listed in "strategies".')
        self._plans = tuple(
            self._plan(label, overrides.get(label, {}), batch_method, baseline_batch_method,
                       hyperparameter_mode, lengthscale_scale)
            for label in strategies
        )
        # LoopConfig validates the shared knobs once per plan.
        self._loop = {
            plan.label: LoopConfig(
                initial_count=initial_count,
                batch_size=batch_size,
                batch_count=batch_count,
                strategy=plan.strategy,
                batch_method=plan.batch_method,
                hyperparameter_mode=plan.hyperparameter_mode,
                seed=seed,
                lengthscale_scale=plan.lengthscale_scale,
                candidates=m_t,
                bandwidth=dpp_bandwidth,
                confidence_threshold=confidence_threshold,
                restarts=restarts,
            )
            for plan in self._plans
        }

    @staticmethod
    def _plan(
        label: str,
        override: Mapping[str, Any],
        batch_method: str,
        baseline_batch_method: str,
        hyperparameter_mode: str,
        lengthscale_scale: float
    ) -> StrategyPlan:
        strategy = override.get('strategy', label)
        if strategy not in Strategy.ALL:
            raise ConfigError(f'Label "{label}" needs a "strategy" among {list(Strategy.ALL)}, got {strategy!r}.')
        method = override.get('batch_method')
        if method is None:
            method = batch_method
            if method == BatchMethod.KDPP and strategy == Strategy.EMC:
                method = baseline_batch_method
        return StrategyPlan(
            label,
            strategy,
            method,
            override.get('hyperparameter_mode', hyperparameter_mode),
            float(override.get('lengthscale_scale', lengthscale_scale)),
        )

    @property
    def benchmark(self) -> str:
        return self._benchmark

    @property
    def formula(self) -> str | None:
        """Formula text or preset name; None means the benchmark's default preset."""
        return self._formula

    @property
    def resolution(self) -> tuple[int, ...] | None:
        return self._resolution

    @property
    def plans(self) -> tuple[StrategyPlan, ...]:
        return self._plans

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(plan.label for plan in self._plans)

    @property
    def runs(self) -> int:
        return self._runs

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def dt(self) -> float | None:
        return self._dt

    @property
    def corrected_phi2(self) -> bool:
        return self._corrected_phi2

    @property
    def cache_dir(self) -> Path | None:
        return self._cache_dir

    @property
    def reuse_truth(self) -> bool:
        return self._reuse_truth

    def loop_config(self, label: str, run_id: int) -> LoopConfig:
        """The `LoopConfig` of run `run_id` under strategy label `label`."""
        return self._loop[label].replace(run_id=run_id)

    @property
    def batch_count(self) -> int:
        return self._loop[self._plans[0].label].batch_count

    def replace(self, **changes: Any) -> ExperimentConfig:
        """A copy with some top-level knobs changed (e.g. the seed from the command line)."""
        return ExperimentConfig(**{**self._kwargs(), **changes})

    def _kwargs(self) -> dict[str, Any]:
        base = self._loop[self._plans[0].label]
        overrides = {
            p.label: {
                'strategy': p.strategy,
                'batch_method': p.batch_method,
                'hyperparameter_mode': p.hyperparameter_mode,
                'lengthscale_scale': p.lengthscale_scale,
            }
            for p in self._plans
        }
        return {
            'benchmark': self._benchmark,
            'formula': self._formula,
            'resolution': self._resolution,
            'initial_count': base.initial_count,
            'batch_size': base.batch_size,
            'batch_count': base.batch_count,
            'strategies': self.labels,
            'runs': self._runs,
            'seed': self._seed,
            'm_t': base.candidates,
            'dpp_bandwidth': base.bandwidth,
            'dt': self._dt,
            'confidence_threshold': base.confidence_threshold,
            'corrected_phi2': self._corrected_phi2,
            'cache_dir': self._cache_dir,
            'restarts': base.restarts,
            'reuse_truth': self._reuse_truth,
            'overrides': overrides,
        }

    def summary(self) -> dict[str, Any]:
        """JSON-friendly description, written to `summary.json`."""
        data = self._kwargs()
        data['cache_dir'] = None if self._cache_dir is None else str(self._cache_dir)
        data['resolution'] = None if self._resolution is None else list(self._resolution)
        data['strategies'] = list(self.labels)
        return data


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(';', ',').split(',') if v.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(',') if v.strip())


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f'not a boolean: {text!r}')


_PARSERS: dict[str, Callable[[str], Any]] = {
    'benchmark': str.strip,
    'formula': str.strip,
    'resolution': _int_list,
    'initial_count': int,
    'batch_size': int,
    'batch_count': int,
    'strategies': _str_list,
    'batch_method': str.strip,
    'baseline_batch_method': str.strip,
    'hyperparameter_mode': str.strip,
    'lengthscale_scale': float,
    'runs': int,
    'seed': int,
    'm_t': int,
    'dpp_bandwidth': float,
    'dt': float,
    'confidence_threshold': float,
    'corrected_phi2': _bool,
    'cache_dir': str.strip,
    'restarts': int,
    'reuse_truth': _bool,
}

_OVERRIDE_PARSERS: dict[str, Callable[[str], Any]] = {
    'strategy': str.strip,
    'batch_method': str.strip,
    'hyperparameter_mode': str.strip,
    'lengthscale_scale': float,
}


def _parse_section(items: Mapping[str, str], parsers: Mapping[str, Callable[[str], Any]], where: str) -> dict:
    values = {}
    for key, text in items.items():
        if key not in parsers:
            raise ConfigError(f'Unknown key "{key}" in [{where}].')
        try:
            values[key] = parsers[key](text)
        except ValueError as exc:
            raise ConfigError(f'Invalid value for "{key}" in [{where}]: {exc}') from None
    return values


def parse_config(text: str, base_dir: str | Path | None = None) -> ExperimentConfig:
    """Build an `ExperimentConfig` from INI text; relative `cache_dir` resolves against `base_dir`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f'Malformed experiment file: {exc}') from None
    if not parser.has_section(SECTION):
        raise ConfigError(f'Missing the [{SECTION}] section.')
    values = _parse_section(dict(parser.items(SECTION)), _PARSERS, SECTION)
    overrides = {}
    for section in parser.sections():
        if section == SECTION:
            continue
        if not section.startswith(STRATEGY_PREFIX):
            raise ConfigError(f'Unknown section [{section}].')
        label = section[len(STRATEGY_PREFIX):]
        overrides[label] = _parse_section(dict(parser.items(section)), _OVERRIDE_PARSERS, section)
    if 'cache_dir' in values and base_dir is not None and not Path(values['cache_dir']).is_absolute():
        values['cache_dir'] = Path(base_dir) / values['cache_dir']
    try:
        return ExperimentConfig(**values, overrides=overrides)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f'Cannot read experiment file {path}: {exc}') from None
    return parse_config(text, path.parent)
