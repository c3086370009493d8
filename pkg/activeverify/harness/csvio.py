# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""CSV artifacts. Floats are written with `repr` so a re-read is exact."""


from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from ..common import Column
from ..exception import ConfigError
from ..verify import BatchRecord, RunMetrics
from .report import ComparisonReport


def _float(value: float) -> str:
    return repr(float(value))


def write_runs(path: str | Path, metrics: Iterable[RunMetrics], deterministic_time: bool = False) -> None:
    """One row per run and completed batch, columns in `Column.RUNS` order."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(Column.RUNS)
        for m in metrics:
            for r in m.records:
                writer.writerow([
                    m.run_id,
                    m.strategy,
                    r.batch_index,
                    r.training_size,
                    _float(r.error),
                    _float(r.filtered_error),
                    _float(r.coverage),
                    _float(r.signal_variance),
                    ';'.join(_float(v) for v in r.lengthscales),
                    _float(0.0 if deterministic_time else r.seconds),
                ])


def read_runs(path: str | Path) -> list[RunMetrics]:
    """Rebuild run metrics from `runs.csv`, preserving first-appearance order."""
    runs: dict[tuple[int, str], RunMetrics] = {}
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != Column.RUNS:
            raise ConfigError(f'{path} does not have the run columns {list(Column.RUNS)}.')
        for row in reader:
            key = (int(row['run_id']), row['strategy'])
            if key not in runs:
                runs[key] = RunMetrics(*key)
            runs[key].records.append(BatchRecord(
                batch_index=int(row['batch_index']),
                training_size=int(row['training_size']),
                simulations=int(row['training_size']),
                error=float(row['error']),
                filtered_error=float(row['filtered_error']),
                coverage=float(row['coverage']),
                filtered_empty=float(row['coverage']) == 0.0,
                signal_variance=float(row['signal_variance']),
                lengthscales=tuple(float(v) for v in row['lengthscales'].split(';') if v),
                seconds=float(row['seconds']),
            ))
    return list(runs.values())


def write_aggregate(path: str | Path, report: ComparisonReport) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(Column.AGGREGATE)
        for c in report.curves:
            for k in range(c.batch_index.size):
                writer.writerow([
                    c.label,
                    int(c.batch_index[k]),
                    int(c.training_size[k]),
                    int(c.runs[k]),
                    _float(c.error_mean[k]),
                    _float(c.error_std[k]),
                    _float(c.filtered_error_mean[k]),
                    _float(c.filtered_error_std[k]),
                    _float(c.coverage_mean[k]),
                ])


def write_winrate(path: str | Path, report: ComparisonReport) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(Column.WINRATE)
        for w in report.winrates:
            for k in range(w.batch_index.size):
                writer.writerow([
                    w.competitor,
                    int(w.batch_index[k]),
                    int(w.training_size[k]),
                    int(w.runs[k]),
                    _float(w.win_rate[k]),
                ])


def read_table(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


def write_truth(path: str | Path, points: np.ndarray, robustness: np.ndarray, names: tuple[str, ...]) -> None:
    """Ground-truth sweep: one row per grid location."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow([*names, 'robustness', 'satisfied'])
        for point, value in zip(points, robustness):
            writer.writerow([*(_float(v) for v in point), _float(value), int(value > 0)])
