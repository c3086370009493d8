# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..common import Strategy
from ..verify import RunMetrics


@dataclass(frozen=True, eq=False)
class Curve:
    """
    Per-batch statistics of one strategy label over the runs that reached each batch.
    Cells no run reached hold NaN and `runs == 0`.
    """

    label: str
    batch_index: np.ndarray
    training_size: np.ndarray
    runs: np.ndarray
    error_mean: np.ndarray
    error_std: np.ndarray
    filtered_error_mean: np.ndarray
    filtered_error_std: np.ndarray
    coverage_mean: np.ndarray


@dataclass(frozen=True, eq=False)
class WinRate:
    """Fraction of paired runs where the reference label's error is at most the competitor's."""

    competitor: str
    batch_index: np.ndarray
    training_size: np.ndarray
    runs: np.ndarray
    win_rate: np.ndarray


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    reference: str
    curves: tuple[Curve, ...]
    winrates: tuple[WinRate, ...]
    failures: tuple[str, ...] = ()

    @property
    def complete(self) -> bool:
        return not self.failures

    def curve(self, label: str) -> Curve:
        for curve in self.curves:
            if curve.label == label:
                return curve
        raise KeyError(f'No curve for "{label}".')

    @property
    def empty(self) -> bool:
        return not self.curves


def _stats(values: list[float]) -> tuple[float, float]:
    if not values:
        return np.nan, np.nan
    array = np.asarray(values, dtype=float)
    return float(array.mean()), float(array.std())


def _curve(label: str, runs: Sequence[RunMetrics], batches: int) -> Curve:
    rows = []
    for b in range(batches + 1):
        records = [m.records[b] for m in runs if len(m.records) > b]
        sizes = [r.training_size for r in records]
        rows.append((
            b,
            sizes[0] if sizes else -1,
            len(records),
            *_stats([r.error for r in records]),
            *_stats([r.filtered_error for r in records]),
            _stats([r.coverage for r in records])[0],
        ))
    columns = list(zip(*rows))
    return Curve(label, *(np.asarray(c) for c in columns))


def build_report(
    metrics: Iterable[RunMetrics],
    labels: Sequence[str],
    batch_count: int,
    reference: str | None = None
) -> ComparisonReport:
    """
    Aggregate run metrics into mean/std curves and win rates.

    Args:
        metrics: One entry per (run, label), complete or aborted.
        labels: Strategy labels in report order.
        batch_count: Batches `T`; curves have `T + 1` points.
        reference: The label compared against every other; defaults to the first
            label scored by entropy, else the first label.
    """
    metrics = list(metrics)
    by_label = {label: [m for m in metrics if m.strategy == label] for label in labels}
    if reference is None:
        reference = next((label for label in labels if label.startswith(Strategy.ENTROPY)), labels[0] if labels else '')
    curves = tuple(_curve(label, by_label[label], batch_count) for label in labels)

    winrates = []
    if reference:
        ref_runs = {m.run_id: m for m in by_label.get(reference, [])}
        for label in labels:
            comp_runs = {m.run_id: m for m in by_label[label]}
            rows = []
            for b in range(batch_count + 1):
                pairs = [
                    (ref_runs[i].records[b], comp_runs[i].records[b])
                    for i in sorted(set(ref_runs) & set(comp_runs))
                    if len(ref_runs[i].records) > b and len(comp_runs[i].records) > b
                ]
                wins = [ref.error <= comp.error for ref, comp in pairs]
                size = pairs[0][1].training_size if pairs else -1
                rows.append((b, size, len(pairs), float(np.mean(wins)) if wins else np.nan))
            columns = list(zip(*rows))
            winrates.append(WinRate(label, *(np.asarray(c) for c in columns)))

    failures = tuple(
        f'{m.strategy}[run {m.run_id}] batch {m.aborted_batch}: {m.failure}'
        for m in metrics if not m.completed
    )
    return ComparisonReport(reference, curves, tuple(winrates), failures)
