# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BatchRecord:
    """
    State of a run after `batch_index` batches (0 is the initial training set).

    Attributes:
        batch_index: Batches completed.
        training_size: `|L|`.
        simulations: Robustness values measured so far, counted as returned by `Problem.measure`.
        error: Misclassification error over the whole grid.
        filtered_error: Misclassification error over the confident locations.
        coverage: Fraction of the grid that is confident.
        filtered_empty: No location was confident.
        signal_variance: Kernel `sigma_f^2`.
        lengthscales: Kernel lengthscales.
        seconds: Wall time of the batch.
        uniform_fallback: The importance distribution fell back to uniform.
        redrawn: Batch slots re-drawn because the k-DPP repeated a location.
    """

    batch_index: int
    training_size: int
    simulations: int
    error: float
    filtered_error: float
    coverage: float
    filtered_empty: bool
    signal_variance: float
    lengthscales: tuple[float, ...]
    seconds: float
    uniform_fallback: bool = False
    redrawn: int = 0


@dataclass
class RunMetrics:
    """Per-batch records of one run; `aborted_batch` is set when the run stopped early."""

    run_id: int
    strategy: str
    records: list[BatchRecord] = field(default_factory=list)
    aborted_batch: int | None = None
    failure: str = ''

    @property
    def completed(self) -> bool:
        return self.aborted_batch is None

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.records]

    @property
    def training_sizes(self) -> list[int]:
        return [r.training_size for r in self.records]

    @property
    def final(self) -> BatchRecord:
        return self.records[-1]
