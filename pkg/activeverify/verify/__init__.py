# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from .config import LoopConfig
from .metrics import BatchRecord, RunMetrics
from .regions import (
    FilteredError,
    RegionEstimate,
    classify_regions,
    confidence_filtered_error,
    misclassification_error,
)
from .pending import update_covariance_with_pending
from .truth import GroundTruth, ground_truth_sweep, truth_key
from .loop import (
    Problem,
    RunResult,
    Selection,
    passive_baseline,
    run_batch_approx_entropy,
    run_closed_loop,
    select_approx_entropy,
    select_kdpp,
    select_plain_argmax,
)
