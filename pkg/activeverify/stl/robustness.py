# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Quantitative (robustness) and qualitative semantics over discrete samples.

Temporal operators reduce over the samples whose time lies in the closed
window `[t + t1, t + t2]`; windows are clipped at the end of the trace and
a window holding no sample yields NaN, which is reported as an error when it
reaches the evaluated value.
"""


from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..exception import StlEvaluationError
from ..types import BoolArray, FloatArray, IntArray
from .formula import AbsPredicate, Always, And, Eventually, Not, Or, Predicate, StlFormula
from .trace import Trace


@dataclass(frozen=True)
class RobustnessMeasurement:
    """`value` is the robustness degree `y`; only `value > 0` counts as satisfied."""

    value: float
    satisfied: bool

    @classmethod
    def of(cls, value: float) -> RobustnessMeasurement:
        return cls(float(value), bool(value > 0))


def _range_reduce(values: FloatArray, start: IntArray, end: IntArray, ufunc: np.ufunc) -> FloatArray:
    """`ufunc.reduce(values[start_k:end_k])` for every `k` via a sparse table; empty ranges give NaN."""
    n = values.size
    table = [values]
    width = 1
    while 2 * width <= n:
        prev = table[-1]
        table.append(ufunc(prev[:-width], prev[width:]))
        width *= 2
    length = end - start
    out = np.full(start.size, np.nan)
    valid = length > 0
    if np.any(valid):
        level = np.floor(np.log2(length[valid])).astype(int)
        s = start[valid]
        e = end[valid]
        result = np.empty(level.size)
        for j in np.unique(level):
            sel = level == j
            block = table[j]
            result[sel] = ufunc(block[s[sel]], block[e[sel] - (1 << j)])
        out[valid] = result
    return out


def _channel(trace: Trace, name: str) -> FloatArray:
    try:
        return trace.channels[name]
    except KeyError:
        raise StlEvaluationError(
            f'Channel "{name}" is not in the trace (available: {", ".join(trace.names)}).'
        ) from None


def robustness_signal(formula: StlFormula, trace: Trace) -> FloatArray:
    """Robustness of `formula` evaluated at every sample time of `trace`."""
    match formula:
        case Predicate(channel, coef, offset):
            return coef * _channel(trace, channel) + offset
        case AbsPredicate():
            return robustness_signal(formula.expand(), trace)
        case Not(child):
            return -robustness_signal(child, trace)
        case And(children):
            return _fold(np.minimum, (robustness_signal(c, trace) for c in children))
        case Or(children):
            return _fold(np.maximum, (robustness_signal(c, trace) for c in children))
        case Always(lower, upper, child):
            start, end = trace.window_bounds(lower, upper)
            return _range_reduce(robustness_signal(child, trace), start, end, np.minimum)
        case Eventually(lower, upper, child):
            start, end = trace.window_bounds(lower, upper)
            return _range_reduce(robustness_signal(child, trace), start, end, np.maximum)
    raise TypeError(f'Unknown formula node {type(formula).__name__}.')


def _fold(ufunc: np.ufunc, signals: Iterable[FloatArray]) -> FloatArray:
    signals = iter(signals)
    result = next(signals)
    for signal in signals:
        result = ufunc(result, signal)
    return result


def _verify_windows(formula: StlFormula, trace: Trace) -> None:
    """The outermost temporal windows must hold at least one sample at time 0."""
    match formula:
        case Always(lower, upper, _) | Eventually(lower, upper, _):
            start, end = trace.window_bounds(lower, upper)
            if end[0] <= start[0]:
                raise StlEvaluationError(
                    f'Interval [{lower}, {upper}] holds no samples of a trace ending at {trace.final_time}.'
                )
        case Not(child):
            _verify_windows(child, trace)
        case And(children) | Or(children):
            for child in children:
                _verify_windows(child, trace)


def robustness(formula: StlFormula, trace: Trace) -> RobustnessMeasurement:
    """
    Robustness degree of `formula` on `trace` at time 0.

    Raises:
        StlEvaluationError: A channel is missing or an interval holds no samples.
    """
    _verify_windows(formula, trace)
    value = robustness_signal(formula, trace)[0]
    if np.isnan(value):
        raise StlEvaluationError('A nested temporal interval holds no samples of the trace.')
    return RobustnessMeasurement.of(value)


def boolean_signal(formula: StlFormula, trace: Trace) -> BoolArray:
    """Qualitative semantics at every sample; a window without samples is false for G and F alike."""
    match formula:
        case Predicate(channel, coef, offset):
            return coef * _channel(trace, channel) + offset >= 0
        case AbsPredicate():
            return boolean_signal(formula.expand(), trace)
        case Not(child):
            return ~boolean_signal(child, trace)
        case And(children):
            return _fold(np.logical_and, (boolean_signal(c, trace) for c in children))
        case Or(children):
            return _fold(np.logical_or, (boolean_signal(c, trace) for c in children))
        case Always(lower, upper, child) | Eventually(lower, upper, child):
            start, end = trace.window_bounds(lower, upper)
            inner = boolean_signal(child, trace)
            # prefix sums count true samples inside each window
            counts = np.concatenate(([0], np.cumsum(inner)))
            hits = counts[end] - counts[start]
            nonempty = end > start
            if isinstance(formula, Always):
                return nonempty & (hits == end - start)
            return hits > 0
    raise TypeError(f'Unknown formula node {type(formula).__name__}.')


def boolean_semantics(formula: StlFormula, trace: Trace) -> bool:
    """Whether `trace` satisfies `formula` at time 0."""
    _verify_windows(formula, trace)
    return bool(boolean_signal(formula, trace)[0])


def conjunction_robustness(values: Iterable[float]) -> float:
    """Robustness of a conjunction from the robustness of its conjuncts: the minimum."""
    values = list(values)
    if not values:
        raise ValueError('The conjunction of an empty list of requirements is undefined.')
    return float(min(values))
