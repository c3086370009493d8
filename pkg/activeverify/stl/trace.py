# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ..exception import DimensionMismatchError
from ..types import FloatArray, IntArray


TIME_TOLERANCE = 1e-9
"""Relative tolerance when deciding whether a sample time lies inside a closed interval."""


@dataclass(frozen=True, eq=False)
class Trace:
    """
    A discretely sampled trajectory.

    Attributes:
        times: Strictly increasing sample times in seconds, starting at 0.
        channels: Signal name to samples, each aligned with `times`.
    """

    times: FloatArray
    channels: Mapping[str, FloatArray]

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError('The "times" must be a non-empty vector.')
        if times[0] != 0:
            raise ValueError(f'A trace must start at time 0, got {times[0]}.')
        if np.any(np.diff(times) <= 0):
            raise ValueError('The "times" must be strictly increasing.')
        channels = {}
        for name, values in self.channels.items():
            values = np.asarray(values, dtype=float)
            if values.shape != times.shape:
                raise DimensionMismatchError(
                    f'Channel "{name}" has {values.size} samples, expected {times.size}.'
                )
            values.setflags(write=False)
            channels[name] = values
        times.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'channels', MappingProxyType(channels))

    def __reduce__(self):
        return (Trace, (self.times, dict(self.channels)))

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.channels)

    def __getitem__(self, name: str) -> FloatArray:
        return self.channels[name]

    def window_bounds(self, lower: float, upper: float) -> tuple[IntArray, IntArray]:
        """
        For every sample `k`, the index range `[start_k, end_k)` of samples with time in
        `[t_k + lower, t_k + upper]`. Empty ranges have `start_k == end_k`.
        """
        tol = TIME_TOLERANCE * max(1.0, self.final_time)
        start = np.searchsorted(self.times, self.times + lower - tol, side='left')
        end = np.searchsorted(self.times, self.times + upper + tol, side='right')
        return start, np.maximum(end, start)

    def to_csv(self, path: str | Path) -> None:
        """Write `time,<ch1>,<ch2>,...` with one row per sample and round-trip float text."""
        names = list(self.channels)
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['time', *names])
            for k, t in enumerate(self.times):
                writer.writerow([repr(float(t)), *(repr(float(self.channels[n][k])) for n in names)])

    @classmethod
    def from_csv(cls, path: str | Path) -> Trace:
        with open(path, newline='') as f:
            reader = csv.reader(f)
            header = next(reader)
            if not header or header[0] != 'time':
                raise ValueError(f'Trace CSV must start with a "time" column, got {header[:1]}.')
            rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        rows = rows.reshape(-1, len(header))
        return cls(rows[:, 0], {name: rows[:, i + 1] for i, name in enumerate(header[1:])})
