# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import inspect
import logging
import os
from pathlib import Path
from types import FrameType
from typing import Any, Literal


type FrameKind = Literal['func', 'file']


class PrefixFilter(logging.Filter):
    """
    Re-attributes a record to the nearest calling frame whose function name
    (or file name) starts with `prefix`.

    Numerical helpers log deep inside the GP and DPP code; with the default
    prefix `run` the log line points at the driver that triggered them,
    e.g. `run_closed_loop` or `run_experiment`.

    Examples:
        ::

            import logging
            from activeverify import PrefixFilter

            logging.getLogger('activeverify').addFilter(PrefixFilter('run'))

    """

    def __init__(
        self,
        prefix: str | None = 'run',
        kind: FrameKind = 'func',
        islower: bool = True,
        torecord: bool = False
    ):
        """
        Args:
            prefix: The frame prefix; `None` disables re-attribution.
            kind: `'func'` matches function names, `'file'` matches module file names.
            islower: `True` for case-insensitive matching.
            torecord: Keep the last filtered `LogRecord` in `record`.
        """
        super().__init__()
        self.reset(prefix, kind, islower, torecord)

    def reset(
        self,
        prefix: str | None = 'run',
        kind: FrameKind = 'func',
        islower: bool = True,
        torecord: bool = False
    ) -> None:
        """Reset all filter settings."""
        self._verify('prefix', prefix, (str, type(None)))
        self._verify('islower', islower, bool)
        self._verify('torecord', torecord, bool)
        if kind not in ('func', 'file'):
            raise ValueError(f'The "kind" must be "func" or "file", got {kind!r}.')
        self._prefix = prefix
        self._kind: FrameKind = kind
        self._islower = islower
        self._torecord = torecord
        self._record: logging.LogRecord | None = None

    def reset_prefix(self, value: str | None) -> None:
        self._verify('prefix', value, (str, type(None)))
        self._prefix = value

    @staticmethod
    def _verify(name: str, value: Any, instance: type | tuple[type, ...]) -> None:
        if not isinstance(value, instance):
            raise TypeError(f'The "{name}" must be "{instance}", got {type(value).__name__}.')

    @property
    def prefix(self) -> str | None:
        return self._prefix

    @property
    def kind(self) -> FrameKind:
        return self._kind

    @property
    def record(self) -> logging.LogRecord | None:
        """The last filtered record, only kept when `torecord` is set."""
        return self._record

    def _frame_name(self, frame: FrameType) -> str:
        if self._kind == 'func':
            return frame.f_code.co_name
        return os.path.basename(frame.f_code.co_filename)

    def filter(self, record: logging.LogRecord) -> bool:
        if self._prefix:
            prefix = self._prefix.lower() if self._islower else self._prefix
            # inspect.stack() builds full frame infos; walking f_back is enough.
            frame = inspect.currentframe()
            while frame:
                name = self._frame_name(frame)
                if (name.lower() if self._islower else name).startswith(prefix):
                    record.filename = os.path.basename(frame.f_code.co_filename)
                    record.lineno = frame.f_lineno
                    record.funcName = frame.f_code.co_name
                    break
                frame = frame.f_back
        self._record = record if self._torecord else None
        return True


class RunLoggerAdapter(logging.LoggerAdapter):
    """Prefixes messages with the strategy and run index of a closed-loop run."""

    def __init__(self, logger: logging.Logger, strategy: str, run_id: int | None = None):
        super().__init__(logger, {'strategy': strategy, 'run_id': run_id})

    def process(self, msg, kwargs):
        run = '' if self.extra['run_id'] is None else f'[run {self.extra["run_id"]}]'
        return f'{self.extra["strategy"]}{run}: {msg}', kwargs


class LogConfig:
    """General log configuration."""

    PREFIX_FILTER = PrefixFilter('run')
    """Shared by every module logger; use `PREFIX_FILTER.reset(...)` to change it."""

    # basicConfig
    FILENAME = 'activeverify.log'
    FILEMODE = 'w'
    FORMAT = '%(asctime)s | %(levelname)s | %(filename)s:%(lineno)d | %(funcName)s | %(message)s'
    DATEFMT = '%Y-%m-%d %H:%M:%S'
    LEVEL = logging.INFO
    BASIC_CONFIG = {
        "filename": FILENAME,
        "filemode": FILEMODE,
        "format": FORMAT,
        "datefmt": DATEFMT,
        "level": LEVEL
    }

    @classmethod
    def basic_config(cls, out_dir: str | Path | None = None, level: int | None = None) -> dict:
        """`BASIC_CONFIG` with the log file placed in `out_dir` (created if missing)."""
        config = dict(cls.BASIC_CONFIG)
        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            config['filename'] = str(Path(out_dir) / cls.FILENAME)
        if level is not None:
            config['level'] = level
        return config
