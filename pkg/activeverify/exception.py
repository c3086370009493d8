# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


class ActiveVerifyError(Exception):
    """Base exception of activeverify."""

    default_message = 'activeverify failed.'

    def __init__(self, message: str | None = None):
        self.message = message or self.default_message
        super().__init__(self.message)


class DimensionMismatchError(ActiveVerifyError, ValueError):
    """Parameter points, lengthscales or grids disagree on the dimension `p`."""

    default_message = 'Dimension mismatch between parameter points.'


class FactorizationError(ActiveVerifyError):
    """
    Cholesky factorization failed even after the jitter ladder was exhausted.
    The last jitter tried is kept in `jitter`.
    """

    default_message = 'Cholesky factorization failed.'

    def __init__(self, message: str | None = None, jitter: float | None = None):
        self.jitter = jitter
        super().__init__(message)


class StlSyntaxError(ActiveVerifyError, ValueError):
    """Formula text could not be parsed; `position` is the 0-based character offset."""

    default_message = 'Invalid STL formula.'

    def __init__(self, message: str | None = None, position: int = 0):
        self.position = position
        super().__init__(f'{message or self.default_message} (at position {position})')


class StlEvaluationError(ActiveVerifyError):
    """Formula references a missing channel or a temporal interval holds no samples."""

    default_message = 'STL formula cannot be evaluated on this trace.'


class SimulationError(ActiveVerifyError):
    """Integration produced a non-finite state; `time` is the first bad sample time."""

    default_message = 'Simulation diverged.'

    def __init__(self, message: str | None = None, time: float | None = None):
        self.time = time
        super().__init__(message)

    def __reduce__(self):
        return (SimulationError, (self.message, self.time))


class DppSamplingError(ActiveVerifyError):
    """The k-DPP could not produce a batch of the requested size."""

    default_message = 'k-DPP sampling failed.'


class BudgetError(ActiveVerifyError, ValueError):
    """The requested simulation budget does not fit the candidate grid."""

    default_message = 'Simulation budget exceeds the available grid locations.'


class RunAbortedError(ActiveVerifyError):
    """
    A closed-loop run stopped early; `batch_index` is the failing batch (0 = initialization)
    and `metrics` holds the records completed before it.
    """

    default_message = 'Closed-loop run aborted.'

    def __init__(self, message: str | None = None, batch_index: int = 0, metrics: object = None):
        self.batch_index = batch_index
        self.metrics = metrics
        super().__init__(message)


class ConfigError(ActiveVerifyError, ValueError):
    """Experiment configuration is missing keys or has invalid values."""

    default_message = 'Invalid configuration.'
