# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Protocol

import numpy as np

from ..types import FloatArray


class SimConfig:
    """Integration horizon, step size and the system constants of one benchmark."""

    def __init__(
        self,
        t_final: float,
        dt: float = 0.01,
        constants: Mapping[str, Any] | None = None
    ) -> None:
        """
        Args:
            t_final: Final simulation time `T_f` in seconds.
            dt: Fixed RK4 step in seconds; `t_final / dt` must be an integer.
            constants: System constants (gains, reference model, limits).
        """
        self._verify_data(t_final, dt, constants)
        self._t_final = float(t_final)
        self._dt = float(dt)
        self._constants = MappingProxyType(dict(constants or {}))

    def _verify_data(self, t_final: Any, dt: Any, constants: Any) -> None:
        if not isinstance(t_final, int | float) or isinstance(t_final, bool):
            raise TypeError(f'The "t_final" must be "int" or "float", got {type(t_final).__name__}.')
        if not isinstance(dt, int | float) or isinstance(dt, bool):
            raise TypeError(f'The "dt" must be "int" or "float", got {type(dt).__name__}.')
        if not isinstance(constants, Mapping | None):
            raise TypeError(f'The "constants" must be a mapping, got {type(constants).__name__}.')
        if not (0 < dt <= t_final):
            raise ValueError(f'Expected 0 < dt <= t_final, got dt={dt}, t_final={t_final}.')
        steps = t_final / dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f'The "t_final" {t_final} is not an integer multiple of "dt" {dt}.')

    @property
    def t_final(self) -> float:
        """Final simulation time in seconds."""
        return self._t_final

    @property
    def dt(self) -> float:
        """Integration step in seconds."""
        return self._dt

    @property
    def steps(self) -> int:
        """Number of RK4 steps; the trace holds `steps + 1` samples."""
        return int(round(self._t_final / self._dt))

    @property
    def constants(self) -> Mapping[str, Any]:
        return self._constants

    def __getitem__(self, name: str) -> Any:
        try:
            return self._constants[name]
        except KeyError:
            raise KeyError(f'Simulation constant "{name}" is not configured.') from None

    def replace(self, t_final: float | None = None, dt: float | None = None, **constants: Any) -> SimConfig:
        """A copy with a new horizon, step or overridden constants."""
        return SimConfig(
            self._t_final if t_final is None else t_final,
            self._dt if dt is None else dt,
            {**self._constants, **constants}
        )

    def key(self) -> tuple:
        """Hashable identity used in cache keys."""
        return (self._t_final, self._dt, tuple(sorted((k, repr(v)) for k, v in self._constants.items())))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimConfig) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __reduce__(self):
        return (SimConfig, (self._t_final, self._dt, dict(self._constants)))

    def __repr__(self) -> str:
        return f'SimConfig(t_final={self._t_final}, dt={self._dt}, constants={dict(self._constants)})'


class Plant(Protocol):
    """
    Closed-loop dynamics bound to one parameter point.

    `begin_step` runs once before every RK4 step and may latch sampled inputs
    (held over the step) or update discrete controller memory.
    """

    def initial_state(self) -> FloatArray: ...

    def begin_step(self, t: float, x: FloatArray) -> None: ...

    def derivative(self, t: float, x: FloatArray) -> FloatArray: ...

    def outputs(self, times: FloatArray, states: FloatArray) -> dict[str, FloatArray]: ...


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    A benchmark: its parameter box, nominal initial state and closed-loop model.

    Attributes:
        name: Registry name.
        state_dim: Dimension `n` of the closed-loop state.
        param_names: One name per uncertain parameter (dimension `p`).
        lower: Lower box bounds.
        upper: Upper box bounds.
        x0: Nominal initial state; parameters may offset parts of it.
        build: `build(theta, config) -> Plant`, deterministic.
        channels: Output channel names present in every trace.
        default_config: Horizon, step and constants used unless overridden.
        default_formula: Preset name of the requirement.
        default_resolution: Grid points per dimension for desk-scale runs.
        continuity_bound: Largest robustness jump between adjacent default-grid points on the
            same side of the failure boundary, calibrated from a sweep.
    """

    name: str
    state_dim: int
    param_names: tuple[str, ...]
    lower: FloatArray
    upper: FloatArray
    x0: FloatArray
    build: Callable[[FloatArray, SimConfig], Plant]
    channels: tuple[str, ...]
    default_config: SimConfig
    default_formula: str
    default_resolution: tuple[int, ...]
    continuity_bound: float = np.inf
    description: str = field(default='', repr=False)

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (len(self.param_names),) or upper.shape != lower.shape:
            raise ValueError(f'Box bounds of "{self.name}" must match {len(self.param_names)} parameters.')
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper)) and np.all(lower < upper)):
            raise ValueError(f'Box bounds of "{self.name}" must be finite with lower < upper.')
        if len(self.default_resolution) != lower.size:
            raise ValueError(f'Default resolution of "{self.name}" must have {lower.size} entries.')
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'x0', np.asarray(self.x0, dtype=float))

    @property
    def param_dim(self) -> int:
        return len(self.param_names)

    def contains(self, theta: FloatArray, tol: float = 1e-9) -> bool:
        theta = np.asarray(theta, dtype=float)
        span = self.upper - self.lower
        return bool(np.all(theta >= self.lower - tol * span) and np.all(theta <= self.upper + tol * span))
