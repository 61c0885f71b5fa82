from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGridError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t0, t0 + dt, ..., t0 + dt (n_steps - 1)."""

    dt: float = 0.05
    n_steps: int = 4001
    t0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidGridError(f"dt must be a positive number, got {self.dt!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidGridError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "t0", float(self.t0))

    @classmethod
    def from_t_max(cls, dt: float, t_max: float, t0: float = 0.0) -> TimeGrid:
        if not (math.isfinite(t_max) and t_max >= t0):
            raise InvalidGridError(f"t_max must be >= t0, got {t_max!r}")
        if not (math.isfinite(dt) and dt > 0):
            raise InvalidGridError(f"dt must be a positive number, got {dt!r}")
        return cls(dt, int(round((t_max - t0) / dt)) + 1, t0)

    @property
    def t_max(self) -> float:
        return self.t0 + self.dt * (self.n_steps - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps)
