"""Symmetry-reduced exact dynamics of a central spin coupled to a spin bath."""

__version__ = "0.1.0"

from .errors import SpinStarError  # noqa: E402
from .evolution import TrajectoryResult, run_trajectory  # noqa: E402
from .grid import TimeGrid  # noqa: E402
from .model import CentralState  # noqa: E402
from .symmetry import INFINITE, ModelParams  # noqa: E402

__all__ = [
    "INFINITE",
    "CentralState",
    "ModelParams",
    "SpinStarError",
    "TimeGrid",
    "TrajectoryResult",
    "__version__",
    "run_trajectory",
]
