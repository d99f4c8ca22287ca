"""
Switching Options - Utility Functions
=====================================
Number formatting, grid parsing and JSON-friendly conversions
"""

import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional

import numpy as np

from src.utils.constants import GRID_OFFSET, SIGNIFICANT_DIGITS
from src.utils.errors import InvalidConfig


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid on (0, inf): bounds, point count and spacing"""

    x_min: float
    x_max: float
    points: int
    log_spaced: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidConfig("grid bounds must be finite")
        if self.x_min <= 0:
            raise InvalidConfig(f"grid x_min must be positive, got {self.x_min}")
        if self.x_max <= self.x_min:
            raise InvalidConfig(f"grid x_max must exceed x_min, got {self.x_max} <= {self.x_min}")
        if self.points < 2:
            raise InvalidConfig(f"grid needs at least 2 points, got {self.points}")

    def values(self) -> np.ndarray:
        if self.log_spaced:
            return np.geomspace(self.x_min, self.x_max, self.points)
        return np.linspace(self.x_min, self.x_max, self.points)


def parse_grid(text: str) -> GridSpec:
    """
    Parse a grid flag of the form MIN:MAX:N[:log]

    Args:
        text: Flag value, e.g. "0.1:10:100:log"

    Returns:
        GridSpec (linear spacing unless the fourth field is "log")
    """
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise InvalidConfig(f"grid must look like MIN:MAX:N[:log], got '{text}'")
    if len(parts) == 4 and parts[3] not in ("log", "lin"):
        raise InvalidConfig(f"grid spacing must be 'log' or 'lin', got '{parts[3]}'")
    try:
        x_min, x_max, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise InvalidConfig(f"grid fields are not numeric: '{text}'") from e
    return GridSpec(x_min, x_max, points, log_spaced=len(parts) == 4 and parts[3] == "log")


def nudge_off(points: np.ndarray, avoid: Iterable[float]) -> np.ndarray:
    """Move grid points lying within GRID_OFFSET (relative) of any avoided point just to its right"""
    x = np.array(points, dtype=float)
    for p in avoid:
        close = np.abs(x - p) <= GRID_OFFSET * p
        x[close] = p * (1.0 + 2.0 * GRID_OFFSET)
    return x


def format_number(value: float) -> str:
    """Format a float with 17 significant digits (lossless for doubles)"""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """JSON has no infinity; open-ended interval ends are written as null"""
    if value is None or math.isinf(value):
        return None
    return float(value)


def none_to_inf(value: Any) -> float:
    return math.inf if value is None else float(value)
