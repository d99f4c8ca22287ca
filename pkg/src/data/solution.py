"""
Switching Options - Solution Types
==================================
Piecewise value functions, region map and their JSON form
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from src.data.problem import ProblemData
from src.data.results import CaseId, Coefficients, FreeBoundaries, Thresholds
from src.utils.constants import CLOSED_REGIONS, OPEN_REGIONS
from src.utils.helpers import finite_or_none, none_to_inf


@dataclass(frozen=True)
class Interval:
    """Sub-interval of (0, inf) with explicit endpoint closedness"""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def contains(self, x):
        """Membership test; works elementwise on numpy arrays"""
        above = (x >= self.lo) if self.lo_closed else (x > self.lo)
        below = (x <= self.hi) if self.hi_closed else (x < self.hi)
        return np.logical_and(above, below)

    def contains_from(self, x, side: str):
        """Membership of the one-sided neighbourhood of x (side 'left' or 'right')"""
        if side == "left":
            return np.logical_and(x > self.lo, x <= self.hi)
        return np.logical_and(x >= self.lo, x < self.hi)

    @property
    def bounds(self) -> str:
        return ("[" if self.lo_closed else "(") + ("]" if self.hi_closed else ")")

    def to_dict(self) -> Dict:
        return {"lo": self.lo, "hi": finite_or_none(self.hi), "bounds": self.bounds}

    @classmethod
    def from_dict(cls, doc: Dict) -> "Interval":
        bounds = doc.get("bounds", "()")
        return cls(float(doc["lo"]), none_to_inf(doc.get("hi")), bounds[0] == "[", bounds[1] == "]")


@dataclass(frozen=True)
class RegionMap:
    P: Tuple[Interval, ...] = ()
    S_out: Tuple[Interval, ...] = ()
    A1: Tuple[Interval, ...] = ()
    W: Tuple[Interval, ...] = ()
    S_in: Tuple[Interval, ...] = ()
    A0: Tuple[Interval, ...] = ()

    def for_mode(self, z: int) -> Dict[str, Tuple[Interval, ...]]:
        names = OPEN_REGIONS if z == 1 else CLOSED_REGIONS
        return {name: getattr(self, name) for name in names}

    def label(self, z: int, x: float) -> str:
        for name, intervals in self.for_mode(z).items():
            if any(bool(iv.contains(x)) for iv in intervals):
                return name
        raise ValueError(f"x={x} not covered by the mode-{z} regions")

    def member(self, name: str, x) -> np.ndarray:
        """Vectorised membership of x in region `name`"""
        mask = np.zeros(np.shape(x), dtype=bool)
        for interval in getattr(self, name):
            mask |= interval.contains(x)
        return mask

    def to_dict(self) -> Dict[str, List[Dict]]:
        return {name: [iv.to_dict() for iv in getattr(self, name)]
                for name in OPEN_REGIONS + CLOSED_REGIONS}

    @classmethod
    def from_dict(cls, doc: Dict) -> "RegionMap":
        return cls(**{name: tuple(Interval.from_dict(iv) for iv in doc.get(name, []))
                      for name in OPEN_REGIONS + CLOSED_REGIONS})


class PieceKind(str, Enum):
    CONSTANT = "constant"
    POWER_PAIR = "power_pair"
    RESOLVENT_PLUS = "resolvent_plus"


@dataclass(frozen=True)
class Piece:
    """
    w(x) = a x^m + b x^n + [R_h(x)] + offset on `interval`

    The resolvent term is present only for RESOLVENT_PLUS; CONSTANT has a = b = 0.
    """

    interval: Interval
    kind: PieceKind
    region: str
    a: float = 0.0
    b: float = 0.0
    offset: float = 0.0

    @property
    def has_resolvent(self) -> bool:
        return self.kind == PieceKind.RESOLVENT_PLUS

    def to_dict(self) -> Dict:
        return {"interval": self.interval.to_dict(), "kind": self.kind.value, "region": self.region,
                "a": self.a, "b": self.b, "offset": self.offset}


@dataclass(frozen=True)
class Solution:
    """
    Solved instance: case, boundaries, coefficients and the two value functions

    `reduced` is the instance without closed-mode payoff that was classified
    and solved; value functions carry the closed_rate / r shift in their offsets.
    """

    data: ProblemData
    reduced: ProblemData
    case: CaseId
    thresholds: Thresholds
    boundaries: FreeBoundaries
    coefficients: Coefficients
    w1: Tuple[Piece, ...]
    w0: Tuple[Piece, ...]
    regions: RegionMap
    value_shift: float = 0.0
    breakpoints: Tuple[float, ...] = field(default=(), compare=False)

    def pieces(self, z: int) -> Tuple[Piece, ...]:
        return self.w1 if z == 1 else self.w0

    def to_dict(self, include_problem: bool = True) -> Dict:
        doc = {
            "case": self.case.value,
            "thresholds": self.thresholds.to_dict(),
            "boundaries": self.boundaries.to_dict(),
            "coefficients": self.coefficients.to_dict(),
            "regions": self.regions.to_dict(),
        }
        if include_problem:
            doc = {"problem": self.data.to_dict(), **doc}
        return doc
