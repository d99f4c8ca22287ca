"""
Switching Options - Classification & Boundary Results
=====================================================
Case identifiers, classification thresholds, free boundaries and coefficients
"""

from dataclasses import dataclass, fields
from enum import Enum
from typing import Dict, Optional, Tuple


class CaseId(str, Enum):
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    II1 = "II1"
    II2 = "II2"
    II3 = "II3"
    III1 = "III1"
    III2 = "III2"


def _present(obj) -> Dict[str, float]:
    return {f.name: getattr(obj, f.name) for f in fields(obj)
            if isinstance(getattr(obj, f.name), float)}


@dataclass(frozen=True)
class Thresholds:
    """Subsidiary quantities computed while classifying; `needed` names those the table consulted"""

    delta_dagger: Optional[float] = None
    x_hat: Optional[float] = None
    K0_star: Optional[float] = None
    K1_dagger: Optional[float] = None
    K0_dagger: Optional[float] = None
    needed: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, float]:
        return _present(self)


@dataclass(frozen=True)
class FreeBoundaries:
    """Boundary points; absent ones are None. For II2 and III1 `delta` holds delta_dagger"""

    zeta: Optional[float] = None
    delta: Optional[float] = None
    gamma: Optional[float] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None

    def to_dict(self) -> Dict[str, float]:
        return _present(self)

    @classmethod
    def from_dict(cls, doc: Dict[str, float]) -> "FreeBoundaries":
        return cls(**{k: float(v) for k, v in doc.items()})

    def points(self) -> Tuple[float, ...]:
        return tuple(sorted(self.to_dict().values()))


@dataclass(frozen=True)
class Coefficients:
    A: Optional[float] = None
    B: Optional[float] = None
    Gamma1: Optional[float] = None
    Gamma2: Optional[float] = None
    Delta1: Optional[float] = None
    Delta2: Optional[float] = None

    def to_dict(self) -> Dict[str, float]:
        return _present(self)

    @classmethod
    def from_dict(cls, doc: Dict[str, float]) -> "Coefficients":
        return cls(**{k: float(v) for k, v in doc.items()})


@dataclass(frozen=True)
class Residual:
    """One defining equation evaluated at a solution, with its magnitude scale"""

    value: float
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)
