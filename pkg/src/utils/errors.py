"""
Switching Options - Errors
==========================
Exception hierarchy shared by the solver, verification and CLI layers
"""

from typing import Optional, Tuple


class SwitchingError(Exception):
    """Base class for every error raised by this package"""


class InvalidProblem(SwitchingError, ValueError):
    """Problem data violates a model invariant"""


class DivergentIntegral(SwitchingError, ArithmeticError):
    """A weighted integral was requested over a non-integrable endpoint"""


class RootNotBracketed(SwitchingError, RuntimeError):
    """No sign change found for a defining equation after bracket expansion"""

    def __init__(self, equation: str, bracket: Optional[Tuple[float, float]] = None, detail: str = ""):
        self.equation = equation
        self.bracket = bracket
        message = f"root not bracketed for equation '{equation}'"
        if bracket is not None:
            message += f" on [{bracket[0]:.6g}, {bracket[1]:.6g}]"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class PreconditionViolated(SwitchingError, ValueError):
    """An operation was called outside the classification branch it belongs to"""


class UndefinedSecondDerivative(SwitchingError, ValueError):
    """Second derivative requested at a boundary or payoff step point"""


class InvalidConfig(SwitchingError, ValueError):
    """Simulation or run configuration is out of range"""


class InvalidPerturbation(SwitchingError, ValueError):
    """Perturbed boundaries break the ordering of the case"""


class InconsistentSolution(SwitchingError, ArithmeticError):
    """A solved quantity disagrees with a second closed form or leaves its guaranteed range"""
