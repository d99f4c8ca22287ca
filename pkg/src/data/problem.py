"""
Switching Options - Problem Data
================================
Immutable description of one switching problem and its JSON codec:
- market dynamics (drift, volatility scale, discount rate)
- switching and abandonment costs
- running payoff h from the closed-form family
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from src.utils.errors import InvalidProblem


def _finite(name: str, value: Any) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise InvalidProblem(f"{name} must be a number, got {value!r}") from e
    if not math.isfinite(number):
        raise InvalidProblem(f"{name} must be finite, got {value!r}")
    return number


@dataclass(frozen=True)
class MarketParams:
    """dX = bX dt + sqrt(2) sigma X dW, discounted at rate r"""

    b: float
    sigma: float
    r: float

    def __post_init__(self):
        for name in ("b", "sigma", "r"):
            _finite(name, getattr(self, name))
        if self.sigma == 0:
            raise InvalidProblem("sigma must be nonzero")
        if self.r <= 0:
            raise InvalidProblem(f"discount rate r must be positive, got {self.r}")

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma


@dataclass(frozen=True)
class FundamentalRoots:
    """Exponents m < 0 < n of the homogeneous Euler equation"""

    m: float
    n: float

    def __post_init__(self):
        if not (self.m < 0 < self.n):
            raise InvalidProblem(f"fundamental roots must satisfy m < 0 < n, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class CostParams:
    K1: float
    K0: float
    K: float

    def __post_init__(self):
        for name in ("K1", "K0", "K"):
            _finite(name, getattr(self, name))
        if self.K1 <= 0 or self.K0 <= 0:
            raise InvalidProblem(f"switching costs must be positive, got K1={self.K1}, K0={self.K0}")


@dataclass(frozen=True)
class PowerTerm:
    weight: float
    exponent: float


@dataclass(frozen=True)
class StepTerm:
    jump: float
    location: float


@dataclass(frozen=True)
class PayoffSpec:
    """
    h(x) = sum c_i x^theta_i + c0 + sum j_k 1{x >= a_k}

    Weights and jumps are nonnegative so h is increasing and right-continuous.
    """

    powers: Tuple[PowerTerm, ...] = ()
    constant: float = 0.0
    steps: Tuple[StepTerm, ...] = ()

    def __post_init__(self):
        _finite("payoff constant", self.constant)
        growing = False
        for term in self.powers:
            _finite("power weight", term.weight)
            _finite("power exponent", term.exponent)
            if term.weight < 0:
                raise InvalidProblem(f"power weights must be nonnegative, got {term.weight}")
            if term.weight > 0 and term.exponent <= 0:
                raise InvalidProblem(
                    f"power term {term.weight}*x^{term.exponent} is not increasing with finite h(0)"
                )
            growing = growing or (term.weight > 0 and term.exponent > 0)
        if not growing:
            raise InvalidProblem("payoff needs at least one positive-weight power with positive exponent")
        for term in self.steps:
            _finite("step jump", term.jump)
            _finite("step location", term.location)
            if term.jump < 0:
                raise InvalidProblem(f"step jumps must be nonnegative, got {term.jump}")
            if term.location <= 0:
                raise InvalidProblem(f"step locations must be positive, got {term.location}")

    @property
    def h0(self) -> float:
        """Limit of h at 0 from above"""
        return self.constant

    @property
    def active_powers(self) -> Tuple[PowerTerm, ...]:
        return tuple(t for t in self.powers if t.weight != 0)

    @property
    def active_steps(self) -> Tuple[StepTerm, ...]:
        return tuple(t for t in self.steps if t.jump != 0)

    @property
    def step_locations(self) -> Tuple[float, ...]:
        return tuple(sorted(t.location for t in self.active_steps))

    def shifted(self, delta: float) -> "PayoffSpec":
        return PayoffSpec(self.powers, self.constant + delta, self.steps)


@dataclass(frozen=True)
class ProblemData:
    market: MarketParams
    costs: CostParams
    payoff: PayoffSpec
    # Running payoff earned while the project is closed
    closed_rate: float = 0.0
    roots: FundamentalRoots = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        from src.services.model import compute_roots

        _finite("closed_rate", self.closed_rate)
        roots = compute_roots(self.market)
        for term in self.payoff.active_powers:
            if not (roots.m < term.exponent < roots.n):
                raise InvalidProblem(
                    f"power exponent {term.exponent} outside the integrability range "
                    f"({roots.m:.6g}, {roots.n:.6g})"
                )
        object.__setattr__(self, "roots", roots)

    def reduced(self) -> "ProblemData":
        """Equivalent instance with no closed-mode payoff (values differ by closed_rate / r)"""
        if self.closed_rate == 0:
            return self
        shift = self.closed_rate / self.market.r
        costs = CostParams(self.costs.K1, self.costs.K0, self.costs.K + shift)
        return ProblemData(self.market, costs, self.payoff.shifted(-self.closed_rate))

    # ==================== JSON ====================

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "ProblemData":
        """Build from the documented JSON layout; raises InvalidProblem on any malformed field"""
        try:
            market_doc, costs_doc, payoff_doc = doc["market"], doc["costs"], doc["payoff"]
            market = MarketParams(
                _finite("b", market_doc["b"]),
                _finite("sigma", market_doc["sigma"]),
                _finite("r", market_doc["r"]),
            )
            costs = CostParams(
                _finite("K1", costs_doc["K1"]),
                _finite("K0", costs_doc["K0"]),
                _finite("K", costs_doc["K"]),
            )
            powers = tuple(PowerTerm(_finite("weight", c), _finite("exponent", t))
                           for c, t in payoff_doc.get("powers", []))
            steps = tuple(StepTerm(_finite("jump", j), _finite("location", a))
                          for j, a in payoff_doc.get("steps", []))
            payoff = PayoffSpec(powers, _finite("constant", payoff_doc.get("constant", 0.0)), steps)
            closed_rate = _finite("closed_rate", payoff_doc.get("closed_rate", 0.0))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidProblem):
                raise
            raise InvalidProblem(f"malformed problem document: {e!r}") from e
        return cls(market, costs, payoff, closed_rate)

    def to_dict(self) -> Dict[str, Any]:
        payoff = {
            "powers": [[t.weight, t.exponent] for t in self.payoff.powers],
            "constant": self.payoff.constant,
            "steps": [[t.jump, t.location] for t in self.payoff.steps],
        }
        if self.closed_rate:
            payoff["closed_rate"] = self.closed_rate
        return {
            "market": {"b": self.market.b, "sigma": self.market.sigma, "r": self.market.r},
            "costs": {"K1": self.costs.K1, "K0": self.costs.K0, "K": self.costs.K},
            "payoff": payoff,
        }
