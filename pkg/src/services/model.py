"""
Switching Options - Core Model
==============================
Fundamental roots, payoff evaluation, exact weighted integrals and the
resolvent R_h (expected discounted payoff of running open forever)

All integrals of the payoff family have closed-form antiderivatives, so
nothing in here does quadrature.
"""

import logging
import math
from enum import Enum
from typing import Tuple, Union

import numpy as np

from src.data.problem import FundamentalRoots, MarketParams, PayoffSpec, ProblemData
from src.utils.errors import DivergentIntegral
from src.utils.root_finding import find_root_bracketed

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class IntegralKind(str, Enum):
    """Weight s^(-k-1) with k = m (M) or k = n (N)"""

    M = "M"
    N = "N"


def compute_roots(market: MarketParams) -> FundamentalRoots:
    """
    Roots of sigma^2 k (k - 1) + b k - r = 0

    The root without cancellation is taken from the quadratic formula and the
    other from the product m n = -r / sigma^2.
    """
    s2, b, r = market.sigma2, market.b, market.r
    root_disc = math.sqrt((b - s2) ** 2 + 4.0 * s2 * r)
    if s2 - b >= 0:
        n = (s2 - b + root_disc) / (2.0 * s2)
        m = -r / (s2 * n)
    else:
        m = (s2 - b - root_disc) / (2.0 * s2)
        n = -r / (s2 * m)
    return FundamentalRoots(m, n)


def payoff_eval(h: PayoffSpec, x: ArrayLike) -> ArrayLike:
    """h(x), right-continuous at step locations; vectorised over numpy arrays"""
    xs = np.asarray(x, dtype=float)
    total = np.full(xs.shape, h.constant, dtype=float)
    for term in h.active_powers:
        total = total + term.weight * np.power(xs, term.exponent)
    for term in h.active_steps:
        total = total + np.where(xs >= term.location, term.jump, 0.0)
    return float(total) if total.ndim == 0 else total


def _continuous_part(h: PayoffSpec, x: float) -> float:
    return sum(t.weight * x ** t.exponent for t in h.active_powers)


def level_crossing(h: PayoffSpec, level: float) -> float:
    """
    inf{x > 0 : h(x) >= level}; 0 when h(0) >= level

    h is strictly increasing, so this is also the zero of h - level when h
    crosses continuously, and a step location when a jump carries it over.
    """
    if h.h0 >= level:
        return 0.0
    left, base = 0.0, h.h0
    for location in tuple(sorted(set(h.step_locations))) + (math.inf,):
        if location > left:
            if math.isinf(location):
                start = max(2.0 * left, 1.0)
                return find_root_bracketed(lambda x: _continuous_part(h, x) + base - level,
                                           left, start, "payoff_level", expand="up")
            if _continuous_part(h, location) + base >= level:
                return find_root_bracketed(lambda x: _continuous_part(h, x) + base - level,
                                           left, location, "payoff_level")
        base += sum(t.jump for t in h.active_steps if t.location == location)
        left = location
        if _continuous_part(h, left) + base >= level:
            return left
    raise AssertionError("unreachable: h is unbounded above")


def _antiderivative(coef: float, exponent: float, s: float) -> float:
    """coef * s^e / e with the limits at 0 and infinity taken analytically"""
    if s == 0.0:
        if exponent > 0:
            return 0.0
        raise DivergentIntegral(f"term {coef}*s^{exponent - 1} not integrable at 0")
    if math.isinf(s):
        if exponent < 0:
            return 0.0
        raise DivergentIntegral(f"term {coef}*s^{exponent - 1} not integrable at infinity")
    return coef * s ** exponent / exponent


def _weighted_terms(kind: IntegralKind, roots: FundamentalRoots, h: PayoffSpec,
                    lo: float, hi: float, shift: float):
    """Yield (F(hi), F(lo)) per additive term of the integrand"""
    k = roots.m if kind == IntegralKind.M else roots.n
    for term in h.active_powers:
        e = term.exponent - k
        yield _antiderivative(term.weight, e, hi), _antiderivative(term.weight, e, lo)
    c = h.constant + shift
    if c != 0.0:
        yield _antiderivative(c, -k, hi), _antiderivative(c, -k, lo)
    for term in h.active_steps:
        lower = max(lo, term.location)
        if lower < hi:
            yield _antiderivative(term.jump, -k, hi), _antiderivative(term.jump, -k, lower)


def weighted_integral(kind: IntegralKind, roots: FundamentalRoots, h: PayoffSpec,
                      lo: float, hi: float, shift: float = 0.0) -> float:
    """
    Integral of s^(-k-1) [h(s) + shift] over [lo, hi], k = m or n

    Args:
        kind: IntegralKind.M or IntegralKind.N
        roots: Fundamental roots of the market
        h: Payoff
        lo: Lower limit (>= 0)
        hi: Upper limit (may be math.inf); hi < lo flips the sign
        shift: Constant L added to the payoff

    Returns:
        The exact value
    """
    if lo == hi:
        return 0.0
    if hi < lo:
        return -weighted_integral(kind, roots, h, hi, lo, shift)
    return math.fsum(upper - lower for upper, lower in _weighted_terms(kind, roots, h, lo, hi, shift))


def weighted_integral_scale(kind: IntegralKind, roots: FundamentalRoots, h: PayoffSpec,
                            lo: float, hi: float, shift: float = 0.0) -> float:
    """Sum of |antiderivative evaluations|; the magnitude rounding error is relative to"""
    if lo == hi:
        return 0.0
    if hi < lo:
        lo, hi = hi, lo
    return math.fsum(abs(upper) + abs(lower) for upper, lower in _weighted_terms(kind, roots, h, lo, hi, shift))


def _spread(market: MarketParams, roots: FundamentalRoots) -> float:
    return market.sigma2 * (roots.n - roots.m)


def resolvent(roots: FundamentalRoots, market: MarketParams, h: PayoffSpec, x: float) -> float:
    """R_h(x) from its weighted-integral representation"""
    return (x ** roots.m * weighted_integral(IntegralKind.M, roots, h, 0.0, x)
            + x ** roots.n * weighted_integral(IntegralKind.N, roots, h, x, math.inf)) / _spread(market, roots)


def resolvent_deriv(roots: FundamentalRoots, market: MarketParams, h: PayoffSpec, x: float) -> float:
    """R_h'(x) from its weighted-integral representation"""
    m, n = roots.m, roots.n
    return (m * x ** (m - 1) * weighted_integral(IntegralKind.M, roots, h, 0.0, x)
            + n * x ** (n - 1) * weighted_integral(IntegralKind.N, roots, h, x, math.inf)) / _spread(market, roots)


def power_derivative(x: np.ndarray, exponent: float, order: int) -> np.ndarray:
    """d^order/dx^order of x^exponent"""
    factor = 1.0
    for i in range(order):
        factor *= exponent - i
    return factor * np.power(x, exponent - order)


def resolvent_direct(roots: FundamentalRoots, market: MarketParams, h: PayoffSpec,
                     x: ArrayLike, order: int = 0) -> ArrayLike:
    """
    R_h and its first two derivatives term by term, vectorised

    A power c x^theta maps to c x^theta / (r - b theta - sigma^2 theta (theta - 1)),
    a constant c0 to c0 / r, and a step j 1{x >= a} to
    j / (S n) (x/a)^n below a and j / r + j / (S m) (x/a)^m from a on,
    with S = sigma^2 (n - m).
    """
    if order not in (0, 1, 2):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")
    xs = np.asarray(x, dtype=float)
    m, n, r = roots.m, roots.n, market.r
    spread = _spread(market, roots)
    total = np.zeros(xs.shape, dtype=float)
    for term in h.active_powers:
        theta = term.exponent
        denominator = r - market.b * theta - market.sigma2 * theta * (theta - 1.0)
        total = total + term.weight / denominator * power_derivative(xs, theta, order)
    if order == 0:
        total = total + h.constant / r
    for term in h.active_steps:
        a, j = term.location, term.jump
        below = j / (spread * n) * a ** (-n) * power_derivative(xs, n, order)
        above = j / (spread * m) * a ** (-m) * power_derivative(xs, m, order)
        if order == 0:
            above = above + j / r
        total = total + np.where(xs >= a, above, below)
    return float(total) if total.ndim == 0 else total


class ProblemContext:
    """
    A problem instance with its derived constants and integral shortcuts

    im / inn are the M- and N-kind weighted integrals of h + shift; level(L)
    is the zero of h + L. Built on the reduced instance (no closed-mode
    payoff), which is the one classified and solved.
    """

    def __init__(self, data: ProblemData):
        data = data.reduced()
        self.data = data
        self.market = data.market
        self.payoff = data.payoff
        self.roots = data.roots
        self.m, self.n = data.roots.m, data.roots.n
        self.r = data.market.r
        self.sigma2 = data.market.sigma2
        self.spread = self.sigma2 * (self.n - self.m)
        self.K1, self.K0, self.K = data.costs.K1, data.costs.K0, data.costs.K
        self.h0 = data.payoff.h0
        self.steps: Tuple[float, ...] = data.payoff.step_locations

    def h(self, x: ArrayLike) -> ArrayLike:
        return payoff_eval(self.payoff, x)

    def im(self, lo: float, hi: float, shift: float = 0.0) -> float:
        return weighted_integral(IntegralKind.M, self.roots, self.payoff, lo, hi, shift)

    def inn(self, lo: float, hi: float, shift: float = 0.0) -> float:
        return weighted_integral(IntegralKind.N, self.roots, self.payoff, lo, hi, shift)

    def im_scale(self, lo: float, hi: float, shift: float = 0.0) -> float:
        return weighted_integral_scale(IntegralKind.M, self.roots, self.payoff, lo, hi, shift)

    def inn_scale(self, lo: float, hi: float, shift: float = 0.0) -> float:
        return weighted_integral_scale(IntegralKind.N, self.roots, self.payoff, lo, hi, shift)

    def level(self, shift: float) -> float:
        return level_crossing(self.payoff, -shift)

    def R(self, x: ArrayLike, order: int = 0) -> ArrayLike:
        return resolvent_direct(self.roots, self.market, self.payoff, x, order)
