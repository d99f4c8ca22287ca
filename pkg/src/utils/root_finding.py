"""
Switching Options - Bracketed Root Finding
==========================================
Brent's method behind a bracket-expansion layer

The free-boundary equations all come with a sign structure (monotone or
unimodal maps), so every solve starts from a bracket built from landmark
points and only falls back to geometric expansion when a landmark is not
enough. Payoff step locations inside a bracket are evaluated first and the
bracket is narrowed to the piece carrying the sign change.

Boundaries live on (0, inf) and may sit many decades away from 1, so a
bracket is narrowed geometrically until its ends are within a factor of two
and Brent's method then runs with a tolerance relative to the bracket.
"""

import logging
import math
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.utils.constants import (
    BRACKET_ACCELERATE_EVERY,
    BRACKET_FACTOR,
    BRACKET_MAX_EXPANSIONS,
    GEOMETRIC_RATIO,
    ROOT_MAXITER,
    ROOT_XTOL,
)
from src.utils.errors import RootNotBracketed

logger = logging.getLogger(__name__)

_RTOL = 4.0 * np.finfo(float).eps
_XTOL_FLOOR = float(np.nextafter(0.0, 1.0))
# 2^-(2^11) underflows to 0
_ZERO_WALK = 12

Bracket = Tuple[float, float, float, float]


def _same_sign(a: float, b: float) -> bool:
    return (a > 0 and b > 0) or (a < 0 and b < 0)


def _factor(expansions: int) -> float:
    """Expansion factor; squares every BRACKET_ACCELERATE_EVERY steps"""
    return BRACKET_FACTOR ** (1 << (expansions // BRACKET_ACCELERATE_EVERY))


def _lift_off_zero(f: Callable[[float], float], name: str, f_zero: float, hi: float, f_hi: float):
    """
    Replace a left end at 0 by a positive point where f has the sign of f(0)

    Walks down from hi through hi * 2^-1, 2^-2, 2^-4, ... Returns either a
    bracket (lo, f_lo, hi, f_hi) or a float when a root is hit or lies below
    the smallest positive double.
    """
    top = hi
    for j in range(_ZERO_WALK):
        point = top * 2.0 ** -(2 ** j)
        if point == 0.0:
            return hi
        f_point = f(point)
        if f_point == 0.0:
            return point
        if not math.isfinite(f_point):
            raise RootNotBracketed(name, (0.0, hi), f"f({point:.6g}) is not finite")
        if _same_sign(f_point, f_zero):
            return point, f_point, hi, f_hi
        hi, f_hi = point, f_point
    return hi


def _narrow_geometric(f: Callable[[float], float], bracket: Bracket):
    """Bisect in log scale until hi <= GEOMETRIC_RATIO * lo; a float means an exact zero was hit"""
    lo, f_lo, hi, f_hi = bracket
    while hi > GEOMETRIC_RATIO * lo:
        mid = math.sqrt(lo) * math.sqrt(hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if _same_sign(f_lo, f_mid):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo, f_lo, hi, f_hi


def find_root_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    name: str,
    expand: Optional[str] = None,
    breakpoints: Iterable[float] = (),
) -> float:
    """
    Locate a sign change of f between lo and hi and refine it with Brent's method

    Args:
        f: Scalar map, continuous on the bracket except possibly at breakpoints
        lo: Left end (>= 0)
        hi: Right end (> lo)
        name: Equation name reported if no sign change is found
        expand: "up" grows hi, "down" shrinks lo while f(lo), f(hi) share a sign
        breakpoints: Points (payoff steps) at which to split the bracket first

    Returns:
        The root, to within ROOT_XTOL relative
    """
    if lo < 0.0 or hi < lo or (hi == lo and not expand):
        raise RootNotBracketed(name, (lo, hi), "empty bracket")

    f_lo, f_hi = f(lo), f(hi)
    expansions = 0
    while _same_sign(f_lo, f_hi) and expand and expansions < BRACKET_MAX_EXPANSIONS:
        factor = _factor(expansions)
        if expand == "up":
            lo, f_lo = hi, f_hi
            hi *= factor
            f_hi = f(hi)
        elif expand == "down":
            hi, f_hi = lo, f_lo
            lo /= factor
            f_lo = f(lo)
        else:
            raise ValueError(f"unknown expansion rule '{expand}'")
        expansions += 1

    if expansions:
        logger.debug(f"[ROOT] {name}: bracket expanded {expansions}x to [{lo:.6g}, {hi:.6g}]")

    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or _same_sign(f_lo, f_hi):
        raise RootNotBracketed(name, (lo, hi), f"f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")

    # Narrow to the first sub-interval with a sign change
    for point in sorted(p for p in breakpoints if lo < p < hi):
        f_point = f(point)
        if f_point == 0.0:
            return point
        if _same_sign(f_lo, f_point):
            lo, f_lo = point, f_point
        else:
            hi, f_hi = point, f_point
            break

    bracket = (lo, f_lo, hi, f_hi)
    if lo == 0.0:
        bracket = _lift_off_zero(f, name, f_lo, hi, f_hi)
        if isinstance(bracket, float):
            return bracket
    bracket = _narrow_geometric(f, bracket)
    if isinstance(bracket, float):
        return bracket
    lo, _, hi, _ = bracket

    xtol = max(ROOT_XTOL * lo, _XTOL_FLOOR)
    root, result = brentq(f, lo, hi, xtol=xtol, rtol=_RTOL, maxiter=ROOT_MAXITER,
                          full_output=True, disp=False)
    if not result.converged:
        logger.warning(f"[ROOT] {name}: not converged after {result.iterations} iterations ({result.flag})")
    return float(root)
