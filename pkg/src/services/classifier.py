"""
Switching Options - Case Classifier
===================================
Decides which of the eight solution shapes applies to an instance and
computes the critical cost levels that separate them:
- delta_dagger: open-mode abandonment threshold (independent of K0)
- K0_star: splits II2 from II3
- K1_dagger, K0_dagger: split III1 from III2
"""

import logging
from typing import List, Optional, Tuple

from src.data.problem import ProblemData
from src.data.results import CaseId, Thresholds
from src.services.boundaries import ClosedWaitingSystem, OpenAbandonSystem, open_abandon_threshold
from src.services.model import ProblemContext
from src.utils.errors import InconsistentSolution, PreconditionViolated
from src.utils.root_finding import find_root_bracketed

logger = logging.getLogger(__name__)


def solve_delta_dagger(data: ProblemData) -> Optional[float]:
    """Open-mode abandonment threshold, or None when h(0) + rK >= 0"""
    return open_abandon_threshold(ProblemContext(data))


def _x_hat(ctx: ProblemContext, delta: float, alpha: float) -> float:
    """
    Maximiser over [delta, alpha] of the gap between the closed and open values

    Root of the derivative of x^-m times the M-integral against x^-n times the
    N-integral, both of h - rK1 over [x, alpha].
    """
    rK1 = ctx.r * ctx.K1
    m, n = ctx.m, ctx.n

    def slope(x: float) -> float:
        return m * ctx.im(x, alpha, -rK1) - n * x ** (n - m) * ctx.inn(x, alpha, -rK1)

    alpha_bar = ctx.level(-rK1)
    hi = alpha_bar if delta < alpha_bar < alpha else alpha
    return find_root_bracketed(slope, delta, hi, "gap_maximum", breakpoints=ctx.steps)


def _k0_star(ctx: ProblemContext) -> Tuple[float, float, float]:
    if ctx.K < 0:
        raise PreconditionViolated("K0_star belongs to the K >= 0 branch")
    delta, alpha = OpenAbandonSystem(ctx).solve()
    x_hat = _x_hat(ctx, delta, alpha)
    k0_star = -ctx.K1 - ctx.m * x_hat ** ctx.m / ctx.r * ctx.im(x_hat, alpha, -ctx.r * ctx.K1)
    if not (ctx.K < k0_star < -ctx.h0 / ctx.r):
        raise InconsistentSolution(f"K0_star={k0_star:.6g} outside ({ctx.K:.6g}, {-ctx.h0 / ctx.r:.6g})")
    return k0_star, x_hat, delta


def compute_K0_star(data: ProblemData) -> float:
    """Critical closing cost separating II2 (K0 >= K0_star) from II3"""
    return _k0_star(ProblemContext(data))[0]


def _k1_dagger(ctx: ProblemContext, delta: float) -> float:
    """
    Pin zeta to delta_dagger in the closed-waiting system and eliminate K1

    The remaining alpha-equation changes sign between the zero of h and
    infinity; K1_dagger then follows from the M-equation, which is linear in K1.
    """
    m, n = ctx.m, ctx.n

    def pinned(alpha: float) -> float:
        return -n * ctx.inn(delta, alpha, 0.0) + m * alpha ** (m - n) * ctx.im(delta, alpha, 0.0)

    lo = ctx.level(0.0)
    alpha = find_root_bracketed(pinned, lo, 2.0 * lo, "switch_in_pinned", expand="up", breakpoints=ctx.steps)
    return -m * ctx.im(delta, alpha, 0.0) / (ctx.r * alpha ** (-m))


def _require_closed_branch(ctx: ProblemContext) -> float:
    if ctx.K >= 0:
        raise PreconditionViolated("closed-waiting thresholds belong to the K < 0 branch")
    delta = open_abandon_threshold(ctx)
    if delta is None:
        raise PreconditionViolated("closed-waiting thresholds need h(0) + rK < 0")
    if ctx.h(delta) >= 0:
        raise PreconditionViolated("closed-waiting thresholds need h(delta_dagger) < 0")
    return delta


def compute_K1_dagger(data: ProblemData) -> float:
    ctx = ProblemContext(data)
    return _k1_dagger(ctx, _require_closed_branch(ctx))


def _k0_dagger(ctx: ProblemContext) -> Tuple[float, float]:
    _require_closed_branch(ctx)
    zeta, delta, alpha = ClosedWaitingSystem(ctx).solve()
    if zeta >= delta:
        raise PreconditionViolated("K0_dagger needs K1 < K1_dagger (closed abandonment below delta_dagger)")
    x_hat = _x_hat(ctx, delta, alpha)
    k0_dagger = -ctx.K1 - ctx.n * x_hat ** ctx.n / ctx.r * ctx.inn(x_hat, alpha, -ctx.r * ctx.K1)
    if k0_dagger <= 0:
        raise InconsistentSolution(f"K0_dagger={k0_dagger:.6g} is not positive")
    return k0_dagger, x_hat


def compute_K0_dagger(data: ProblemData) -> float:
    """Critical closing cost separating III1 (K0 >= K0_dagger) from III2"""
    return _k0_dagger(ProblemContext(data))[0]


def classify(data: ProblemData) -> Tuple[CaseId, Thresholds]:
    """
    Walk the case table for the (reduced) instance

    Edge equalities resolve the way the table prints them, e.g. K0 = K0_star
    gives II2 and h(0) = rK1 gives I1. Only the thresholds the branch
    consults are computed; they are listed in Thresholds.needed.
    """
    ctx = ProblemContext(data)
    r, K, K0, K1, h0 = ctx.r, ctx.K, ctx.K0, ctx.K1, ctx.h0
    found = {}
    needed: List[str] = []

    def done(case: CaseId) -> Tuple[CaseId, Thresholds]:
        logger.info(f"[CLASSIFY] case {case.value} (h(0)={h0:.6g}, K1={K1:.6g}, K0={K0:.6g}, K={K:.6g})")
        return case, Thresholds(needed=tuple(needed), **found)

    if K >= 0:
        if h0 >= r * K1:
            return done(CaseId.I1)
        if h0 >= max(-r * K0, -r * K):
            return done(CaseId.I2)
        if K0 <= K:
            return done(CaseId.II1)
        if h0 >= -r * K0:
            return done(CaseId.II2)
        k0_star, x_hat, delta = _k0_star(ctx)
        found.update(delta_dagger=delta, x_hat=x_hat, K0_star=k0_star)
        needed.extend(("delta_dagger", "K0_star"))
        return done(CaseId.II2 if k0_star <= K0 else CaseId.II3)

    if h0 >= r * K1 - r * K:
        return done(CaseId.I1)
    if h0 >= -r * K:
        return done(CaseId.I3)
    if h0 >= -r * K0:
        return done(CaseId.III1)

    delta = open_abandon_threshold(ctx)
    found["delta_dagger"] = delta
    needed.append("delta_dagger")
    if ctx.h(delta) >= 0:
        return done(CaseId.III1)

    k1_dagger = _k1_dagger(ctx, delta)
    found["K1_dagger"] = k1_dagger
    needed.append("K1_dagger")
    if K1 >= k1_dagger:
        return done(CaseId.III1)

    k0_dagger, x_hat = _k0_dagger(ctx)
    found.update(K0_dagger=k0_dagger, x_hat=x_hat)
    needed.append("K0_dagger")
    return done(CaseId.III1 if K0 >= k0_dagger else CaseId.III2)
