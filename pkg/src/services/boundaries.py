"""
Switching Options - Free-Boundary Solver
========================================
Boundary points and closed-form coefficients for the seven non-trivial cases

Every system is reduced to nested one-dimensional root finds. Each class
below computes its landmark points first (zeros of h + constant, diagonal
roots), which give guaranteed brackets for the inner map and the outer
monotone equation.
"""

import logging
import math
from typing import Dict, Optional, Tuple

from src.data.problem import ProblemData
from src.data.results import CaseId, Coefficients, FreeBoundaries, Residual
from src.services.model import ProblemContext
from src.utils.constants import CONSISTENCY_TOL
from src.utils.errors import InconsistentSolution, PreconditionViolated
from src.utils.root_finding import find_root_bracketed

logger = logging.getLogger(__name__)

INF = math.inf


def _require(condition: bool, message: str):
    if not condition:
        raise PreconditionViolated(message)


def open_abandon_threshold(ctx: ProblemContext) -> Optional[float]:
    """
    delta_dagger: zero of the N-integral of h + rK over [delta, inf)

    Exists iff h(0) + rK < 0; the integral increases while h + rK < 0, so the
    root lies below the zero of h + rK.
    """
    rK = ctx.r * ctx.K
    if ctx.h0 + rK >= 0:
        return None
    top = ctx.level(rK)
    return find_root_bracketed(lambda d: ctx.inn(d, INF, rK), top / 2.0, top,
                               "open_abandon", expand="down", breakpoints=ctx.steps)


# ==================== CASE I.2 ====================

class SwitchInSystem:
    """Closed mode waits below alpha and switches in above it"""

    def __init__(self, ctx: ProblemContext):
        _require(ctx.h0 < ctx.r * ctx.K1, "switch-in threshold needs h(0) < rK1")
        self.ctx = ctx
        self.alpha_bar = ctx.level(-ctx.r * ctx.K1)

    def equation(self, alpha: float) -> float:
        return self.ctx.im(0.0, alpha, -self.ctx.r * self.ctx.K1)

    def solve(self) -> float:
        return find_root_bracketed(self.equation, self.alpha_bar, 2.0 * self.alpha_bar, "switch_in",
                                   expand="up", breakpoints=self.ctx.steps)


# ==================== CASE I.3 ====================

class ClosedAbandonSystem:
    """Closed mode abandons below zeta, waits on (zeta, alpha), switches in above alpha"""

    def __init__(self, ctx: ProblemContext):
        _require(ctx.K < 0, "closed-mode abandonment needs K < 0")
        _require(ctx.h0 < ctx.r * (ctx.K1 - ctx.K), "closed-mode abandonment needs h(0) < rK1 - rK")
        self.ctx = ctx
        self.rK, self.rK1 = ctx.r * ctx.K, ctx.r * ctx.K1
        self.alpha_bar = ctx.level(-self.rK1)
        zeta_low = ctx.level(self.rK - self.rK1)
        self.zeta_hat = find_root_bracketed(
            lambda z: ctx.m * ctx.im(0.0, z, self.rK - self.rK1),
            zeta_low, 2.0 * zeta_low, "closed_abandon_diagonal", expand="up", breakpoints=ctx.steps)

    def f1(self, zeta: float, alpha: float) -> float:
        return self.ctx.m * self.ctx.im(0.0, alpha, -self.rK1) - self.rK * zeta ** (-self.ctx.m)

    def f2(self, zeta: float, alpha: float) -> float:
        return self.ctx.n * self.ctx.inn(alpha, INF, -self.rK1) + self.rK * zeta ** (-self.ctx.n)

    def ell(self, zeta: float) -> float:
        """alpha solving f1(zeta, alpha) = 0; increasing in zeta, equal to zeta_hat at zeta_hat"""
        if zeta >= self.zeta_hat:
            return self.zeta_hat
        lo = max(zeta, self.alpha_bar)
        return find_root_bracketed(lambda a: self.f1(zeta, a), lo, self.zeta_hat, "closed_abandon_m",
                                   breakpoints=self.ctx.steps)

    def solve(self) -> Tuple[float, float]:
        zeta = find_root_bracketed(lambda z: self.f2(z, self.ell(z)), self.zeta_hat / 2.0, self.zeta_hat,
                                   "closed_abandon_n", expand="down", breakpoints=self.ctx.steps)
        return zeta, self.ell(zeta)


# ==================== CASE II.1 ====================

class SwitchingSystem:
    """Hysteresis band: open mode switches out below beta, closed mode switches in above alpha"""

    def __init__(self, ctx: ProblemContext):
        _require(ctx.h0 < -ctx.r * ctx.K0, "switching band needs h(0) < -rK0")
        self.ctx = ctx
        self.rK0, self.rK1 = ctx.r * ctx.K0, ctx.r * ctx.K1
        self.beta_bar = ctx.level(self.rK0)
        self.alpha_bar = ctx.level(-self.rK1)

    def alpha_of(self, beta: float) -> float:
        """alpha above the zero of h - rK1 with equal M-integrals; decreasing in beta"""
        target = self.ctx.im(0.0, beta, self.rK0)
        return find_root_bracketed(lambda a: self.ctx.im(0.0, a, -self.rK1) - target,
                                   self.alpha_bar, 2.0 * self.alpha_bar, "switching_m",
                                   expand="up", breakpoints=self.ctx.steps)

    def outer(self, beta: float) -> float:
        return self.ctx.inn(beta, INF, self.rK0) - self.ctx.inn(self.alpha_of(beta), INF, -self.rK1)

    def solve(self) -> Tuple[float, float]:
        beta = find_root_bracketed(self.outer, self.beta_bar / 2.0, self.beta_bar, "switching_n",
                                   expand="down", breakpoints=self.ctx.steps)
        return beta, self.alpha_of(beta)


# ==================== CASE II.2 ====================

class OpenAbandonSystem:
    """Open mode abandons below delta_dagger; closed mode switches in above alpha"""

    def __init__(self, ctx: ProblemContext):
        self.ctx = ctx
        self.delta = open_abandon_threshold(ctx)
        _require(self.delta is not None, "open-mode abandonment needs h(0) + rK < 0")
        _require(ctx.K + ctx.K1 > 0, "open-mode abandonment with switch-in needs K + K1 > 0")
        self.rK1 = ctx.r * ctx.K1
        self.alpha_bar = ctx.level(-self.rK1)

    def equation(self, alpha: float) -> float:
        ctx, d = self.ctx, self.delta
        return ctx.m * ctx.im(d, alpha, -self.rK1) + ctx.r * (ctx.K1 + ctx.K) * d ** (-ctx.m)

    def solve(self) -> Tuple[float, float]:
        lo = max(self.delta, self.alpha_bar)
        alpha = find_root_bracketed(self.equation, lo, 2.0 * lo, "open_switch_in",
                                    expand="up", breakpoints=self.ctx.steps)
        return self.delta, alpha


# ==================== CASE II.3 ====================

class OpenPocketSystem:
    """
    Open mode: abandon below delta, produce on (delta, gamma), switch out on
    [gamma, beta], produce above beta. (beta, alpha) come from the band system.
    """

    def __init__(self, ctx: ProblemContext):
        _require(ctx.K < ctx.K0, "open pocket needs K < K0")
        self.ctx = ctx
        self.beta, self.alpha = SwitchingSystem(ctx).solve()
        self.rK0 = ctx.r * ctx.K0
        self.gap = ctx.r * (ctx.K - ctx.K0)
        self.tail = ctx.n * ctx.inn(self.beta, INF, self.rK0)

    def F1(self, delta: float, gamma: float) -> float:
        return self.ctx.m * self.ctx.im(delta, gamma, self.rK0) + self.gap * delta ** (-self.ctx.m)

    def F2(self, delta: float, gamma: float) -> float:
        return self.ctx.n * self.ctx.inn(delta, gamma, self.rK0) + self.gap * delta ** (-self.ctx.n) + self.tail

    def ell(self, gamma: float) -> float:
        """delta in (0, gamma) solving F1 = 0; F1 decreases in delta"""
        return find_root_bracketed(lambda d: self.F1(d, gamma), gamma / 2.0, gamma, "open_pocket_m",
                                   expand="down", breakpoints=self.ctx.steps)

    def solve(self) -> Tuple[float, float, float, float]:
        gamma = find_root_bracketed(lambda g: self.F2(self.ell(g), g), self.beta / 2.0, self.beta,
                                    "open_pocket_n", expand="down", breakpoints=self.ctx.steps)
        return self.ell(gamma), gamma, self.beta, self.alpha


# ==================== CASE III.1 ====================

class ClosedWaitingSystem:
    """
    Open mode abandons below delta_dagger; closed mode abandons below zeta,
    waits on (zeta, alpha) and switches in above alpha
    """

    def __init__(self, ctx: ProblemContext):
        _require(ctx.K < 0, "closed waiting band needs K < 0")
        self.ctx = ctx
        self.delta = open_abandon_threshold(ctx)
        _require(self.delta is not None, "closed waiting band needs h(0) + rK < 0")
        self.rK, self.rK1 = ctx.r * ctx.K, ctx.r * ctx.K1
        self.alpha_bar = ctx.level(-self.rK1)
        alpha_tilde = ctx.level(self.rK - self.rK1)
        self.alpha_hat = find_root_bracketed(self.diagonal, self.delta, max(alpha_tilde, self.delta),
                                             "closed_waiting_diagonal", expand="up", breakpoints=ctx.steps)

    def diagonal(self, alpha: float) -> float:
        """G2 with zeta = alpha; negative at delta_dagger, then positive"""
        n = self.ctx.n
        return n * self.ctx.inn(alpha, INF, self.rK) - self.rK1 * alpha ** (-n)

    def G1(self, zeta: float, alpha: float) -> float:
        ctx, d = self.ctx, self.delta
        return (ctx.m * ctx.im(d, alpha, -self.rK1) + ctx.r * (ctx.K1 + ctx.K) * d ** (-ctx.m)
                - self.rK * zeta ** (-ctx.m))

    def G2(self, zeta: float, alpha: float) -> float:
        """N-side pasting at zeta and alpha, integrated over [alpha, inf)"""
        return self.ctx.n * self.ctx.inn(alpha, INF, -self.rK1) + self.rK * zeta ** (-self.ctx.n)

    def ell(self, alpha: float) -> float:
        """zeta solving G2 = 0; G2 is increasing in zeta so the root is a single power equation"""
        c = self.ctx.n * self.ctx.inn(alpha, INF, -self.rK1)
        if c <= 0:
            return alpha
        return (-c / self.rK) ** (-1.0 / self.ctx.n)

    def solve(self) -> Tuple[float, float, float]:
        lo = max(self.alpha_hat, self.alpha_bar)
        alpha = find_root_bracketed(lambda a: self.G1(self.ell(a), a), lo, 2.0 * lo, "closed_waiting_m",
                                    expand="up", breakpoints=self.ctx.steps)
        return self.ell(alpha), self.delta, alpha


# ==================== CASE III.2 ====================

class ClosedPocketSystem:
    """
    Both pockets: open mode abandons below delta, produces on (delta, gamma),
    switches out on [gamma, beta]; closed mode abandons below zeta
    """

    def __init__(self, ctx: ProblemContext):
        _require(ctx.K < 0, "closed pocket needs K < 0")
        self.ctx = ctx
        self.beta, self.alpha = SwitchingSystem(ctx).solve()
        self.rK, self.rK0 = ctx.r * ctx.K, ctx.r * ctx.K0
        n = ctx.n
        tail = n * ctx.inn(self.beta, INF, self.rK0)
        _require(tail > 0, "closed pocket needs a positive switch-in tail integral")
        self.zeta = (-tail / self.rK) ** (-1.0 / n)
        self.gamma_hat = (tail / (ctx.r * (ctx.K0 - ctx.K))) ** (-1.0 / n)

    def G3(self, delta: float, gamma: float) -> float:
        n = self.ctx.n
        return n * self.ctx.inn(delta, INF, self.rK) - n * self.ctx.inn(gamma, self.beta, self.rK0)

    def G5(self, delta: float, gamma: float) -> float:
        m = self.ctx.m
        return (m * self.ctx.im(0.0, gamma, self.rK0) - m * self.ctx.im(0.0, delta, self.rK)
                - self.rK * self.zeta ** (-m))

    def ell(self, gamma: float) -> float:
        """delta in (0, gamma) solving G3 = 0; equals gamma at gamma_hat"""
        if gamma <= self.gamma_hat:
            return gamma
        return find_root_bracketed(lambda d: self.G3(d, gamma), gamma / 2.0, gamma, "closed_pocket_n",
                                   expand="down", breakpoints=self.ctx.steps)

    def solve(self) -> Tuple[float, float, float, float, float]:
        gamma = find_root_bracketed(lambda g: self.G5(self.ell(g), g), self.gamma_hat, self.beta,
                                    "closed_pocket_m", breakpoints=self.ctx.steps)
        return self.zeta, self.ell(gamma), gamma, self.beta, self.alpha


# ==================== PUBLIC SOLVERS ====================

def _delta_coefficients(ctx: ProblemContext, zeta: float) -> Tuple[float, float]:
    """Power-pair coefficients pasting C1 onto the constant -K at zeta"""
    rK = ctx.r * ctx.K
    return (rK * zeta ** (-ctx.m) / (ctx.m * ctx.spread),
            -rK * zeta ** (-ctx.n) / (ctx.n * ctx.spread))


def _check_consistent(case: CaseId, name: str, first: float, second: float, scale: float):
    """
    Two closed forms of one coefficient must agree to CONSISTENCY_TOL

    scale is the summed magnitude of the terms behind the two forms.
    """
    bound = CONSISTENCY_TOL * max(abs(first), abs(second), scale)
    if abs(first - second) > bound:
        raise InconsistentSolution(f"{case.value}: the two closed forms of {name} disagree: "
                                   f"{first:.12g} vs {second:.12g}")


def _switch_in_side(ctx: ProblemContext, alpha: float) -> Tuple[float, float, float, float]:
    """
    Power-pair coefficients pasting C1 onto R_h - K1 at alpha, before adding A

    Returns (Delta1 - A, its term scale, Delta2, its term scale).
    """
    rK1 = ctx.r * ctx.K1
    return (ctx.im(0.0, alpha, -rK1) / ctx.spread, ctx.im_scale(0.0, alpha, -rK1) / ctx.spread,
            ctx.inn(alpha, INF, -rK1) / ctx.spread, ctx.inn_scale(alpha, INF, -rK1) / ctx.spread)


def solve_case_I1(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    """Always open: no boundaries, no coefficients"""
    ctx = ProblemContext(data)
    _require(ctx.h0 >= ctx.r * ctx.K1 - ctx.r * min(ctx.K, 0.0), "case I1 needs h(0) >= rK1 (- rK when K < 0)")
    return FreeBoundaries(), Coefficients()


def solve_case_I2(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    alpha = SwitchInSystem(ctx).solve()
    B = ctx.inn(alpha, INF, -ctx.r * ctx.K1) / ctx.spread
    return FreeBoundaries(alpha=alpha), Coefficients(B=B)


def solve_case_I3(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    zeta, alpha = ClosedAbandonSystem(ctx).solve()
    delta1, delta2 = _delta_coefficients(ctx, zeta)
    d1, d1_scale, d2, d2_scale = _switch_in_side(ctx, alpha)
    _check_consistent(CaseId.I3, "Delta1", delta1, d1, d1_scale)
    _check_consistent(CaseId.I3, "Delta2", delta2, d2, d2_scale)
    return FreeBoundaries(zeta=zeta, alpha=alpha), Coefficients(Delta1=delta1, Delta2=delta2)


def solve_case_II1(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    beta, alpha = SwitchingSystem(ctx).solve()
    A = -ctx.im(0.0, beta, ctx.r * ctx.K0) / ctx.spread
    B = ctx.inn(alpha, INF, -ctx.r * ctx.K1) / ctx.spread
    return FreeBoundaries(beta=beta, alpha=alpha), Coefficients(A=A, B=B)


def solve_case_II2(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    delta, alpha = OpenAbandonSystem(ctx).solve()
    A = -ctx.im(0.0, delta, ctx.r * ctx.K) / ctx.spread
    B = ctx.inn(alpha, INF, -ctx.r * ctx.K1) / ctx.spread
    return FreeBoundaries(delta=delta, alpha=alpha), Coefficients(A=A, B=B)


def solve_case_II3(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    delta, gamma, beta, alpha = OpenPocketSystem(ctx).solve()
    rK0 = ctx.r * ctx.K0
    coefficients = Coefficients(
        A=-ctx.im(0.0, beta, rK0) / ctx.spread,
        B=ctx.inn(alpha, INF, -ctx.r * ctx.K1) / ctx.spread,
        Gamma1=-ctx.im(0.0, gamma, rK0) / ctx.spread,
        Gamma2=-ctx.inn(gamma, beta, rK0) / ctx.spread,
    )
    return FreeBoundaries(delta=delta, gamma=gamma, beta=beta, alpha=alpha), coefficients


def solve_case_III1(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    zeta, delta, alpha = ClosedWaitingSystem(ctx).solve()
    delta1, delta2 = _delta_coefficients(ctx, zeta)
    A = -ctx.im(0.0, delta, ctx.r * ctx.K) / ctx.spread
    d1, d1_scale, d2, d2_scale = _switch_in_side(ctx, alpha)
    A_scale = ctx.im_scale(0.0, delta, ctx.r * ctx.K) / ctx.spread
    _check_consistent(CaseId.III1, "Delta1", delta1, A + d1, A_scale + d1_scale)
    _check_consistent(CaseId.III1, "Delta2", delta2, d2, d2_scale)
    return (FreeBoundaries(zeta=zeta, delta=delta, alpha=alpha),
            Coefficients(A=A, Delta1=delta1, Delta2=delta2))


def solve_case_III2(data: ProblemData) -> Tuple[FreeBoundaries, Coefficients]:
    ctx = ProblemContext(data)
    zeta, delta, gamma, beta, alpha = ClosedPocketSystem(ctx).solve()
    rK = ctx.r * ctx.K
    delta1, delta2 = _delta_coefficients(ctx, zeta)
    d1, d1_scale, d2, d2_scale = _switch_in_side(ctx, alpha)
    rK0 = ctx.r * ctx.K0
    A = delta1 - d1
    _check_consistent(CaseId.III2, "Delta2", delta2, d2, d2_scale)
    _check_consistent(CaseId.III2, "A", A, delta1 - ctx.im(0.0, beta, rK0) / ctx.spread,
                      abs(delta1) + d1_scale + ctx.im_scale(0.0, beta, rK0) / ctx.spread)
    coefficients = Coefficients(
        A=A,
        Gamma1=-ctx.im(0.0, delta, rK) / ctx.spread,
        Gamma2=-ctx.inn(delta, INF, rK) / ctx.spread,
        Delta1=delta1,
        Delta2=delta2,
    )
    return FreeBoundaries(zeta=zeta, delta=delta, gamma=gamma, beta=beta, alpha=alpha), coefficients


_SOLVERS = {
    CaseId.I1: solve_case_I1,
    CaseId.I2: solve_case_I2,
    CaseId.I3: solve_case_I3,
    CaseId.II1: solve_case_II1,
    CaseId.II2: solve_case_II2,
    CaseId.II3: solve_case_II3,
    CaseId.III1: solve_case_III1,
    CaseId.III2: solve_case_III2,
}


def solve_case(data: ProblemData, case: CaseId) -> Tuple[FreeBoundaries, Coefficients]:
    """Dispatch to the case's solver"""
    boundaries, coefficients = _SOLVERS[case](data)
    logger.info(f"[SOLVER] {case.value}: boundaries={boundaries.to_dict()}")
    return boundaries, coefficients


# ==================== RESIDUALS ====================

def _terms(*pairs: Tuple[float, float]) -> Residual:
    """Residual from (value, magnitude) pairs of additive terms"""
    return Residual(math.fsum(v for v, _ in pairs), math.fsum(abs(s) for _, s in pairs))


def _power(value: float) -> Tuple[float, float]:
    return value, value


def system_residuals(data: ProblemData, case: CaseId, fb: FreeBoundaries) -> Dict[str, Residual]:
    """
    Evaluate the case's defining equations at the given boundaries

    Each entry is (value, scale) with scale the summed magnitude of the
    equation's additive terms, integrals counted antiderivative by antiderivative.
    """
    ctx = ProblemContext(data)
    m, n, r = ctx.m, ctx.n, ctx.r
    rK, rK0, rK1 = r * ctx.K, r * ctx.K0, r * ctx.K1

    def im(lo, hi, shift, factor=1.0):
        return factor * ctx.im(lo, hi, shift), factor * ctx.im_scale(lo, hi, shift)

    def inn(lo, hi, shift, factor=1.0):
        return factor * ctx.inn(lo, hi, shift), factor * ctx.inn_scale(lo, hi, shift)

    def band(beta, alpha):
        return {
            "switching_m": _terms(im(beta, alpha, 0.0, m), _power(rK0 * beta ** (-m)), _power(rK1 * alpha ** (-m))),
            "switching_n": _terms(inn(beta, alpha, 0.0, n), _power(rK0 * beta ** (-n)), _power(rK1 * alpha ** (-n))),
        }

    def open_abandon(delta):
        return _terms(inn(delta, INF, rK))

    if case == CaseId.I1:
        return {}
    if case == CaseId.I2:
        return {"switch_in": _terms(im(0.0, fb.alpha, -rK1))}
    if case == CaseId.I3:
        z, a = fb.zeta, fb.alpha
        return {
            "closed_abandon_m": _terms(im(0.0, a, -rK1, m), _power(-rK * z ** (-m))),
            "closed_abandon_n": _terms(inn(a, INF, -rK1, n), _power(rK * z ** (-n))),
        }
    if case == CaseId.II1:
        return band(fb.beta, fb.alpha)
    if case == CaseId.II2:
        d, a = fb.delta, fb.alpha
        return {
            "open_abandon": open_abandon(d),
            "open_switch_in": _terms(im(d, a, -rK1, m), _power(r * (ctx.K1 + ctx.K) * d ** (-m))),
        }
    if case == CaseId.II3:
        d, g, b = fb.delta, fb.gamma, fb.beta
        residuals = band(b, fb.alpha)
        residuals["open_pocket_m"] = _terms(im(d, g, rK0, m), _power(r * (ctx.K - ctx.K0) * d ** (-m)))
        residuals["open_pocket_n"] = _terms(inn(d, g, rK0, n), _power(r * (ctx.K - ctx.K0) * d ** (-n)),
                                            inn(b, INF, rK0, n))
        return residuals
    if case == CaseId.III1:
        z, d, a = fb.zeta, fb.delta, fb.alpha
        return {
            "open_abandon": open_abandon(d),
            "closed_waiting_m": _terms(im(d, a, -rK1, m), _power(r * (ctx.K1 + ctx.K) * d ** (-m)),
                                       _power(-rK * z ** (-m))),
            "closed_waiting_n": _terms(inn(a, INF, -rK1, n), _power(rK * z ** (-n))),
        }
    if case == CaseId.III2:
        z, d, g, b, a = fb.zeta, fb.delta, fb.gamma, fb.beta, fb.alpha
        residuals = band(b, a)
        residuals["closed_pocket_n"] = _terms(inn(d, INF, rK, n), inn(g, b, rK0, -n))
        residuals["closed_abandon"] = _terms(inn(a, INF, -rK1, n), _power(rK * z ** (-n)))
        residuals["closed_pocket_m"] = _terms(im(0.0, g, rK0, m), im(0.0, d, rK, -m), _power(-rK * z ** (-m)))
        return residuals
    raise ValueError(f"unknown case {case}")
