"""
Switching Options - Value Functions
===================================
Assembles the piecewise closed-form value functions of a solved case,
evaluates them (values and first two derivatives) and reads off the
optimal action from the region map.
"""

import logging
import math
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.data.problem import ProblemData
from src.data.results import CaseId, Coefficients, FreeBoundaries, Thresholds
from src.data.solution import Interval, Piece, PieceKind, RegionMap, Solution
from src.services.boundaries import solve_case
from src.services.classifier import classify
from src.services.model import power_derivative, resolvent_direct
from src.utils.constants import (
    CLOSED_REGIONS,
    OPEN_REGIONS,
    REGION_ABANDON_CLOSED,
    REGION_ABANDON_OPEN,
    REGION_PRODUCTION,
    REGION_SWITCH_IN,
    REGION_SWITCH_OUT,
    REGION_WAITING,
)
from src.utils.errors import InvalidPerturbation, UndefinedSecondDerivative

logger = logging.getLogger(__name__)

INF = math.inf

Layout = List[Tuple[Interval, str]]


class Action(str, Enum):
    CONTINUE = "continue"
    SWITCH_TO_OPEN = "switch_to_open"
    SWITCH_TO_CLOSED = "switch_to_closed"
    ABANDON = "abandon"


# ==================== REGIONS ====================

def _check_ordering(case: CaseId, fb: FreeBoundaries):
    chain = [p for p in (fb.delta, fb.gamma, fb.beta, fb.alpha) if p is not None]
    if any(p <= 0 for p in chain) or (fb.zeta is not None and fb.zeta <= 0):
        raise InvalidPerturbation(f"{case.value}: boundaries must be positive, got {fb.to_dict()}")
    if any(a >= b for a, b in zip(chain, chain[1:])):
        raise InvalidPerturbation(f"{case.value}: need delta < gamma < beta < alpha, got {fb.to_dict()}")
    if fb.zeta is not None:
        if fb.alpha is not None and fb.zeta >= fb.alpha:
            raise InvalidPerturbation(f"{case.value}: need zeta < alpha, got {fb.to_dict()}")
        if fb.gamma is not None and fb.zeta >= fb.gamma:
            raise InvalidPerturbation(f"{case.value}: need zeta < gamma, got {fb.to_dict()}")
        # III1 allows zeta on either side of delta_dagger; the closed pocket does not
        if case == CaseId.III2 and fb.zeta >= fb.delta:
            raise InvalidPerturbation(f"{case.value}: need zeta < delta, got {fb.to_dict()}")


def _open_layout(case: CaseId, fb: FreeBoundaries) -> Layout:
    if case in (CaseId.I1, CaseId.I2, CaseId.I3):
        return [(Interval(0.0, INF), REGION_PRODUCTION)]
    if case == CaseId.II1:
        return [(Interval(0.0, fb.beta, hi_closed=True), REGION_SWITCH_OUT),
                (Interval(fb.beta, INF), REGION_PRODUCTION)]
    if case in (CaseId.II2, CaseId.III1):
        return [(Interval(0.0, fb.delta, hi_closed=True), REGION_ABANDON_OPEN),
                (Interval(fb.delta, INF), REGION_PRODUCTION)]
    return [(Interval(0.0, fb.delta, hi_closed=True), REGION_ABANDON_OPEN),
            (Interval(fb.delta, fb.gamma), REGION_PRODUCTION),
            (Interval(fb.gamma, fb.beta, True, True), REGION_SWITCH_OUT),
            (Interval(fb.beta, INF), REGION_PRODUCTION)]


def _closed_layout(case: CaseId, fb: FreeBoundaries) -> Layout:
    if case == CaseId.I1:
        return [(Interval(0.0, INF), REGION_SWITCH_IN)]
    switch_in = (Interval(fb.alpha, INF, lo_closed=True), REGION_SWITCH_IN)
    if case in (CaseId.I3, CaseId.III1, CaseId.III2):
        return [(Interval(0.0, fb.zeta, hi_closed=True), REGION_ABANDON_CLOSED),
                (Interval(fb.zeta, fb.alpha), REGION_WAITING),
                switch_in]
    return [(Interval(0.0, fb.alpha), REGION_WAITING), switch_in]


def build_regions(case: CaseId, fb: FreeBoundaries) -> RegionMap:
    """Region map of the case's threshold policy for an arbitrary (ordered) boundary set"""
    _check_ordering(case, fb)
    grouped: Dict[str, List[Interval]] = {name: [] for name in OPEN_REGIONS + CLOSED_REGIONS}
    for interval, region in _open_layout(case, fb) + _closed_layout(case, fb):
        grouped[region].append(interval)
    return RegionMap(**{name: tuple(intervals) for name, intervals in grouped.items()})


# ==================== ASSEMBLY ====================

def _forms(case: CaseId, cf: Coefficients, costs) -> Tuple[list, list]:
    """(kind, a, b, offset) per layout interval, before the closed-rate shift"""
    K1, K0, K = costs.K1, costs.K0, costs.K
    constant = (PieceKind.CONSTANT, 0.0, 0.0, -K)
    resolvent = (PieceKind.RESOLVENT_PLUS, 0.0, 0.0, 0.0)
    if case == CaseId.I1:
        return [resolvent], [(PieceKind.RESOLVENT_PLUS, 0.0, 0.0, -K1)]
    if case == CaseId.I2:
        return [resolvent], [(PieceKind.POWER_PAIR, 0.0, cf.B, 0.0),
                             (PieceKind.RESOLVENT_PLUS, 0.0, 0.0, -K1)]
    if case == CaseId.I3:
        return [resolvent], [constant,
                             (PieceKind.POWER_PAIR, cf.Delta1, cf.Delta2, 0.0),
                             (PieceKind.RESOLVENT_PLUS, 0.0, 0.0, -K1)]

    producing = (PieceKind.RESOLVENT_PLUS, cf.A, 0.0, 0.0)
    closed_band = [(PieceKind.POWER_PAIR, 0.0, cf.B, 0.0), (PieceKind.RESOLVENT_PLUS, cf.A, 0.0, -K1)]
    closed_pocket = [constant,
                     (PieceKind.POWER_PAIR, cf.Delta1, cf.Delta2, 0.0),
                     (PieceKind.RESOLVENT_PLUS, cf.A, 0.0, -K1)]
    if case == CaseId.II1:
        return [(PieceKind.POWER_PAIR, 0.0, cf.B, -K0), producing], closed_band
    if case == CaseId.II2:
        return [constant, producing], closed_band
    if case == CaseId.II3:
        return [constant,
                (PieceKind.RESOLVENT_PLUS, cf.Gamma1, cf.Gamma2, 0.0),
                (PieceKind.POWER_PAIR, 0.0, cf.B, -K0),
                producing], closed_band
    if case == CaseId.III1:
        return [constant, producing], closed_pocket
    return [constant,
            (PieceKind.RESOLVENT_PLUS, cf.Gamma1, cf.Gamma2, 0.0),
            (PieceKind.POWER_PAIR, cf.Delta1, cf.Delta2, -K0),
            producing], closed_pocket


def _pieces(layout: Layout, forms: list, shift: float) -> Tuple[Piece, ...]:
    return tuple(Piece(interval, kind, region, a, b, offset + shift)
                 for (interval, region), (kind, a, b, offset) in zip(layout, forms))


def assemble_solution(data: ProblemData, case: CaseId, fb: FreeBoundaries,
                      coefficients: Coefficients, thresholds: Thresholds = Thresholds()) -> Solution:
    """Attach the case's closed forms to its layout; values include the closed_rate / r shift"""
    reduced = data.reduced()
    shift = data.closed_rate / data.market.r
    open_forms, closed_forms = _forms(case, coefficients, reduced.costs)
    w1 = _pieces(_open_layout(case, fb), open_forms, shift)
    w0 = _pieces(_closed_layout(case, fb), closed_forms, shift)
    breakpoints = tuple(sorted(set(fb.points()) | set(reduced.payoff.step_locations)))
    return Solution(data, reduced, case, thresholds, fb, coefficients, w1, w0,
                    build_regions(case, fb), shift, breakpoints)


def build_solution(data: ProblemData) -> Solution:
    """Classify, solve the free-boundary system and assemble both value functions"""
    case, thresholds = classify(data)
    boundaries, coefficients = solve_case(data, case)
    return assemble_solution(data, case, boundaries, coefficients, thresholds)


# ==================== EVALUATION ====================

def evaluate_piece(sol: Solution, piece: Piece, x, order: int = 0) -> np.ndarray:
    """Closed-form value (or derivative) of one piece, ignoring its interval"""
    xs = np.asarray(x, dtype=float)
    roots = sol.reduced.roots
    total = np.zeros(xs.shape)
    if piece.kind != PieceKind.CONSTANT:
        total = total + piece.a * power_derivative(xs, roots.m, order) \
            + piece.b * power_derivative(xs, roots.n, order)
    if piece.has_resolvent:
        total = total + resolvent_direct(roots, sol.reduced.market, sol.reduced.payoff, xs, order)
    if order == 0:
        total = total + piece.offset
    return total


def evaluate(sol: Solution, z: int, x, order: int = 0, side: Optional[str] = None):
    """
    w_z(x) or its derivative of the given order, vectorised over x

    Args:
        sol: Solved instance
        z: Mode (1 open, 0 closed)
        x: Positive point(s)
        order: 0, 1 or 2
        side: "left" or "right" to evaluate the piece adjoining x from that side

    Returns:
        float for scalar x, numpy array otherwise
    """
    if order not in (0, 1, 2):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("value functions are defined on x > 0")
    if order == 2 and side is None and np.any(np.isin(xs, sol.breakpoints)):
        raise UndefinedSecondDerivative(f"second derivative undefined at breakpoints {sol.breakpoints}")
    out = np.full(xs.shape, np.nan)
    for piece in sol.pieces(z):
        mask = piece.interval.contains(xs) if side is None else piece.interval.contains_from(xs, side)
        mask = np.logical_and(mask, np.isnan(out))
        if np.any(mask):
            out[mask] = evaluate_piece(sol, piece, xs[mask], order)
    return float(out) if out.ndim == 0 else out


def optimal_action(sol: Solution, z: int, x: float) -> Action:
    region = sol.regions.label(z, x)
    if region in (REGION_ABANDON_OPEN, REGION_ABANDON_CLOSED):
        return Action.ABANDON
    if region == REGION_SWITCH_OUT:
        return Action.SWITCH_TO_CLOSED
    if region == REGION_SWITCH_IN:
        return Action.SWITCH_TO_OPEN
    return Action.CONTINUE


def sample_rows(sol: Solution, grid: Sequence[float]) -> List[Tuple]:
    """Rows of (x, w1, w0, w1', w0', region1, region0) for the CSV sampler"""
    xs = np.asarray(grid, dtype=float)
    columns = (evaluate(sol, 1, xs), evaluate(sol, 0, xs), evaluate(sol, 1, xs, 1), evaluate(sol, 0, xs, 1))
    return [(float(x), float(w1), float(w0), float(d1), float(d0), sol.regions.label(1, x), sol.regions.label(0, x))
            for x, w1, w0, d1, d0 in zip(xs, *columns)]


def describe(sol: Solution) -> Dict:
    """Solve output: the solution document plus the pieces of both value functions"""
    doc = sol.to_dict()
    doc["w1"] = [p.to_dict() for p in sol.w1]
    doc["w0"] = [p.to_dict() for p in sol.w0]
    if sol.value_shift:
        doc["value_shift"] = sol.value_shift
    return doc
