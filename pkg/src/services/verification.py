"""
Switching Options - Verification
================================
Evidence that an assembled solution solves the control problem:
- HJB quasi-variational inequalities clause by clause on a grid
- C1 pasting audit at every piece junction
- defining-equation residuals of the free-boundary system
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.data.solution import Solution
from src.services.boundaries import system_residuals
from src.services.model import payoff_eval
from src.services.value_function import evaluate, evaluate_piece
from src.utils.constants import DEFAULT_GRID_POINTS, HJB_CLAUSES, HJB_TOL, PASTING_TOL, RESIDUAL_TOL
from src.utils.helpers import GridSpec, nudge_off

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HjbReport:
    """Per-clause maxima over the grid; a clause is satisfied when <= tol"""

    grid: np.ndarray = field(repr=False)
    clause_max: Dict[str, float]
    # Worst (most negative) value over the grid of the pointwise max of clauses, relative to tol
    min_active: float
    # Worst clause value relative to tol; <= 1 passes
    max_violation: float
    passed: bool

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "grid_points": int(self.grid.size),
            "x_min": float(self.grid.min()),
            "x_max": float(self.grid.max()),
            "clause_max": self.clause_max,
            "min_active": self.min_active,
            "max_violation": self.max_violation,
        }


@dataclass(frozen=True)
class PastingGap:
    mode: int
    boundary: str
    point: float
    value_gap: float
    slope_gap: float
    passed: bool

    def to_dict(self) -> Dict:
        return {"mode": self.mode, "boundary": self.boundary, "point": self.point,
                "value_gap": self.value_gap, "slope_gap": self.slope_gap, "passed": self.passed}


@dataclass(frozen=True)
class C1Report:
    gaps: Tuple[PastingGap, ...]

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gaps)

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "gaps": [g.to_dict() for g in self.gaps]}


# ==================== HJB ====================

def default_grid(sol: Solution, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Log grid over [min landmark / 10, max landmark * 10], nudged off breakpoints"""
    landmarks = set(sol.breakpoints) | {1.0}
    spec = GridSpec(min(landmarks) / 10.0, max(landmarks) * 10.0, points, log_spaced=True)
    return nudge_off(spec.values(), sol.breakpoints)


def _grid(sol: Solution, grid) -> np.ndarray:
    if grid is None:
        return default_grid(sol)
    values = grid.values() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)
    return nudge_off(values, sol.breakpoints)


def _clauses(sol: Solution, xs: np.ndarray) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """Six clause values at each point, plus the per-point tolerance scale"""
    market, costs = sol.data.market, sol.data.costs
    h = payoff_eval(sol.data.payoff, xs)

    def generator(z: int) -> Tuple[np.ndarray, np.ndarray]:
        w, dw, d2w = (evaluate(sol, z, xs, k) for k in (0, 1, 2))
        return market.sigma2 * xs ** 2 * d2w + market.b * xs * dw - market.r * w, w

    open_gen, w1 = generator(1)
    closed_gen, w0 = generator(0)
    clauses = {
        "open_generator": open_gen + h,
        "open_switch_out": w0 - costs.K0 - w1,
        "open_abandon": -costs.K - w1,
        "closed_generator": closed_gen + sol.data.closed_rate,
        "closed_switch_in": w1 - costs.K1 - w0,
        "closed_abandon": -costs.K - w0,
    }
    scale = HJB_TOL * (1.0 + np.maximum(np.abs(w1), np.abs(w0)) + np.abs(h))
    return clauses, scale


def hjb_residual_rows(sol: Solution, grid=None) -> List[Tuple[float, ...]]:
    """(x, six clause values) per grid point"""
    xs = _grid(sol, grid)
    clauses, _ = _clauses(sol, xs)
    return [(float(x),) + tuple(float(clauses[name][i]) for name in HJB_CLAUSES) for i, x in enumerate(xs)]


def check_hjb(sol: Solution, grid: Optional[GridSpec] = None) -> HjbReport:
    """
    Evaluate the coupled inequalities of both modes on a grid

    Every clause must be <= tol and, at each point, the largest clause of each
    mode must be >= -tol, with tol = 1e-8 (1 + |w| + |h|).
    """
    xs = _grid(sol, grid)
    clauses, scale = _clauses(sol, xs)
    relative = {name: values / scale for name, values in clauses.items()}
    max_violation = max(float(np.max(v)) for v in relative.values())
    open_active = np.maximum.reduce([relative[name] for name in HJB_CLAUSES[:3]])
    closed_active = np.maximum.reduce([relative[name] for name in HJB_CLAUSES[3:]])
    min_active = float(min(np.min(open_active), np.min(closed_active)))
    passed = max_violation <= 1.0 and min_active >= -1.0
    report = HjbReport(xs, {name: float(np.max(v)) for name, v in clauses.items()},
                       min_active, max_violation, passed)
    if passed:
        logger.info(f"[VERIFY] HJB passed on {xs.size} points ({sol.case.value})")
    else:
        logger.warning(f"[VERIFY] HJB failed ({sol.case.value}): max violation {max_violation:.3g} tol, "
                       f"min active {min_active:.3g} tol")
    return report


# ==================== PASTING ====================

def _boundary_name(sol: Solution, point: float) -> str:
    for name, value in sol.boundaries.to_dict().items():
        if value == point:
            return name
    return "step"


def check_c1(sol: Solution, tol: float = PASTING_TOL) -> C1Report:
    """Value and slope gaps between adjoining closed-form pieces of w1 and w0"""
    gaps: List[PastingGap] = []
    for z in (1, 0):
        pieces = sol.pieces(z)
        for left, right in zip(pieces, pieces[1:]):
            p = left.interval.hi
            value_left, value_right = (float(evaluate_piece(sol, piece, p, 0)) for piece in (left, right))
            slope_left, slope_right = (float(evaluate_piece(sol, piece, p, 1)) for piece in (left, right))
            value_gap = abs(value_left - value_right)
            slope_gap = abs(slope_left - slope_right)
            bound = tol * (1.0 + abs(value_left))
            # x w'(x) carries the units of w, hence the 1/p
            slope_bound = tol * max(abs(slope_left), abs(slope_right)) + bound / p
            gaps.append(PastingGap(z, _boundary_name(sol, p), p, value_gap, slope_gap,
                                   value_gap <= bound and slope_gap <= slope_bound))
    report = C1Report(tuple(gaps))
    if not report.passed:
        logger.warning(f"[VERIFY] C1 pasting failed ({sol.case.value}): "
                       f"{[g.to_dict() for g in gaps if not g.passed]}")
    return report


# ==================== RESIDUALS ====================

def residual_report(sol: Solution, tol: float = RESIDUAL_TOL) -> Dict:
    """Relative residual of each defining equation; passes when all are <= tol"""
    residuals = system_residuals(sol.data, sol.case, sol.boundaries)
    relative = {name: res.relative for name, res in residuals.items()}
    return {"passed": all(v <= tol for v in relative.values()), "relative": relative}


def monotone_violations(sol: Solution, grid: Sequence[float]) -> Dict[str, int]:
    """Number of grid steps on which w1 or w0 decreases beyond rounding"""
    xs = np.asarray(grid, dtype=float)
    counts = {}
    for z, name in ((1, "w1"), (0, "w0")):
        w = evaluate(sol, z, xs)
        slack = 1e-12 * (1.0 + np.abs(w[:-1]))
        counts[name] = int(np.sum(np.diff(w) < -slack))
    return counts
