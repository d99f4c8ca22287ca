"""
Switching Options - Command Handlers
====================================
One async handler per CLI command, registered on a router.
Numerical work runs in the default executor so file I/O stays async.
"""

import asyncio
import logging
from functools import partial
from typing import Any, Awaitable, Callable, Dict

from src.data.problem import ProblemData
from src.data.results import Coefficients, FreeBoundaries
from src.data.solution import RegionMap, Solution
from src.handlers.cli import RunConfig
from src.services import storage
from src.services.classifier import classify
from src.services.simulation import McConfig, simulate_perturbed
from src.services.value_function import build_solution, describe, evaluate, sample_rows
from src.services.verification import check_c1, check_hjb, default_grid, hjb_residual_rows, residual_report
from src.utils.constants import RESIDUAL_CSV_HEADER, SAMPLE_CSV_HEADER

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig], Awaitable[None]]


class CommandRouter:
    """Maps command names to handlers"""

    def __init__(self):
        self._handlers: Dict[str, Handler] = {}

    def command(self, name: str) -> Callable[[Handler], Handler]:
        def register(handler: Handler) -> Handler:
            self._handlers[name] = handler
            return handler
        return register

    async def dispatch(self, cfg: RunConfig):
        handler = self._handlers.get(cfg.command)
        if handler is None:
            raise ValueError(f"no handler for command '{cfg.command}'")
        logger.info(f"[CLI] {cfg.command} {cfg.input}")
        await handler(cfg)


router = CommandRouter()


async def _offload(fn: Callable, *args, **kwargs) -> Any:
    loop = asyncio.get_running_loop()
    return await loop.run_in_executor(None, partial(fn, *args, **kwargs))


def _problem_of(doc: Dict) -> ProblemData:
    """A problem document, or the problem embedded in a solve output"""
    return ProblemData.from_dict(doc.get("problem", doc))


async def _load_solution(cfg: RunConfig) -> Solution:
    doc = await storage.read_json(cfg.input)
    return await _offload(build_solution, _problem_of(doc))


@router.command("classify")
async def classify_command(cfg: RunConfig):
    doc = await storage.read_json(cfg.input)
    case, thresholds = await _offload(classify, _problem_of(doc))
    out = {"case": case.value}
    if thresholds.to_dict():
        out["thresholds"] = thresholds.to_dict()
    await storage.write_json(cfg.output, out)


@router.command("solve")
async def solve_command(cfg: RunConfig):
    sol = await _load_solution(cfg)
    await storage.write_json(cfg.output, describe(sol))


@router.command("sample")
async def sample_command(cfg: RunConfig):
    sol = await _load_solution(cfg)
    grid = cfg.grid.values() if cfg.grid else default_grid(sol, points=100)
    rows = await _offload(sample_rows, sol, grid)
    await storage.write_csv(cfg.output, SAMPLE_CSV_HEADER, rows)


def _verify(sol: Solution, stored: Dict, cfg: RunConfig) -> Dict:
    residuals = residual_report(sol)
    c1 = check_c1(sol)
    hjb = check_hjb(sol, cfg.grid)
    report = {
        "case": sol.case.value,
        "boundaries": sol.boundaries.to_dict(),
        "residuals": residuals,
        "c1": c1.to_dict(),
        "hjb": hjb.to_dict(),
    }
    passed = residuals["passed"] and c1.passed and hjb.passed
    if "boundaries" in stored:
        reproduced = (stored.get("case") == sol.case.value
                      and FreeBoundaries.from_dict(stored["boundaries"]) == sol.boundaries
                      and Coefficients.from_dict(stored.get("coefficients", {})) == sol.coefficients
                      and RegionMap.from_dict(stored.get("regions", {})) == sol.regions)
        report["round_trip"] = reproduced
        passed = passed and reproduced
    report["passed"] = passed
    return report


@router.command("verify")
async def verify_command(cfg: RunConfig):
    doc = await storage.read_json(cfg.input)
    sol = await _offload(build_solution, _problem_of(doc))
    report = await _offload(_verify, sol, doc, cfg)
    if not report["passed"]:
        logger.warning(f"[VERIFY] {sol.case.value}: verification FAILED")
    await storage.write_json(cfg.output, report)
    if cfg.residuals:
        rows = await _offload(hjb_residual_rows, sol, cfg.grid)
        await storage.write_csv(cfg.residuals, RESIDUAL_CSV_HEADER, rows)


@router.command("simulate")
async def simulate_command(cfg: RunConfig):
    sol = await _load_solution(cfg)
    mc = McConfig.defaults(sol.data.market.r, **cfg.mc_overrides())
    result = await _offload(simulate_perturbed, sol, cfg.z, cfg.x0, mc, cfg.perturbation)
    out = {
        "case": sol.case.value,
        "z": cfg.z,
        "x": cfg.x0,
        "value": evaluate(sol, cfg.z, cfg.x0),
        "mc": result.to_dict(),
    }
    if cfg.perturbation is not None:
        out["perturbation"] = {"boundary": cfg.perturbation.boundary, "relative": cfg.perturbation.relative}
    await storage.write_json(cfg.output, out)
