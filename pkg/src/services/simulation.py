"""
Switching Options - Monte Carlo
===============================
Simulates a threshold policy on exact GBM steps and estimates its
performance: discounted running payoff while open (and closed_rate while
closed) minus discounted switching and abandonment costs.

Paths are generated in fixed-size blocks, each with its own RNG stream
derived from (seed, block index), so results are identical for any number
of worker threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from src import config
from src.data.problem import ProblemData
from src.data.solution import RegionMap, Solution
from src.services.model import payoff_eval, resolvent_direct
from src.services.value_function import build_regions
from src.utils.constants import (
    DISCRETE_MONITORING_SHIFT,
    MIN_HORIZON_STEPS,
    REGION_ABANDON_CLOSED,
    REGION_ABANDON_OPEN,
    REGION_SWITCH_IN,
    REGION_SWITCH_OUT,
)
from src.utils.errors import InvalidConfig, InvalidPerturbation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class McConfig:
    paths: int
    dt: float
    horizon: float
    seed: int
    antithetic: bool = True
    block_paths: int = 4096
    threads: int = 0

    def __post_init__(self):
        if self.paths < 1:
            raise InvalidConfig(f"paths must be >= 1, got {self.paths}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidConfig(f"dt must be positive, got {self.dt}")
        if not self.horizon >= MIN_HORIZON_STEPS * self.dt:
            raise InvalidConfig(f"horizon {self.horizon} must be at least {MIN_HORIZON_STEPS} steps of dt={self.dt}")
        if self.block_paths < 2:
            raise InvalidConfig(f"block_paths must be >= 2, got {self.block_paths}")
        if self.threads < 0:
            raise InvalidConfig(f"threads must be >= 0, got {self.threads}")

    @classmethod
    def defaults(cls, r: float, **overrides) -> "McConfig":
        """Environment defaults with per-run overrides (None values are ignored)"""
        values = dict(paths=config.MC_PATHS, dt=config.MC_DT, horizon=config.MC_HORIZON_RATE / r,
                      seed=config.MC_SEED, antithetic=config.MC_ANTITHETIC,
                      block_paths=config.MC_BLOCK_PATHS, threads=config.THREADS)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def units_per_block(self) -> int:
        """Statistical units per block: antithetic pairs, or single paths"""
        return self.block_paths // 2 if self.antithetic else self.block_paths

    @property
    def units(self) -> int:
        return math.ceil(self.paths / 2) if self.antithetic else self.paths


@dataclass(frozen=True)
class McResult:
    mean: float
    stderr: float
    switch_count_mean: float
    abandon_fraction: float
    truncation_fraction: float
    truncation_bias: float
    monitoring_bias: float
    bias_budget: float
    paths: int

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class Perturbation:
    """Relative shift of one named boundary"""

    boundary: str
    relative: float


@dataclass
class _BlockOutcome:
    unit_values: np.ndarray
    switches: int
    abandoned: int
    truncated: int
    truncation_bound: float
    paths: int


class PathSimulator:
    """Runs one policy from one starting state; a block at a time"""

    def __init__(self, data: ProblemData, regions: RegionMap, z: int, x: float, cfg: McConfig):
        if z not in (0, 1):
            raise InvalidConfig(f"mode must be 0 or 1, got {z}")
        if not (x > 0 and math.isfinite(x)):
            raise InvalidConfig(f"starting state must be positive, got {x}")
        self.data = data
        self.regions = regions
        self.z, self.x0, self.cfg = z, x, cfg
        market = data.market
        self.drift = (market.b - market.sigma2) * cfg.dt
        self.vol = math.sqrt(2.0 * cfg.dt) * abs(market.sigma)
        self.steps = math.ceil(cfg.horizon / cfg.dt)

    def _rate(self, x: np.ndarray, mode: np.ndarray) -> np.ndarray:
        return np.where(mode == 1, payoff_eval(self.data.payoff, x), self.data.closed_rate)

    def _act(self, x, mode, alive, value, switches, discount: float):
        """Apply the policy at the current state; one action per path per instant"""
        costs = self.data.costs
        is_open = alive & (mode == 1)
        is_closed = alive & (mode == 0)
        abandon = (is_open & self.regions.member(REGION_ABANDON_OPEN, x)) | \
                  (is_closed & self.regions.member(REGION_ABANDON_CLOSED, x))
        close = is_open & ~abandon & self.regions.member(REGION_SWITCH_OUT, x)
        reopen = is_closed & ~abandon & self.regions.member(REGION_SWITCH_IN, x)
        value[abandon] -= discount * costs.K
        value[close] -= discount * costs.K0
        value[reopen] -= discount * costs.K1
        mode[close] = 0
        mode[reopen] = 1
        switches += close | reopen
        alive &= ~abandon

    def run_block(self, block: int) -> _BlockOutcome:
        cfg = self.cfg
        units = min(cfg.units_per_block, cfg.units - block * cfg.units_per_block)
        n = 2 * units if cfg.antithetic else units
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(block,)))
        r = self.data.market.r

        x = np.full(n, self.x0)
        mode = np.full(n, self.z, dtype=np.int8)
        alive = np.ones(n, dtype=bool)
        value = np.zeros(n)
        switches = np.zeros(n, dtype=np.int64)
        self._act(x, mode, alive, value, switches, 1.0)

        rate = self._rate(x, mode)
        for step in range(self.steps):
            if not alive.any():
                break
            if cfg.antithetic:
                half = rng.standard_normal(units)
                shocks = np.concatenate([half, -half])
            else:
                shocks = rng.standard_normal(n)
            t0 = step * cfg.dt
            d0, d1 = math.exp(-r * t0), math.exp(-r * (t0 + cfg.dt))
            x = np.where(alive, x * np.exp(self.drift + self.vol * shocks), x)
            new_rate = self._rate(x, mode)
            value += np.where(alive, 0.5 * cfg.dt * (d0 * rate + d1 * new_rate), 0.0)
            self._act(x, mode, alive, value, switches, d1)
            rate = self._rate(x, mode)

        truncated = alive
        bound = 0.0
        if truncated.any():
            tail = np.abs(resolvent_direct(self.data.roots, self.data.market, self.data.payoff,
                                           x[truncated])) + abs(self.data.closed_rate) / r
            bound = float(np.sum(math.exp(-r * cfg.horizon) * np.maximum(tail, abs(self.data.costs.K))))

        unit_values = 0.5 * (value[:units] + value[units:]) if cfg.antithetic else value
        logger.debug(f"[MC] block {block}: {n} paths, {int(truncated.sum())} truncated")
        return _BlockOutcome(unit_values, int(switches.sum()), int((~alive).sum()),
                             int(truncated.sum()), bound, n)


def _simulate(data: ProblemData, regions: RegionMap, z: int, x: float, cfg: McConfig) -> McResult:
    simulator = PathSimulator(data, regions, z, x, cfg)
    blocks = math.ceil(cfg.units / cfg.units_per_block)
    workers = min(cfg.threads if cfg.threads > 0 else config.worker_count(), blocks)
    logger.info(f"[MC] {cfg.paths} paths in {blocks} blocks on {workers} threads, "
                f"dt={cfg.dt:g}, horizon={cfg.horizon:g}, start (z={z}, x={x:g})")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes: List[_BlockOutcome] = list(pool.map(simulator.run_block, range(blocks)))

    unit_values = np.concatenate([o.unit_values for o in outcomes])
    paths = sum(o.paths for o in outcomes)
    mean = float(np.mean(unit_values))
    stderr = float(np.std(unit_values, ddof=1) / math.sqrt(unit_values.size)) if unit_values.size > 1 else 0.0

    switches = sum(o.switches for o in outcomes)
    abandoned = sum(o.abandoned for o in outcomes)
    truncated = sum(o.truncated for o in outcomes)
    truncation_bias = sum(o.truncation_bound for o in outcomes) / paths
    costs = data.costs
    events_per_path = (switches + abandoned) / paths
    monitoring_bias = (events_per_path * DISCRETE_MONITORING_SHIFT * abs(data.market.sigma)
                       * math.sqrt(2.0 * cfg.dt) * max(costs.K1, costs.K0, abs(costs.K)))
    result = McResult(mean, stderr, switches / paths, abandoned / paths, truncated / paths,
                      truncation_bias, monitoring_bias, truncation_bias + monitoring_bias, paths)
    logger.info(f"[MC] mean={mean:.6g} stderr={stderr:.3g} bias_budget={result.bias_budget:.3g}")
    return result


def simulate_value(sol: Solution, z: int, x: float, cfg: McConfig) -> McResult:
    """Performance of the solution's own policy started in mode z at state x"""
    return _simulate(sol.data, sol.regions, z, x, cfg)


def perturbed_regions(sol: Solution, perturbation: Optional[Perturbation]) -> RegionMap:
    if perturbation is None or perturbation.relative == 0.0:
        return sol.regions
    current = getattr(sol.boundaries, perturbation.boundary, None)
    if current is None:
        raise InvalidPerturbation(f"case {sol.case.value} has no boundary '{perturbation.boundary}'")
    shifted = replace(sol.boundaries, **{perturbation.boundary: current * (1.0 + perturbation.relative)})
    return build_regions(sol.case, shifted)


def simulate_perturbed(sol: Solution, z: int, x: float, cfg: McConfig,
                       perturbation: Optional[Perturbation]) -> McResult:
    """Same simulation with one boundary moved by a relative shift; same seed, same shocks"""
    return _simulate(sol.data, perturbed_regions(sol, perturbation), z, x, cfg)
