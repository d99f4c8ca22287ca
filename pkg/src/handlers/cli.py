"""
Switching Options - Command Line
================================
Argument parsing into an immutable RunConfig
"""

import argparse
from dataclasses import dataclass
from typing import Optional, Sequence

from src.services.simulation import Perturbation
from src.utils.errors import InvalidConfig
from src.utils.helpers import GridSpec, parse_grid

COMMANDS = ("classify", "solve", "sample", "verify", "simulate")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    output: Optional[str] = None
    grid: Optional[GridSpec] = None
    residuals: Optional[str] = None
    # Monte Carlo overrides; None keeps the environment default
    paths: Optional[int] = None
    dt: Optional[float] = None
    horizon: Optional[float] = None
    seed: Optional[int] = None
    antithetic: Optional[bool] = None
    z: int = 1
    x0: float = 1.0
    perturbation: Optional[Perturbation] = None

    def mc_overrides(self) -> dict:
        return {"paths": self.paths, "dt": self.dt, "horizon": self.horizon,
                "seed": self.seed, "antithetic": self.antithetic}


def _perturbation(text: str) -> Perturbation:
    name, _, relative = text.partition(":")
    try:
        return Perturbation(name, float(relative))
    except ValueError as e:
        raise InvalidConfig(f"perturbation must look like BOUNDARY:RELATIVE, got '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchopt",
        description="Optimal switching and abandonment of a project driven by geometric Brownian motion",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="problem JSON (or a solve output for verify)")
    parser.add_argument("--output", help="output file; stdout when omitted")
    parser.add_argument("--grid", help="sampling grid MIN:MAX:N[:log]")
    parser.add_argument("--residuals", help="verify: write per-point HJB clause values as CSV")
    parser.add_argument("--paths", type=int)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--horizon", type=float)
    parser.add_argument("--no-antithetic", dest="antithetic", action="store_false", default=None)
    parser.add_argument("--z", type=int, choices=(0, 1), default=1, help="starting mode for simulate")
    parser.add_argument("--x0", type=float, default=1.0, help="starting state for simulate")
    parser.add_argument("--perturb", help="simulate: shift one boundary, e.g. alpha:0.1")
    return parser


def parse_run_config(argv: Sequence[str]) -> RunConfig:
    """Parse argv; argparse exits with status 2 on malformed flags"""
    args = build_parser().parse_args(list(argv))
    if args.x0 <= 0:
        raise InvalidConfig(f"--x0 must be positive, got {args.x0}")
    return RunConfig(
        command=args.command,
        input=args.input,
        output=args.output,
        grid=parse_grid(args.grid) if args.grid else None,
        residuals=args.residuals,
        paths=args.paths,
        dt=args.dt,
        horizon=args.horizon,
        seed=args.seed,
        antithetic=args.antithetic,
        z=args.z,
        x0=args.x0,
        perturbation=_perturbation(args.perturb) if args.perturb else None,
    )
