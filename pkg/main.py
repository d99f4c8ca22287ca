"""
Switching Options
=================
Command-line entry point: classify, solve, sample, verify or simulate one
problem instance. Output goes to stdout (or --output), logs to stderr.
"""

import asyncio
import logging
import sys
from typing import Optional, Sequence

from src import config
from src.handlers.cli import parse_run_config
from src.handlers.commands import router
from src.utils.constants import EXIT_INVALID_INPUT, EXIT_OK, EXIT_SOLVER_FAILURE
from src.utils.errors import (
    InvalidConfig,
    InvalidPerturbation,
    InvalidProblem,
    RootNotBracketed,
    SwitchingError,
)

logger = logging.getLogger(__name__)


def configure_logging():
    """Configure logging once; stdout is reserved for command output"""
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code"""
    configure_logging()
    try:
        cfg = parse_run_config(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID_INPUT
    except InvalidConfig as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    config.log_settings()
    try:
        asyncio.run(router.dispatch(cfg))
    except (InvalidProblem, InvalidConfig, InvalidPerturbation) as e:
        print(f"[ERROR] invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except RootNotBracketed as e:
        print(f"[ERROR] solver failure in equation '{e.equation}': {e}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    except SwitchingError as e:
        print(f"[ERROR] solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)
