"""
Switching Options - Configuration
=================================
Load environment variables (all optional) for logging, worker threads and
Monte Carlo defaults
"""

import logging
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


# Logging
LOG_LEVEL = os.getenv("SWITCHOPT_LOG_LEVEL", "INFO").upper()

# Simulation worker threads (0 = one per CPU)
THREADS = int(os.getenv("SWITCHOPT_THREADS", "0"))

# Monte Carlo defaults (CLI flags override per run)
MC_PATHS = int(os.getenv("SWITCHOPT_MC_PATHS", "100000"))
MC_DT = float(os.getenv("SWITCHOPT_MC_DT", "1e-3"))
# Horizon is this many multiples of 1/r
MC_HORIZON_RATE = float(os.getenv("SWITCHOPT_MC_HORIZON_RATE", "40"))
MC_SEED = int(os.getenv("SWITCHOPT_MC_SEED", "20240601"))
MC_ANTITHETIC = _env_bool("SWITCHOPT_MC_ANTITHETIC", True)
# Paths per RNG block; results do not depend on how blocks are spread over threads
MC_BLOCK_PATHS = int(os.getenv("SWITCHOPT_MC_BLOCK_PATHS", "4096"))


def worker_count() -> int:
    return THREADS if THREADS > 0 else (os.cpu_count() or 1)


def log_settings():
    logger.info(f"[CONFIG] threads={worker_count()} log_level={LOG_LEVEL}")
    logger.info(f"[CONFIG] MC defaults: paths={MC_PATHS} dt={MC_DT} horizon={MC_HORIZON_RATE}/r "
                f"seed={MC_SEED} antithetic={MC_ANTITHETIC} block={MC_BLOCK_PATHS}")
