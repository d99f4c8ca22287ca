"""
Shared Test Fixtures
====================
Canonical instances, a case-targeted random instance generator and a small
script runner so every test module can also be run directly:

    python tests/test_model.py
"""

import math
import sys
import time
import traceback
from pathlib import Path
from typing import Dict, Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.data.problem import CostParams, MarketParams, PayoffSpec, PowerTerm, ProblemData, StepTerm  # noqa: E402

SIGMA_HALF = math.sqrt(0.5)
DATA_DIR = Path(__file__).parent.parent / "data"


def linear(constant: float, K1: float, K0: float, K: float, closed_rate: float = 0.0) -> ProblemData:
    """b = 0, sigma^2 = 1/2, r = 1 (so m = -1, n = 2), h(x) = x + constant"""
    return ProblemData(
        MarketParams(0.0, SIGMA_HALF, 1.0),
        CostParams(K1, K0, K),
        PayoffSpec((PowerTerm(1.0, 1.0),), constant),
        closed_rate,
    )


def with_costs(data: ProblemData, **costs) -> ProblemData:
    current = {"K1": data.costs.K1, "K0": data.costs.K0, "K": data.costs.K}
    current.update(costs)
    return ProblemData(data.market, CostParams(**current), data.payoff, data.closed_rate)


# One instance per directly reachable table row
CANONICAL_I2 = linear(0.0, 1.0, 1.0, 0.0)
TRIVIAL_I1 = linear(2.0, 1.0, 1.0, 0.0)
SAMPLE_I3 = linear(0.5, 1.0, 1.0, -0.5)
SAMPLE_II1 = linear(-3.0, 0.25, 0.25, 1.0)
SAMPLE_II2 = linear(-0.5, 0.5, 1.0, 0.25)
SAMPLE_III1 = linear(-2.0, 1.0, 0.5, -1.0)
# K0 is irrelevant for K0_star; it is set relative to it in the tests
POCKET_BASE = linear(-3.0, 0.25, 1.0, 0.0)
# K1_dagger grid-scan instance (delta_dagger = 7/4)
CLOSED_POCKET_BASE = linear(-3.0, 1.0, 0.5, -0.5)

# h = sqrt(x) + 1 - 1e-8 crosses rK1 = 1 at 1e-16; alpha = 2.25e-16
TINY_ALPHA_I2 = ProblemData(
    MarketParams(0.0, SIGMA_HALF, 1.0),
    CostParams(1.0, 1.0, 0.0),
    PayoffSpec((PowerTerm(1.0, 0.5),), 1.0 - 1e-8),
)
# h(0) >= rK1 leaves h - rK1 without a zero
HIGH_FLOOR_I3 = linear(1.2, 0.5, 1.0, -1.0)
HIGH_FLOOR_I3_SHALLOW = ProblemData(
    MarketParams(0.56694, 0.88712, 0.058542),
    CostParams(0.115035, 0.44067, -0.73794),
    PayoffSpec((PowerTerm(1.16833, 0.081377),), 0.045714),
)
# n is about 34.5
STEEP_III1 = ProblemData(
    MarketParams(-0.95, 0.17, 0.585),
    CostParams(1.26764, 1.92301, -2.27377),
    PayoffSpec((PowerTerm(1.0, 1.0),), -1.0),
)
# alpha = 2e-19 with O(1) values
STEEP_SLOPE_I2 = ProblemData(
    MarketParams(0.0, SIGMA_HALF, 1.0),
    CostParams(1.0, 1.0, 0.0),
    PayoffSpec((PowerTerm(1e19, 1.0),), 0.0),
)

STEPPED = ProblemData(
    MarketParams(0.02, 0.3, 0.05),
    CostParams(2.0, 1.0, 5.0),
    PayoffSpec((PowerTerm(1.0, 1.0), PowerTerm(0.5, 0.5)), -1.5, (StepTerm(2.0, 0.25),)),
    0.01,
)


# ==================== GENERATOR ====================

def random_market(rng: np.random.Generator) -> MarketParams:
    """Drift in (-0.5, 0.5), sigma^2 in (0.05, 1) with either sign of sigma, r in (0.1, 1.5)"""
    sigma = math.sqrt(rng.uniform(0.05, 1.0)) * rng.choice((-1.0, 1.0))
    return MarketParams(rng.uniform(-0.5, 0.5), float(sigma), rng.uniform(0.1, 1.5))


def random_payoff(rng: np.random.Generator, market: MarketParams, constant: float) -> PayoffSpec:
    """One to three power terms with exponents in (0.05, min(2, 0.9 n)), up to three steps"""
    from src.services.model import compute_roots

    top = min(2.0, 0.9 * compute_roots(market).n)
    powers = tuple(PowerTerm(rng.uniform(0.1, 2.0), rng.uniform(0.05, top))
                   for _ in range(rng.integers(1, 4)))
    steps = tuple(StepTerm(rng.uniform(0.01, 0.5), float(np.exp(rng.uniform(-2.5, 2.5))))
                  for _ in range(rng.integers(0, 4)))
    return PayoffSpec(powers, constant, steps)


def random_instance(rng: np.random.Generator, target: str) -> Optional[ProblemData]:
    """
    Instance whose table row is `target`, or None when the draw cannot reach it

    Rows that depend on K0_star, K1_dagger or K0_dagger compute them with the
    library and place the free cost on the requested side.
    """
    from src.services.classifier import compute_K0_dagger, compute_K0_star, compute_K1_dagger, solve_delta_dagger
    from src.services.model import payoff_eval

    market = random_market(rng)
    r = market.r
    K1 = rng.uniform(0.1, 2.0)

    def build(constant, K0, K):
        return ProblemData(market, CostParams(K1, K0, K), random_payoff(rng, market, constant))

    if target == "I1":
        K = rng.uniform(-1.0, 1.0)
        return build(r * K1 - r * min(K, 0.0) + rng.uniform(0.0, 2.0), rng.uniform(0.1, 2.0), K)
    if target == "I2":
        K, K0 = rng.uniform(0.0, 2.0), rng.uniform(0.1, 2.0)
        low = max(-r * K0, -r * K)
        return build(rng.uniform(low, r * K1), K0, K)
    if target == "I3":
        K = -rng.uniform(0.1, 2.0)
        return build(rng.uniform(-r * K, r * K1 - r * K), rng.uniform(0.1, 2.0), K)
    if target == "II1":
        K0 = rng.uniform(0.1, 1.0)
        K = K0 + rng.uniform(0.0, 1.0)
        return build(-r * K0 - rng.uniform(0.1, 3.0), K0, K)
    if target == "II2":
        K = rng.uniform(0.0, 1.0)
        K0 = K + rng.uniform(0.1, 1.0)
        return build(rng.uniform(-r * K0, -r * K), K0, K)
    if target in ("II2*", "II3"):
        K = rng.uniform(0.0, 0.5)
        base = build(-r * K - rng.uniform(0.5, 3.0), K + 1.0, K)
        k0_star = compute_K0_star(base)
        u = rng.uniform(0.1, 0.9)
        K0 = K + u * (k0_star - K) if target == "II3" else k0_star + u * (-base.payoff.h0 / r - k0_star)
        return with_costs(base, K0=K0)
    if target == "III1":
        K = -rng.uniform(0.1, 1.5)
        K0 = rng.uniform(0.1, 2.0)
        return build(rng.uniform(-r * K0, -r * K), K0, K)
    if target == "III2":
        K = -rng.uniform(0.1, 1.0)
        base = build(-rng.uniform(1.0, 4.0), 0.1, K)
        delta = solve_delta_dagger(base)
        if payoff_eval(base.payoff, delta) >= 0:
            return None
        base = with_costs(base, K1=rng.uniform(0.2, 0.8) * compute_K1_dagger(base))
        k0_dagger = compute_K0_dagger(base)
        K0 = rng.uniform(0.2, 0.8) * min(k0_dagger, -base.payoff.h0 / r)
        return with_costs(base, K0=K0)
    raise ValueError(f"unknown target {target}")


def open_pocket() -> ProblemData:
    """II3 instance: K0 halfway below K0_star"""
    from src.services.classifier import compute_K0_star

    return with_costs(POCKET_BASE, K0=0.5 * compute_K0_star(POCKET_BASE))


def closed_pocket() -> ProblemData:
    """III2 instance: K1 and K0 halfway below their critical levels"""
    from src.services.classifier import compute_K0_dagger, compute_K1_dagger

    data = with_costs(SAMPLE_III1, K1=0.5 * compute_K1_dagger(SAMPLE_III1))
    return with_costs(data, K0=0.5 * compute_K0_dagger(data))


# ==================== RUNNER ====================

def run_module(namespace: Dict[str, object]) -> int:
    """Run every test_* function in a module namespace; print [PASS]/[FAIL] lines"""
    tests = [(name, fn) for name, fn in namespace.items() if name.startswith("test_") and callable(fn)]
    failures = 0
    print(f"\n[TEST] {namespace.get('__name__')}: {len(tests)} tests")
    for name, fn in tests:
        start = time.time()
        try:
            fn()
            status = "[PASS]"
        except Exception:
            failures += 1
            status = "[FAIL]"
            traceback.print_exc()
        print(f"   {status} {name} ({(time.time() - start) * 1000:.0f}ms)")
    print(f"\n{len(tests) - failures}/{len(tests)} passed")
    return 1 if failures else 0


def close(a: float, b: float, rel: float = 1e-8, abs_tol: float = 0.0) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_tol)

