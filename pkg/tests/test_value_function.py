"""
Value function assembly, evaluation and region map tests
Run with: python tests/test_value_function.py
"""

import sys

import numpy as np

from fixtures import (
    CANONICAL_I2,
    SAMPLE_I3,
    SAMPLE_II1,
    SAMPLE_II2,
    SAMPLE_III1,
    STEPPED,
    TRIVIAL_I1,
    close,
    closed_pocket,
    linear,
    run_module,
)

from src.data.results import CaseId, FreeBoundaries
from src.services.value_function import (
    Action,
    build_regions,
    build_solution,
    describe,
    evaluate,
    optimal_action,
    sample_rows,
)
from src.services.verification import monotone_violations
from src.utils.errors import InvalidPerturbation, UndefinedSecondDerivative

SAMPLES = (CANONICAL_I2, TRIVIAL_I1, SAMPLE_I3, SAMPLE_II1, SAMPLE_II2, SAMPLE_III1, STEPPED)


def test_always_open_values_differ_by_K1():
    sol = build_solution(TRIVIAL_I1)
    xs = np.geomspace(0.01, 100.0, 50)
    assert np.allclose(evaluate(sol, 1, xs) - evaluate(sol, 0, xs), TRIVIAL_I1.costs.K1, rtol=0, atol=1e-12)
    assert np.allclose(evaluate(sol, 1, xs), xs + 2.0, rtol=1e-12)


def test_canonical_values():
    sol = build_solution(CANONICAL_I2)
    assert sol.case == CaseId.I2
    assert close(evaluate(sol, 0, 1.0), 0.25, 1e-12)
    assert close(evaluate(sol, 0, 3.0), 2.0, 1e-12)
    assert close(evaluate(sol, 1, 1.0), 1.0, 1e-12)
    alpha = sol.boundaries.alpha
    assert close(evaluate(sol, 0, alpha, 1, side="left"), 1.0, 1e-10)
    assert close(evaluate(sol, 0, alpha, 1, side="right"), 1.0, 1e-10)


def test_canonical_actions():
    sol = build_solution(CANONICAL_I2)
    assert optimal_action(sol, 0, 1.0) == Action.CONTINUE
    assert optimal_action(sol, 0, 2.5) == Action.SWITCH_TO_OPEN
    assert optimal_action(sol, 0, sol.boundaries.alpha) == Action.SWITCH_TO_OPEN
    assert optimal_action(sol, 1, 0.01) == Action.CONTINUE


def test_second_derivative_at_a_boundary():
    sol = build_solution(CANONICAL_I2)
    alpha = sol.boundaries.alpha
    try:
        evaluate(sol, 0, alpha, 2)
    except UndefinedSecondDerivative:
        pass
    else:
        raise AssertionError("expected UndefinedSecondDerivative")
    assert close(evaluate(sol, 0, alpha, 2, side="left"), 0.5, 1e-10)
    assert abs(evaluate(sol, 0, alpha, 2, side="right")) < 1e-10


def test_scalar_and_vector_evaluation_agree():
    sol = build_solution(STEPPED)
    xs = np.array([0.05, 0.3, 1.7, 4.0, 60.0])
    vector = evaluate(sol, 0, xs)
    assert isinstance(vector, np.ndarray)
    for x, v in zip(xs, vector):
        scalar = evaluate(sol, 0, float(x))
        assert isinstance(scalar, float)
        assert close(scalar, float(v), 1e-14)


def test_evaluation_rejects_bad_arguments():
    sol = build_solution(CANONICAL_I2)
    for call in (lambda: evaluate(sol, 1, 0.0), lambda: evaluate(sol, 1, -1.0), lambda: evaluate(sol, 1, 1.0, 3)):
        try:
            call()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


def test_regions_partition_the_half_line():
    xs = np.geomspace(1e-3, 1e3, 400)
    for data in SAMPLES + (closed_pocket(),):
        sol = build_solution(data)
        for z, names in ((1, ("P", "S_out", "A1")), (0, ("W", "S_in", "A0"))):
            members = np.array([sol.regions.member(name, xs) for name in names])
            assert np.all(members.sum(axis=0) == 1), (sol.case, z)


def test_region_identities():
    xs = np.geomspace(1e-3, 1e3, 400)
    for data in SAMPLES + (closed_pocket(),):
        sol = build_solution(data)
        costs = data.costs
        w1, w0 = evaluate(sol, 1, xs), evaluate(sol, 0, xs)
        identities = (
            ("S_in", w0, w1 - costs.K1),
            ("S_out", w1, w0 - costs.K0),
            ("A1", w1, np.full(xs.shape, -costs.K)),
            ("A0", w0, np.full(xs.shape, -costs.K)),
        )
        for name, lhs, rhs in identities:
            mask = sol.regions.member(name, xs)
            scale = 1.0 + np.abs(rhs[mask])
            assert np.all(np.abs(lhs[mask] - rhs[mask]) <= 1e-10 * scale), (sol.case, name)


def test_values_are_increasing():
    xs = np.geomspace(1e-3, 1e3, 800)
    for data in SAMPLES + (closed_pocket(),):
        sol = build_solution(data)
        assert monotone_violations(sol, xs) == {"w1": 0, "w0": 0}, sol.case


def test_closed_pocket_layout():
    sol = build_solution(closed_pocket())
    assert sol.case == CaseId.III2
    fb = sol.boundaries
    assert optimal_action(sol, 1, 0.5 * fb.delta) == Action.ABANDON
    assert optimal_action(sol, 1, 0.5 * (fb.delta + fb.gamma)) == Action.CONTINUE
    assert optimal_action(sol, 1, 0.5 * (fb.gamma + fb.beta)) == Action.SWITCH_TO_CLOSED
    assert optimal_action(sol, 1, 2.0 * fb.beta) == Action.CONTINUE
    assert optimal_action(sol, 0, 0.5 * fb.zeta) == Action.ABANDON
    assert optimal_action(sol, 0, 0.5 * (fb.zeta + fb.alpha)) == Action.CONTINUE
    assert optimal_action(sol, 0, fb.alpha) == Action.SWITCH_TO_OPEN


def test_closed_rate_shifts_values():
    sol = build_solution(linear(1.0, 1.0, 1.0, 0.0, closed_rate=1.0))
    assert sol.case == CaseId.I2
    assert close(sol.boundaries.alpha, 2.0, 1e-12)
    assert sol.value_shift == 1.0
    assert close(evaluate(sol, 0, 1.0), 1.25, 1e-12)
    assert close(evaluate(sol, 1, 1.0), 2.0, 1e-12)
    assert close(evaluate(sol, 0, 3.0), 3.0, 1e-12)
    assert describe(sol)["value_shift"] == 1.0


def test_regions_need_ordered_boundaries():
    try:
        build_regions(CaseId.II1, FreeBoundaries(beta=3.0, alpha=2.0))
    except InvalidPerturbation:
        pass
    else:
        raise AssertionError("expected InvalidPerturbation")
    regions = build_regions(CaseId.II1, FreeBoundaries(beta=2.0, alpha=3.0))
    assert regions.label(1, 2.0) == "S_out"
    assert regions.label(0, 3.0) == "S_in"


def test_closed_pocket_needs_zeta_below_delta():
    try:
        build_regions(CaseId.III2, FreeBoundaries(zeta=0.6, delta=0.5, gamma=1.0, beta=2.0, alpha=3.0))
    except InvalidPerturbation as e:
        assert "zeta < delta" in str(e)
    else:
        raise AssertionError("expected InvalidPerturbation")
    regions = build_regions(CaseId.III2, FreeBoundaries(zeta=0.4, delta=0.5, gamma=1.0, beta=2.0, alpha=3.0))
    assert regions.label(0, 0.4) == "A0"
    assert regions.label(1, 0.45) == "A1"
    # the closed-waiting case keeps zeta above delta_dagger
    regions = build_regions(CaseId.III1, FreeBoundaries(zeta=0.6, delta=0.5, alpha=3.0))
    assert regions.label(0, 0.55) == "A0"


def test_sample_rows():
    sol = build_solution(CANONICAL_I2)
    rows = sample_rows(sol, [1.0, 3.0])
    assert len(rows) == 2
    x, w1, w0, dw1, dw0, region1, region0 = rows[0]
    assert (x, region1, region0) == (1.0, "P", "W")
    assert close(w0, 0.25, 1e-12) and close(dw0, 0.5, 1e-12) and close(dw1, 1.0, 1e-12)
    assert rows[1][-1] == "S_in"


def test_describe_lists_both_value_functions():
    doc = describe(build_solution(SAMPLE_II1))
    assert doc["case"] == "II1"
    assert [p["region"] for p in doc["w1"]] == ["S_out", "P"]
    assert [p["region"] for p in doc["w0"]] == ["W", "S_in"]
    assert doc["w1"][-1]["interval"]["hi"] is None
    assert "value_shift" not in doc
    assert doc["problem"] == SAMPLE_II1.to_dict()


if __name__ == "__main__":
    sys.exit(run_module(globals()))
