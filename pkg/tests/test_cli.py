"""
Command-line tests: every command end to end through main.run
Run with: python tests/test_cli.py
"""

import json
import sys
import tempfile
from pathlib import Path
from unittest import mock

from fixtures import DATA_DIR, run_module

from main import run
from src.services.storage import csv_text, dumps
from src.utils.constants import EXIT_INVALID_INPUT, EXIT_OK, EXIT_SOLVER_FAILURE, RESIDUAL_CSV_HEADER
from src.utils.errors import RootNotBracketed

CANONICAL = str(DATA_DIR / "canonical_I2.json")


def run_to(tmp: str, name: str, *argv: str):
    """Run a command with --output in tmp; return (exit code, output path)"""
    out = Path(tmp) / name
    return run(list(argv) + ["--output", str(out)]), out


def test_classify():
    with tempfile.TemporaryDirectory() as tmp:
        code, out = run_to(tmp, "case.json", "classify", "--input", str(DATA_DIR / "trivial_I1.json"))
        assert code == EXIT_OK
        assert json.loads(out.read_text()) == {"case": "I1"}
        code, out = run_to(tmp, "case.json", "classify", "--input", str(DATA_DIR / "closed_waiting_III1.json"))
        doc = json.loads(out.read_text())
        assert doc["case"] == "III1"
        assert "delta_dagger" in doc["thresholds"]


def test_solve():
    with tempfile.TemporaryDirectory() as tmp:
        code, out = run_to(tmp, "solution.json", "solve", "--input", CANONICAL)
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["case"] == "I2"
        assert abs(doc["boundaries"]["alpha"] - 2.0) < 1e-12
        assert abs(doc["coefficients"]["B"] - 0.25) < 1e-12
        assert doc["regions"]["S_in"][0]["bounds"] == "[)"


def test_every_data_file_solves():
    with tempfile.TemporaryDirectory() as tmp:
        for path in sorted(DATA_DIR.glob("*.json")):
            code, out = run_to(tmp, "solution.json", "solve", "--input", str(path))
            assert code == EXIT_OK, path
            expected = path.stem.rsplit("_", 1)[-1]
            assert json.loads(out.read_text())["case"] == expected, path


def test_sample():
    with tempfile.TemporaryDirectory() as tmp:
        code, out = run_to(tmp, "values.csv", "sample", "--input", CANONICAL)
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "x,w1,w0,dw1,dw0,region1,region0"
        assert len(lines) == 101
        code, out = run_to(tmp, "values.csv", "sample", "--input", CANONICAL, "--grid", "1:3:3")
        lines = out.read_text().splitlines()
        assert lines[1].split(",")[0] == "1"
        assert abs(float(lines[1].split(",")[2]) - 0.25) < 1e-12
        assert lines[3].endswith(",P,S_in")


def test_verify_round_trip():
    with tempfile.TemporaryDirectory() as tmp:
        _, solution = run_to(tmp, "solution.json", "solve", "--input", str(DATA_DIR / "switching_II1.json"))
        residuals = Path(tmp) / "residuals.csv"
        code, out = run_to(tmp, "report.json", "verify", "--input", str(solution), "--residuals", str(residuals))
        assert code == EXIT_OK
        report = json.loads(out.read_text())
        assert report["passed"] and report["round_trip"]
        assert report["hjb"]["passed"] and report["c1"]["passed"] and report["residuals"]["passed"]
        lines = residuals.read_text().splitlines()
        assert lines[0] == ",".join(RESIDUAL_CSV_HEADER)
        assert len(lines) == 1001


def test_verify_detects_a_tampered_solution():
    with tempfile.TemporaryDirectory() as tmp:
        _, solution = run_to(tmp, "solution.json", "solve", "--input", CANONICAL)
        doc = json.loads(solution.read_text())
        doc["boundaries"]["alpha"] *= 1.1
        solution.write_text(json.dumps(doc))
        code, out = run_to(tmp, "report.json", "verify", "--input", str(solution))
        report = json.loads(out.read_text())
        assert code == EXIT_OK
        assert report["round_trip"] is False
        assert report["passed"] is False


def test_verify_compares_coefficients_and_regions():
    def tamper_coefficient(doc):
        doc["coefficients"]["B"] *= 1.001

    def tamper_region(doc):
        doc["regions"]["S_in"][0]["bounds"] = "()"

    with tempfile.TemporaryDirectory() as tmp:
        for tamper in (tamper_coefficient, tamper_region):
            _, solution = run_to(tmp, "solution.json", "solve", "--input", CANONICAL)
            doc = json.loads(solution.read_text())
            tamper(doc)
            solution.write_text(json.dumps(doc))
            code, out = run_to(tmp, "report.json", "verify", "--input", str(solution))
            report = json.loads(out.read_text())
            assert code == EXIT_OK
            assert report["round_trip"] is False, tamper.__name__
            assert report["passed"] is False


def test_simulate():
    with tempfile.TemporaryDirectory() as tmp:
        code, out = run_to(tmp, "mc.json", "simulate", "--input", CANONICAL, "--z", "0", "--x0", "1",
                           "--paths", "200", "--dt", "0.05", "--horizon", "10", "--seed", "1",
                           "--perturb", "alpha:0.1")
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert abs(doc["value"] - 0.25) < 1e-12
        assert doc["mc"]["paths"] == 200
        assert doc["perturbation"] == {"boundary": "alpha", "relative": 0.1}


def test_invalid_input_exit_codes():
    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / "bad.json"
        bad.write_text(json.dumps({"market": {"b": 0, "sigma": 0, "r": 1},
                                   "costs": {"K1": 1, "K0": 1, "K": 0},
                                   "payoff": {"powers": [[1, 1]], "constant": 0}}))
        broken = Path(tmp) / "broken.json"
        broken.write_text("{not json")
        for argv in (["solve", "--input", str(bad)],
                     ["solve", "--input", str(broken)],
                     ["solve", "--input", str(Path(tmp) / "missing.json")],
                     ["sample", "--input", CANONICAL, "--grid", "3:1:10"],
                     ["simulate", "--input", CANONICAL, "--perturb", "beta:0.1", "--paths", "10"],
                     ["frobnicate", "--input", CANONICAL]):
            code, _ = run_to(tmp, "out", *argv)
            assert code == EXIT_INVALID_INPUT, argv


def test_solver_failure_exit_code():
    with tempfile.TemporaryDirectory() as tmp:
        failure = RootNotBracketed("switch_in", (1.0, 2.0))
        with mock.patch("src.handlers.commands.build_solution", side_effect=failure):
            code, out = run_to(tmp, "solution.json", "solve", "--input", CANONICAL)
        assert code == EXIT_SOLVER_FAILURE
        assert not out.exists()


def test_output_formats_are_lossless():
    value = 0.1 + 0.2
    assert json.loads(dumps({"x": value}))["x"] == value
    assert float(csv_text(("x",), [(value,)]).splitlines()[1]) == value


if __name__ == "__main__":
    sys.exit(run_module(globals()))
