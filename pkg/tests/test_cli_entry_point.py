"""
Test CLI entry point functionality.
"""

import json
import os
import sys
from pathlib import Path

import pytest

# Add the project root to the path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

import main  # noqa: E402
from mixed_precision.allocator.problem import AllocationProblem, BitAllocation, objective  # noqa: E402


def write_run_config(directory: Path, **sections) -> Path:
    document = {
        "model": {"layer_widths": [2, 8, 2], "seed": 1},
        "dataset": {"kind": "two_moons", "n": 80, "seed": 2},
        "train": {
            "iterations": 12,
            "reallocation_period": 4,
            "sensitivity_period": 2,
            "batch_size": 16,
            "log_period": 4,
            "eval_period": 0,
        },
        "output": {"directory": str(directory / "out")},
    }
    for section, values in sections.items():
        document.setdefault(section, {}).update(values)
    path = directory / "run.json"
    path.write_text(json.dumps(document))
    return path


def write_sensitivity(path: Path, weights) -> Path:
    path.write_text(json.dumps({"iteration": 7, "A_q": weights}))
    return path


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("MPQ_OUTPUT_DIR", str(tmp_path / "env-out"))
    monkeypatch.setenv("MPQ_LOG_LEVEL", "WARNING")


def test_main_module_has_main_function():
    """Test that main.py has a main function for the CLI entry point."""
    content = (Path(project_root) / "main.py").read_text()
    assert "def main(argv" in content
    assert "if __name__ == \"__main__\":" in content
    assert callable(main.main)


def test_pyproject_toml_has_script_entry():
    """Test that pyproject.toml defines the CLI entry point."""
    content = (Path(project_root) / "pyproject.toml").read_text()
    assert "[tool.poetry.scripts]" in content
    assert "mixed-precision-bitopt = \"main:main\"" in content


def test_allocate_prints_the_allocation(tmp_path, capsys):
    """Test a one-shot greedy allocation from a sensitivity file."""
    sensitivity = write_sensitivity(tmp_path / "sensitivity.json", {"big": 100.0, "small": 0.01})
    output = tmp_path / "allocation.json"

    code = main.main(["allocate", str(sensitivity), "--beta", "5", "--output", str(output)])

    assert code == main.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["bitwidths"] == {"big": 8, "small": 2}
    assert payload["average_bits"] == 5.0
    assert payload["constraint"]["kind"] == "avg_bitwidth"
    expected = objective(
        BitAllocation(("big", "small"), (8, 2), integral=True),
        AllocationProblem.from_weights([100.0, 0.01], ["big", "small"]),
    )
    assert payload["objective"] == pytest.approx(expected)
    assert json.loads(output.read_text()) == payload


def test_allocate_with_the_fractional_solver(tmp_path, capsys):
    """Test fractional allocations report real-valued bitwidths that use the budget."""
    sensitivity = write_sensitivity(tmp_path / "sensitivity.json", {"a": 4.0, "b": 1.0, "c": 0.5})

    code = main.main(["allocate", str(sensitivity), "--beta", "4.5", "--solver", "fractional"])

    assert code == main.EXIT_OK
    bitwidths = json.loads(capsys.readouterr().out)["bitwidths"]
    assert sum(bitwidths.values()) == pytest.approx(13.5, rel=1e-6)
    assert bitwidths["a"] > bitwidths["b"] > bitwidths["c"]


def test_configuration_errors_exit_with_one(tmp_path):
    """Test missing files, malformed input and usage errors map to exit code 1."""
    assert main.main(["train", str(tmp_path / "missing.json")]) == main.EXIT_CONFIG

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"train": {"epochs": 3}}))
    assert main.main(["train", str(bad)]) == main.EXIT_CONFIG

    broken = tmp_path / "broken.json"
    broken.write_text("{\"A_q\": ")
    assert main.main(["allocate", str(broken), "--beta", "4"]) == main.EXIT_CONFIG

    assert main.main(["allocate", str(broken)]) == main.EXIT_CONFIG
    assert main.main(["quantize"]) == main.EXIT_CONFIG


def test_numeric_and_infeasible_errors_exit_with_two(tmp_path):
    """Test solver guards and infeasible budgets map to exit code 2."""
    seven = write_sensitivity(tmp_path / "seven.json", {f"q{i}": float(i + 1) for i in range(7)})
    assert main.main(["allocate", str(seven), "--beta", "4", "--solver", "brute"]) == main.EXIT_NUMERIC

    two = write_sensitivity(tmp_path / "two.json", {"a": 1.0, "b": 2.0})
    assert main.main(["allocate", str(two), "--beta", "1"]) == main.EXIT_NUMERIC


def test_train_writes_its_outputs(tmp_path, capsys):
    """Test a short training run writes the trajectory, allocation and echoed config."""
    config = write_run_config(tmp_path)

    assert main.main(["train", str(config)]) == main.EXIT_OK

    out = tmp_path / "out"
    summary = json.loads(capsys.readouterr().out)
    assert summary["label"] == "mixed_precision"
    assert summary["aborted"] is False
    assert (out / "effective_config.json").exists()
    assert (out / "trajectory.csv").read_text().startswith("iteration,")
    allocation = json.loads((out / "allocation.json").read_text())
    assert allocation["bitwidths"] == summary["bitwidths"]


def test_sensitivity_then_allocate(tmp_path, capsys):
    """Test the sensitivity dump feeds the allocate subcommand."""
    config = write_run_config(tmp_path)

    assert main.main(["sensitivity", str(config)]) == main.EXIT_OK
    path = Path(capsys.readouterr().out.strip())
    assert path == tmp_path / "out" / "sensitivity.json"
    snapshot = json.loads(path.read_text())
    assert list(snapshot["A_q"]) == ["layer0.weight", "layer1.input", "layer1.weight"]

    assert main.main(["allocate", str(path), "--beta", "4", "--per-element", "--beta-a", "6"]) == main.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["bitwidths"]["layer1.input"] == 6
    assert payload["constraint"]["kind"] == "per_element"


def test_compare_writes_the_comparison(tmp_path, capsys):
    """Test the comparison covers mixed precision, the fixed baseline and the schedules."""
    config = write_run_config(tmp_path, compare={"schedules": [0.0]})

    assert main.main(["compare", str(config)]) == main.EXIT_OK

    printed = json.loads(capsys.readouterr().out)
    comparison = json.loads((tmp_path / "out" / "comparison.json").read_text())
    assert set(printed) == set(comparison)
    assert {"mixed_precision", "fixed_4bit", "allocate_once", "schedule_0"} <= set(comparison)
    assert (tmp_path / "out" / "fixed_4bit_trajectory.csv").exists()
