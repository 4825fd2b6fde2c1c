"""
Serialization of run reports, allocations and sensitivity snapshots.

Every file is written whole to a temporary file in the target directory and
renamed into place. Floats are written with ``repr`` so they read back
bit-identically.
"""

import csv
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from ..allocator import AllocationProblem, BitAllocation, ResourceConstraint, objective
from ..engine.report import RunReport
from ..errors import ContractError, FormatError
from ..sensitivity import SensitivitySnapshot

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = (
    "iteration", "quantizer_id", "role", "bitwidth", "sensitivity", "alpha_mean", "loss", "accuracy",
)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class OutputPaths:
    """File layout of one run inside an output directory."""

    directory: Path
    prefix: str = ""

    @property
    def trajectory_csv(self) -> Path:
        return self.directory / f"{self.prefix}trajectory.csv"

    @property
    def allocation_json(self) -> Path:
        return self.directory / f"{self.prefix}allocation.json"

    @property
    def sensitivity_json(self) -> Path:
        return self.directory / f"{self.prefix}sensitivity.json"


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` to a temp file next to ``path`` and rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as temp:
            temp.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return path


def _write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def _cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(float(value)) if isinstance(value, float) else str(value)


def _bits(value: float) -> Union[int, float]:
    return int(value) if float(value).is_integer() else float(value)


def trajectory_rows(report: RunReport):
    """Rows ordered by (iteration, quantizer id)."""
    for record in report.logged_iterations:
        for quantizer_id in sorted(record.quantizers):
            entry = record.quantizers[quantizer_id]
            yield (
                str(record.iteration),
                quantizer_id,
                entry.role,
                _cell(entry.bitwidth),
                _cell(entry.sensitivity),
                repr(float(entry.alpha_mean)),
                repr(float(record.loss)),
                _cell(record.accuracy),
            )


def write_trajectory_csv(report: RunReport, path: PathLike) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    writer.writerows(trajectory_rows(report))
    return atomic_write_text(path, buffer.getvalue())


def allocation_payload(
    allocation: BitAllocation, constraint: Dict[str, Any], objective_value: Optional[float]
) -> Dict[str, Any]:
    return {
        "constraint": dict(constraint),
        "bitwidths": {quantizer_id: _bits(b) for quantizer_id, b in allocation.as_dict().items()},
        "objective": objective_value,
        "average_bits": allocation.average_bits,
    }


def write_allocation_json(
    allocation: BitAllocation,
    problem: AllocationProblem,
    constraint: ResourceConstraint,
    path: PathLike,
) -> Path:
    payload = allocation_payload(allocation, constraint.to_dict(), objective(allocation, problem))
    return _write_json(path, payload)


def sensitivity_payload(snapshot: SensitivitySnapshot) -> Dict[str, Any]:
    ids = snapshot.quantizer_ids
    payload = {
        "iteration": snapshot.iteration,
        "A_q": {quantizer_id: float(snapshot.weights[quantizer_id]) for quantizer_id in ids},
        "e_q": {quantizer_id: int(snapshot.element_counts[quantizer_id]) for quantizer_id in ids},
    }
    if snapshot.roles:
        payload["roles"] = {quantizer_id: snapshot.roles[quantizer_id] for quantizer_id in ids}
    return payload


def write_sensitivity_json(snapshot: SensitivitySnapshot, path: PathLike) -> Path:
    return _write_json(path, sensitivity_payload(snapshot))


def read_sensitivity_json(path: PathLike) -> Tuple[AllocationProblem, int]:
    """
    Parse a sensitivity file into an allocation problem.

    Returns:
        Tuple[AllocationProblem, int]: The problem and the snapshot iteration
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e.msg})", e.pos) from e
    if not isinstance(payload, dict) or not isinstance(payload.get("A_q"), dict) or not payload["A_q"]:
        raise FormatError(f"{path}: expected an object with a non-empty 'A_q' mapping")
    weights = payload["A_q"]
    ids = list(weights)
    counts = payload.get("e_q", {})
    roles = payload.get("roles", {})
    if set(counts) - set(ids) or set(roles) - set(ids):
        raise FormatError(f"{path}: 'e_q'/'roles' name quantizers missing from 'A_q'")
    try:
        problem = AllocationProblem.from_weights(
            [float(weights[q]) for q in ids],
            ids,
            [roles[q] for q in ids] if roles else None,
            [int(counts.get(q, 1)) for q in ids] if counts else None,
        )
    except (TypeError, ValueError, ContractError) as e:
        raise FormatError(f"{path}: {e}") from e
    return problem, int(payload.get("iteration", 0))


def final_objective(report: RunReport) -> Optional[float]:
    """Objective of the final allocation under the last recorded sensitivities."""
    if report.final_allocation is None:
        return None
    for event in reversed(report.allocation_events):
        if event.snapshot is not None:
            return objective(report.final_allocation, AllocationProblem.from_snapshot(event.snapshot))
    return None


def last_snapshot(report: RunReport) -> Optional[SensitivitySnapshot]:
    for event in reversed(report.allocation_events):
        if event.snapshot is not None:
            return event.snapshot
    return None


def write_outputs(report: RunReport, paths: OutputPaths) -> Dict[str, Path]:
    """
    Write the trajectory CSV and, when the run allocated bits, the allocation
    and sensitivity JSON files.

    Returns:
        Dict[str, Path]: Written files keyed by kind
    """
    written = {"trajectory": write_trajectory_csv(report, paths.trajectory_csv)}
    if report.final_allocation is not None and report.constraint is not None:
        payload = allocation_payload(report.final_allocation, report.constraint, final_objective(report))
        written["allocation"] = _write_json(paths.allocation_json, payload)
    snapshot = last_snapshot(report)
    if snapshot is not None:
        written["sensitivity"] = write_sensitivity_json(snapshot, paths.sensitivity_json)
    logger.info("[Writers] %s: wrote %s", report.label, ", ".join(str(p) for p in written.values()))
    return written


def write_comparison_json(reports: Dict[str, RunReport], path: PathLike) -> Path:
    return _write_json(path, {label: report.summary() for label, report in reports.items()})


def write_effective_config(config: Dict[str, Any], path: PathLike) -> Path:
    return _write_json(path, config)
