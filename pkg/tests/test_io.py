"""
Tests for dataset ingestion and result serialization.
"""

import gzip
import json
import os
import struct
import sys

import numpy as np
import pytest

# Add the project root to the path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from mixed_precision.allocator import AllocationProblem, AvgBitwidth, BitAllocation, objective  # noqa: E402
from mixed_precision.engine import ModelSpec, TrainConfig, train  # noqa: E402
from mixed_precision.engine.report import (  # noqa: E402
    PHASE1_STAGE,
    AllocationEvent,
    IterationRecord,
    QuantizerRecord,
    RunReport,
)
from mixed_precision.errors import ConfigError, ContractError, FormatError  # noqa: E402
from mixed_precision.io import (  # noqa: E402
    IMAGES_MAGIC,
    LABELS_MAGIC,
    TRAJECTORY_HEADER,
    DatasetSelector,
    FileReportOutputTarget,
    OutputPaths,
    atomic_write_text,
    gen_synthetic,
    load_idx,
    read_sensitivity_json,
    write_allocation_json,
    write_comparison_json,
    write_outputs,
    write_sensitivity_json,
)
from mixed_precision.sensitivity import SensitivitySnapshot  # noqa: E402


def write_images(path, pixels, magic=IMAGES_MAGIC, opener=open):
    count, rows, cols = pixels.shape
    with opener(path, "wb") as handle:
        handle.write(struct.pack(">4I", magic, count, rows, cols))
        handle.write(pixels.astype(np.uint8).tobytes())
    return path


def write_labels(path, labels, magic=LABELS_MAGIC, opener=open):
    with opener(path, "wb") as handle:
        handle.write(struct.pack(">2I", magic, len(labels)))
        handle.write(np.asarray(labels, dtype=np.uint8).tobytes())
    return path


PIXELS = np.array([[[0, 255], [51, 102]], [[255, 255], [0, 0]], [[1, 2], [3, 4]]])


def test_load_idx(tmp_path):
    """Test images are flattened and scaled to [0, 1]."""
    images = write_images(tmp_path / "images.idx", PIXELS)
    labels = write_labels(tmp_path / "labels.idx", [3, 1, 4])
    dataset = load_idx(images, labels)
    assert dataset.features.shape == (3, 4)
    np.testing.assert_allclose(dataset.features[0], [0.0, 1.0, 0.2, 0.4])
    assert dataset.labels.tolist() == [3, 1, 4]
    assert dataset.num_classes == 5


def test_load_gzipped_idx(tmp_path):
    """Test files ending in .gz are decompressed transparently."""
    images = write_images(tmp_path / "images.idx.gz", PIXELS, opener=gzip.open)
    labels = write_labels(tmp_path / "labels.idx.gz", [0, 1, 0], opener=gzip.open)
    assert len(load_idx(images, labels)) == 3


def test_bad_magic_reports_offset_zero(tmp_path):
    """Test a wrong magic number is a format error at byte 0."""
    images = write_images(tmp_path / "images.idx", PIXELS, magic=LABELS_MAGIC)
    labels = write_labels(tmp_path / "labels.idx", [0, 1, 0])
    with pytest.raises(FormatError) as excinfo:
        load_idx(images, labels)
    assert excinfo.value.offset == 0


def test_truncated_files(tmp_path):
    """Test short headers and short bodies are rejected."""
    labels = write_labels(tmp_path / "labels.idx", [0, 1, 0])
    short_header = tmp_path / "header.idx"
    short_header.write_bytes(struct.pack(">2I", IMAGES_MAGIC, 3))
    with pytest.raises(FormatError) as excinfo:
        load_idx(short_header, labels)
    assert excinfo.value.offset == 8

    short_body = tmp_path / "body.idx"
    short_body.write_bytes(struct.pack(">4I", IMAGES_MAGIC, 3, 2, 2) + bytes(5))
    with pytest.raises(FormatError):
        load_idx(short_body, labels)


def test_count_mismatch(tmp_path):
    """Test image and label counts must agree."""
    images = write_images(tmp_path / "images.idx", PIXELS)
    labels = write_labels(tmp_path / "labels.idx", [0, 1])
    with pytest.raises(FormatError) as excinfo:
        load_idx(images, labels)
    assert excinfo.value.offset == 4


def test_empty_idx_pair_loads_but_cannot_be_trained_on(tmp_path):
    """Test a zero-image file gives an empty dataset that training refuses."""
    images = write_images(tmp_path / "images.idx", np.zeros((0, 2, 1)))
    labels = write_labels(tmp_path / "labels.idx", [])
    dataset = load_idx(images, labels)
    assert len(dataset) == 0
    assert dataset.is_empty()
    assert dataset.features.shape == (0, 2)
    with pytest.raises(ContractError, match="empty dataset"):
        train(ModelSpec((2, 4, 2), seed=0), TrainConfig(constraint=AvgBitwidth(4.0), iterations=5), dataset)


def test_missing_file_is_a_format_error(tmp_path):
    """Test unreadable files surface as format errors."""
    with pytest.raises(FormatError):
        load_idx(tmp_path / "absent.idx", tmp_path / "absent-labels.idx")


def test_two_moons_is_deterministic_and_balanced():
    """Test identical arguments give identical data."""
    first = gen_synthetic("two_moons", 101, 0.1, seed=5)
    second = gen_synthetic("two_moons", 101, 0.1, seed=5)
    np.testing.assert_array_equal(first.features, second.features)
    np.testing.assert_array_equal(first.labels, second.labels)
    assert first.features.shape == (101, 2)
    assert np.bincount(first.labels).tolist() == [51, 50]
    assert not np.array_equal(first.features, gen_synthetic("two_moons", 101, 0.1, seed=6).features)


def test_noiseless_moons_lie_on_unit_half_circles():
    """Test class 0 on the upper circle around (0, 0), class 1 on the lower one around (1, 0.5)."""
    dataset = gen_synthetic("two_moons", 60, 0.0, seed=2)
    upper = dataset.features[dataset.labels == 0]
    lower = dataset.features[dataset.labels == 1]
    np.testing.assert_allclose(np.linalg.norm(upper, axis=1), 1.0)
    np.testing.assert_allclose(np.linalg.norm(lower - np.array([1.0, 0.5]), axis=1), 1.0)
    assert np.all(upper[:, 1] >= -1e-12)
    assert np.all(lower[:, 1] <= 0.5 + 1e-12)


def test_noiseless_blobs_sit_on_their_centers():
    """Test blobs without noise lie exactly on a circle of the given radius."""
    dataset = gen_synthetic("blobs", 40, 0.0, seed=0, centers=4, spread=2.0)
    assert dataset.num_classes == 4
    np.testing.assert_allclose(np.linalg.norm(dataset.features, axis=1), 2.0)


def test_synthetic_argument_validation():
    """Test unknown kinds and degenerate sizes are rejected."""
    with pytest.raises(ContractError):
        gen_synthetic("spirals", 10, 0.1, seed=0)
    with pytest.raises(ContractError):
        gen_synthetic("two_moons", 1, 0.1, seed=0)
    with pytest.raises(ContractError):
        gen_synthetic("blobs", 10, 0.1, seed=0, centers=1)


def test_dataset_selector():
    """Test synthetic loading with a held-out split."""
    train_set, test_set = DatasetSelector(n=100, test_fraction=0.2).load()
    assert (len(train_set), len(test_set)) == (80, 20)
    train_only, nothing = DatasetSelector(n=50, test_fraction=0.0).load()
    assert len(train_only) == 50 and nothing is None


def test_dataset_selector_validation():
    """Test configuration errors name their keys."""
    with pytest.raises(ConfigError) as excinfo:
        DatasetSelector(kind="cifar")
    assert excinfo.value.key_path == "dataset.kind"
    with pytest.raises(ConfigError) as excinfo:
        DatasetSelector(kind="idx", images="x.idx")
    assert excinfo.value.key_path == "dataset.images, dataset.labels"


def test_dataset_selector_idx_with_test_files(tmp_path):
    """Test dedicated test files replace the random split."""
    images = write_images(tmp_path / "images.idx", PIXELS)
    labels = write_labels(tmp_path / "labels.idx", [0, 1, 0])
    selector = DatasetSelector(
        kind="idx", images=str(images), labels=str(labels), test_images=str(images), test_labels=str(labels)
    )
    train_set, test_set = selector.load()
    assert len(train_set) == 3 and len(test_set) == 3


def snapshot_fixture():
    return SensitivitySnapshot(
        9, {"a": 2.0, "b": 0.1 + 0.2}, {"a": 4, "b": 2}, {"a": "weight", "b": "activation"}
    )


def test_sensitivity_json_round_trip(tmp_path):
    """Test a snapshot reads back as a bit-identical allocation problem."""
    path = write_sensitivity_json(snapshot_fixture(), tmp_path / "sensitivity.json")
    problem, iteration = read_sensitivity_json(path)
    assert iteration == 9
    assert problem.quantizer_ids == ("a", "b")
    assert problem.weights == (2.0, 0.1 + 0.2)
    assert problem.element_counts == (4, 2)
    assert problem.roles == ("weight", "activation")


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"iteration": 1}),
        json.dumps({"A_q": {}}),
        json.dumps({"A_q": {"a": 1.0}, "e_q": {"b": 3}}),
        json.dumps({"A_q": {"a": -1.0}}),
        json.dumps({"A_q": {"a": "large"}}),
    ],
)
def test_malformed_sensitivity_json(tmp_path, text):
    """Test structural problems in a sensitivity file are format errors."""
    path = tmp_path / "sensitivity.json"
    path.write_text(text)
    with pytest.raises(FormatError):
        read_sensitivity_json(path)


def test_allocation_json(tmp_path):
    """Test integral bitwidths are written as integers alongside the objective."""
    problem = AllocationProblem.from_weights([4.0, 1.0], quantizer_ids=["x", "y"])
    allocation = BitAllocation(("x", "y"), (3, 3), True)
    path = write_allocation_json(allocation, problem, AvgBitwidth(3.0), tmp_path / "allocation.json")
    payload = json.loads(path.read_text())
    assert payload["bitwidths"] == {"x": 3, "y": 3}
    assert isinstance(payload["bitwidths"]["x"], int)
    assert payload["objective"] == pytest.approx(5.0 / 49.0)
    assert payload["constraint"]["kind"] == "avg_bitwidth"
    assert payload["average_bits"] == 3.0


def make_report():
    allocation = BitAllocation(("a", "b"), (3, 5), True)
    snapshot = SensitivitySnapshot(0, {"a": 2.0, "b": 0.5}, {"a": 4, "b": 2}, {"a": "weight", "b": "activation"})
    problem = AllocationProblem.from_snapshot(snapshot)
    event = AllocationEvent(0, PHASE1_STAGE, allocation, snapshot, objective(allocation, problem), 2)
    logged = IterationRecord(
        0,
        "mixed_precision",
        0.75,
        0.5,
        {
            "b": QuantizerRecord("activation", 5.0, 0.5, 1.25),
            "a": QuantizerRecord("weight", 3.0, 2.0, 0.5),
        },
    )
    return RunReport(
        "mixed_precision",
        constraint=AvgBitwidth(4.0).to_dict(),
        iterations=[logged, IterationRecord(1, "mixed_precision", 0.7)],
        allocation_events=[event],
        final_allocation=allocation,
        final_accuracy=0.5,
    )


def test_write_outputs(tmp_path):
    """Test the trajectory rows, the allocation file and the sensitivity file."""
    written = write_outputs(make_report(), OutputPaths(tmp_path))
    assert set(written) == {"trajectory", "allocation", "sensitivity"}

    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRAJECTORY_HEADER)
    assert lines[1:] == ["0,a,weight,3,2,0.5,0.75,0.5", "0,b,activation,5,0.5,1.25,0.75,0.5"]

    allocation = json.loads((tmp_path / "allocation.json").read_text())
    assert allocation["bitwidths"] == {"a": 3, "b": 5}
    assert allocation["objective"] == pytest.approx(2.0 / 49.0 + 0.5 / 961.0)

    problem, iteration = read_sensitivity_json(tmp_path / "sensitivity.json")
    assert problem.weights == (2.0, 0.5)
    assert iteration == 0


def test_write_outputs_without_allocation(tmp_path):
    """Test fixed-precision reports only produce a trajectory."""
    report = RunReport("full_precision", iterations=[IterationRecord(0, "fine_tuning", 1.0)])
    written = write_outputs(report, OutputPaths(tmp_path, "fp_"))
    assert set(written) == {"trajectory"}
    assert (tmp_path / "fp_trajectory.csv").read_text() == ",".join(TRAJECTORY_HEADER) + "\n"


def test_atomic_write_leaves_no_temporary_files(tmp_path):
    """Test the rename leaves only the target file behind."""
    target = atomic_write_text(tmp_path / "nested" / "out.txt", "first")
    atomic_write_text(target, "second")
    assert target.read_text() == "second"
    assert os.listdir(tmp_path / "nested") == ["out.txt"]


def test_comparison_json(tmp_path):
    """Test the comparison file holds one summary per label."""
    path = write_comparison_json({"mixed_precision": make_report()}, tmp_path / "comparison.json")
    summary = json.loads(path.read_text())["mixed_precision"]
    assert summary["average_bits"] == 4.0
    assert summary["final_loss"] == 0.7
    assert summary["allocation_events"] == 1
    assert summary["aborted"] is False


def test_file_report_output_target(tmp_path):
    """Test reports land in the configured directory under their prefix."""
    target = FileReportOutputTarget()
    assert not target.is_available()
    assert target.initialize({"output_directory": str(tmp_path / "runs")})
    assert target.deliver_report(make_report(), {"prefix": "mixed_precision_"})
    assert (tmp_path / "runs" / "mixed_precision_trajectory.csv").exists()
    assert set(target.written["mixed_precision"]) == {"trajectory", "allocation", "sensitivity"}
