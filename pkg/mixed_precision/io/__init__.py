"""
Dataset ingestion and result serialization.
"""

from .idx import IMAGES_MAGIC, LABELS_MAGIC, load_idx, read_idx_images, read_idx_labels
from .synthetic import BLOBS, SYNTHETIC_KINDS, TWO_MOONS, gen_synthetic
from .writers import (
    TRAJECTORY_HEADER,
    OutputPaths,
    atomic_write_text,
    read_sensitivity_json,
    write_allocation_json,
    write_comparison_json,
    write_effective_config,
    write_outputs,
    write_sensitivity_json,
    write_trajectory_csv,
)
from .dataset_selector import DATASET_KINDS, IDX, DatasetSelector
from .file_report_output_target import FileReportOutputTarget

__all__ = [
    "IMAGES_MAGIC",
    "LABELS_MAGIC",
    "load_idx",
    "read_idx_images",
    "read_idx_labels",
    "BLOBS",
    "SYNTHETIC_KINDS",
    "TWO_MOONS",
    "gen_synthetic",
    "TRAJECTORY_HEADER",
    "OutputPaths",
    "atomic_write_text",
    "read_sensitivity_json",
    "write_allocation_json",
    "write_comparison_json",
    "write_effective_config",
    "write_outputs",
    "write_sensitivity_json",
    "write_trajectory_csv",
    "DATASET_KINDS",
    "IDX",
    "DatasetSelector",
    "FileReportOutputTarget",
]
