"""
File Report Output Target

Writes every delivered run report into an output directory.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..interfaces.report_output import ReportOutputTarget
from .writers import OutputPaths, write_outputs

logger = logging.getLogger(__name__)


class FileReportOutputTarget(ReportOutputTarget):
    """
    Output target writing trajectory CSV plus allocation and sensitivity JSON.

    Reports are prefixed with ``metadata["prefix"]`` when given, so several
    runs can share one directory.
    """

    def __init__(self, directory: Optional[Path] = None):
        self._directory = Path(directory) if directory is not None else None
        self.written: Dict[str, Dict[str, Path]] = {}

    def initialize(self, config: Dict[str, Any]) -> bool:
        if "output_directory" in config:
            self._directory = Path(config["output_directory"])
        if self._directory is None:
            return False
        self._directory.mkdir(parents=True, exist_ok=True)
        return True

    def deliver_report(self, report: Any, metadata: Optional[Dict[str, Any]] = None) -> bool:
        if self._directory is None:
            return False
        prefix = (metadata or {}).get("prefix", "")
        try:
            self.written[report.label] = write_outputs(report, OutputPaths(self._directory, prefix))
            return True
        except OSError as e:
            logger.error("[FileReportOutputTarget] Error writing %s: %s", report.label, e)
            return False

    def is_available(self) -> bool:
        return self._directory is not None

    def cleanup(self) -> None:
        self.written.clear()
