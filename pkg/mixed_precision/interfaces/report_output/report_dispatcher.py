"""
Report Dispatcher

Delivers finished run reports to every registered output target.
"""

import logging
from typing import Any, Dict, List, Optional

from .report_output_target import ReportOutputTarget

logger = logging.getLogger(__name__)


class ReportDispatcher:
    """
    Dispatcher that fans a report out to multiple output targets.

    Targets fail independently; a failing target is logged and the
    remaining ones still receive the report.
    """

    def __init__(self):
        self._targets: List[ReportOutputTarget] = []

    def add_target(self, target: ReportOutputTarget) -> bool:
        """
        Add an output target.

        Returns:
            bool: False if the target is not available and was not added
        """
        if not target.is_available():
            return False
        self._targets.append(target)
        return True

    def dispatch_report(self, report: Any, metadata: Optional[Dict[str, Any]] = None) -> bool:
        """
        Deliver ``report`` to all targets.

        Returns:
            bool: True if every target received the report
        """
        metadata = dict(metadata or {})
        delivered = 0
        for target in self._targets:
            try:
                if target.deliver_report(report, metadata):
                    delivered += 1
                else:
                    logger.warning("[ReportDispatcher] %s did not accept the report", type(target).__name__)
            except Exception as e:
                logger.error("[ReportDispatcher] Error delivering report to %s: %s", type(target).__name__, e)
        return delivered == len(self._targets)

    def get_target_count(self) -> int:
        return len(self._targets)

    def cleanup(self) -> None:
        for target in self._targets:
            try:
                target.cleanup()
            except Exception as e:
                logger.error("[ReportDispatcher] Error cleaning up %s: %s", type(target).__name__, e)
        self._targets.clear()
