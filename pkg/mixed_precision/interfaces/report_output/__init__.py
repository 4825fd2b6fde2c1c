"""
Report Output Package

Destinations for finished run reports and the dispatcher fanning out to them.
"""

from .report_output_target import ReportOutputTarget
from .report_dispatcher import ReportDispatcher

__all__ = [
    "ReportOutputTarget",
    "ReportDispatcher",
]
