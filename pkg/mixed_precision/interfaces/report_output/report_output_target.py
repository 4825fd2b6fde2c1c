"""
Report Output Target Interface

Abstract base class for destinations of finished run reports
(output directory, in-memory recorder, etc.).
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional



class ReportOutputTarget(ABC):
    """
    Abstract base class for report output targets.

    This interface defines the contract that all report sinks must follow.
    """

    @abstractmethod
    def initialize(self, config: Dict[str, Any]) -> bool:
        """
        Initialize the target with configuration.

        Args:
            config: Configuration dictionary, e.g. ``output_directory``

        Returns:
            bool: True if initialization was successful, False otherwise
        """
        pass

    @abstractmethod
    def deliver_report(self, report: Any, metadata: Optional[Dict[str, Any]] = None) -> bool:
        """
        Deliver a finished run report.

        Args:
            report: The run report to deliver
            metadata: Optional metadata such as the run label

        Returns:
            bool: True if delivery was successful, False otherwise
        """
        pass

    @abstractmethod
    def is_available(self) -> bool:
        pass

    @abstractmethod
    def cleanup(self) -> None:
        pass
