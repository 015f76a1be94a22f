from dataclasses import dataclass, field
from typing import Any, Dict

from ..config import DEFAULT_CONFIG, MctsiConfig
from ..models.loader import ModelTarget


@dataclass
class SuiteResult:
    """Pass/fail of one verification suite with its worst statistic."""
    suite: str
    passed: bool
    worst: float
    summary: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "worst": self.worst,
            "summary": self.summary,
            "details": self.details,
        }


class Suite:
    """Base class for verification suites the ``verify`` command can run."""

    def __init__(self, name: str, description: str):
        """Initialize a suite.

        Args:
            name: Name used on the command line
            description: One-line description of the property checked
        """
        self.name = name
        self.description = description

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        """Run the suite on a model or bare pmf.

        Args:
            target: Model (or pmf on a tree) under test
            config: Tolerance, guards and thread count
            **options: Suite-specific switches (e.g. ``mode`` for the global suite)

        Returns:
            Result with the worst statistic found
        """
        raise NotImplementedError("Subclasses must implement this method")
