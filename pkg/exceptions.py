"""Custom exception types for the leakage analyzer.

This module defines a hierarchy of domain-specific exceptions so that the
CLI can report a precise reason for every failed analysis.

Exception Hierarchy:
    LeakageAnalysisError (base)
    ├── ConfigurationError
    ├── DistributionError
    │   ├── InvalidDistributionError
    │   ├── WeightSumMismatchError
    │   ├── NegativeMassError
    │   └── EmptySupportError
    ├── EstimationError
    │   ├── ZeroSampleSizeError
    │   ├── MissingPriorError
    │   └── ZeroImportanceMassError
    ├── AllocationError
    │   ├── EmptyPilotError
    │   └── BudgetTooSmallError
    ├── FrontendError
    │   ├── LexError
    │   ├── ParseError
    │   └── PreprocessError
    │       ├── UnboundConstError
    │       └── NonConstantLoopBoundError
    ├── EngineError
    │   ├── TraceBudgetExceededError
    │   ├── RuntimeDivergenceError
    │   └── ProgramRuntimeError
    └── PipelineError
        ├── TimeoutExceededError
        └── FixtureMissingError
"""

from typing import Optional


class LeakageAnalysisError(Exception):
    """Base exception for all leakage analysis errors."""

    def __init__(self, message: str, details: Optional[str] = None):
        """Initialize the exception with a message and optional details.

        Args:
            message: Human-readable error message
            details: Additional technical details about the error
        """
        self.message = message
        self.details = details
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        """Format the complete error message."""
        if self.details:
            return f"{self.message}\nDetails: {self.details}"
        return self.message


# Configuration Errors
class ConfigurationError(LeakageAnalysisError, ValueError):
    """Raised when the analysis configuration is invalid."""
    pass


# Distribution Errors
class DistributionError(LeakageAnalysisError):
    """Base class for malformed probability distributions."""
    pass


class InvalidDistributionError(DistributionError):
    """Raised when a probability vector is negative or does not sum to 1."""

    def __init__(self, total: float, reason: Optional[str] = None):
        self.total = total
        message = f"Invalid probability distribution (total mass {total!r})"
        super().__init__(message, reason)


class WeightSumMismatchError(DistributionError):
    """Raised when component weights do not sum to 1."""

    def __init__(self, weight_sum: float, tolerance: float):
        """Initialize with the offending weight sum.

        Args:
            weight_sum: Sum of the component weights
            tolerance: Allowed deviation from 1
        """
        self.weight_sum = weight_sum
        self.tolerance = tolerance
        message = f"Component weights sum to {weight_sum!r}, expected 1"
        super().__init__(message, f"tolerance {tolerance}")


class NegativeMassError(DistributionError):
    """Raised when a sub-distribution contains a negative cell."""

    def __init__(self, cell: object, value: float):
        self.cell = cell
        self.value = value
        super().__init__(f"Negative probability mass {value!r} at cell {cell!r}")


class EmptySupportError(DistributionError):
    """Raised when a fused joint distribution has no positive cell."""

    def __init__(self, what: str = "joint distribution"):
        self.what = what
        super().__init__(f"Empty support in {what}")


# Estimation Errors
class EstimationError(LeakageAnalysisError):
    """Base class for estimator input errors."""
    pass


class ZeroSampleSizeError(EstimationError):
    """Raised when a statistical component result has no samples."""

    def __init__(self, component: object):
        self.component = component
        super().__init__(f"Component {component!r} has sample size 0")


class MissingPriorError(EstimationError):
    """Raised when a known-prior result lacks the prior mass of an input."""

    def __init__(self, secret: object, component: object = None):
        self.secret = secret
        self.component = component
        details = f"component {component!r}" if component is not None else None
        super().__init__(f"No prior mass supplied for secret {secret!r}", details)


class ZeroImportanceMassError(EstimationError):
    """Raised when an input with positive prior mass received no samples."""

    def __init__(self, secret: object, component: object = None):
        self.secret = secret
        self.component = component
        details = f"component {component!r}" if component is not None else None
        super().__init__(f"Importance prior is zero for sampled secret {secret!r}", details)


# Allocation Errors
class AllocationError(LeakageAnalysisError):
    """Base class for sample allocation errors."""
    pass


class EmptyPilotError(AllocationError):
    """Raised when allocation weights are requested without pilot results."""

    def __init__(self) -> None:
        super().__init__("Pilot round produced no statistical component results")


class BudgetTooSmallError(AllocationError):
    """Raised when the budget cannot give every component its floor."""

    def __init__(self, budget: int, components: int, floor: int):
        self.budget = budget
        self.components = components
        self.floor = floor
        message = f"Sample budget {budget} is smaller than {components} components x floor {floor}"
        super().__init__(message)


# Frontend Errors
class FrontendError(LeakageAnalysisError):
    """Base class for errors tied to a source position."""

    def __init__(
        self,
        message: str,
        line: int = 0,
        column: int = 0,
        filename: str = "<input>",
        details: Optional[str] = None,
    ):
        """Initialize with a source position.

        Args:
            message: Description of the problem
            line: 1-based line number
            column: 1-based column number
            filename: Name of the source file
            details: Additional technical details
        """
        self.line = line
        self.column = column
        self.filename = filename
        self.reason = message
        super().__init__(f"{filename}:{line}:{column}: {message}", details)

    def with_filename(self, filename: str) -> "FrontendError":
        """Return the same error re-anchored to ``filename``."""
        self.filename = filename
        self.message = f"{filename}:{self.line}:{self.column}: {self.reason}"
        self.args = (self._format_message(),)
        return self


class LexError(FrontendError):
    """Raised on characters that do not start any token."""
    pass


class ParseError(FrontendError):
    """Raised when the token stream does not match the grammar."""
    pass


class PreprocessError(FrontendError):
    """Raised when macro substitution or unrolling cannot proceed."""
    pass


class UnboundConstError(PreprocessError):
    """Raised when a const has no value in the source or the overrides."""

    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.name = name
        super().__init__(
            f"Constant '{name}' has no value (pass --const {name}=VALUE)", line, column
        )


class NonConstantLoopBoundError(PreprocessError):
    """Raised when an array-indexing for loop has bounds that do not fold."""

    def __init__(self, variable: str, line: int = 0, column: int = 0):
        self.variable = variable
        super().__init__(
            f"Loop over '{variable}' indexes an array but its bounds are not constant",
            line,
            column,
        )


# Engine Errors
class EngineError(LeakageAnalysisError):
    """Base class for execution engine errors."""
    pass


class TraceBudgetExceededError(EngineError):
    """Raised when precise enumeration explores more states than allowed."""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(
            f"Precise enumeration exceeded the trace cap of {cap} states",
            "the program may terminate only probabilistically; try --mode hybrid",
        )


class RuntimeDivergenceError(EngineError):
    """Raised when a single concrete execution exceeds the step cap."""

    def __init__(self, cap: int, component: object = None):
        self.cap = cap
        self.component = component
        details = f"component {component!r}" if component is not None else None
        super().__init__(f"Execution exceeded the step cap of {cap}", details)


class ProgramRuntimeError(EngineError):
    """Raised on a run-time fault of the analyzed program (division by zero, bad index)."""

    def __init__(self, reason: str, line: int = 0):
        self.reason = reason
        self.line = line
        super().__init__(f"Runtime error at line {line}: {reason}")


# Pipeline Errors
class PipelineError(LeakageAnalysisError):
    """Base class for orchestration errors."""
    pass


class TimeoutExceededError(PipelineError):
    """Raised when the wall-clock cap is reached."""

    def __init__(self, seconds: float):
        self.seconds = seconds
        super().__init__(f"Analysis exceeded the timeout of {seconds} seconds")


class FixtureMissingError(PipelineError):
    """Raised when a fixture named by the validation suite is absent."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"Fixture not found: {path}")
