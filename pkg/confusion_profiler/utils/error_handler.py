"""
Error handling for the Confusion Profiler.

This module provides the exception hierarchy used by every layer of the
package, the context object attached to raised errors, and the ErrorHandler
that turns an error into a logged message, troubleshooting hints and a
process exit code.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from .logger import Logger, get_logger


class ErrorType(Enum):
    """Enumeration for different types of errors."""
    INPUT_ERROR = "input_error"
    CONFIGURATION_ERROR = "configuration_error"
    DEGENERATE_ERROR = "degenerate_error"
    INVARIANT_ERROR = "invariant_error"
    FILE_ERROR = "file_error"


class ErrorSeverity(Enum):
    """Enumeration for error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ExitCode:
    """Process exit codes of the command-line front end."""
    SUCCESS = 0
    INPUT_ERROR = 2
    DEGENERATE = 3
    INVARIANT_VIOLATION = 4


@dataclass
class ErrorContext:
    """
    Context information for error handling.

    Attributes:
        error_type: Type of error that occurred
        severity: Severity level of the error
        operation: Operation that was being performed when error occurred
        component: Component/module where error occurred
        additional_info: Additional context information
    """
    error_type: ErrorType
    severity: ErrorSeverity
    operation: str
    component: str
    additional_info: Dict[str, Any] = field(default_factory=dict)


class ConfusionProfilerError(Exception):
    """Base exception class for the Confusion Profiler."""

    error_type = ErrorType.INPUT_ERROR
    exit_code = ExitCode.INPUT_ERROR

    def __init__(self, message: str, error_context: Optional[ErrorContext] = None,
                 **details: Any):
        super().__init__(message)
        self.message = message
        self.error_context = error_context
        self.details = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        context_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{self.message} ({context_str})"


class MatrixValidationError(ConfusionProfilerError, ValueError):
    """Input could not be parsed into a valid confusion matrix or valuation."""


class ConfigurationError(ConfusionProfilerError, ValueError):
    """Invalid option value or configuration file."""
    error_type = ErrorType.CONFIGURATION_ERROR


class UnknownFixtureError(ConfusionProfilerError, KeyError):
    """Requested built-in fixture does not exist."""

    def __str__(self) -> str:
        return ConfusionProfilerError.__str__(self)


class DegenerateMatrixError(ConfusionProfilerError, ArithmeticError):
    """Matrix for which the requested coefficient is undefined."""
    error_type = ErrorType.DEGENERATE_ERROR
    exit_code = ExitCode.DEGENERATE


class DegenerateValuationError(DegenerateMatrixError):
    """Valuation with (numerically) zero weighted variance."""


class SamplingBudgetError(DegenerateMatrixError):
    """Monte Carlo draw budget exhausted before enough samples were accepted."""


class InvariantViolationError(ConfusionProfilerError, RuntimeError):
    """A mathematical invariant of a computed result does not hold."""
    error_type = ErrorType.INVARIANT_ERROR
    exit_code = ExitCode.INVARIANT_VIOLATION


class ErrorHandler:
    """
    Centralized error reporting for the command-line front end.

    Logs an error with a level that follows its severity, prints
    troubleshooting suggestions for its type and maps it to an exit code.
    """

    def __init__(self, logger: Optional[Logger] = None):
        """
        Initialize the ErrorHandler.

        Args:
            logger: Logger instance for error reporting
        """
        self.logger = logger or get_logger(__name__)

    def handle_error(self, error: Exception, context: ErrorContext) -> int:
        """
        Handle an error based on its type and context.

        Args:
            error: The exception that occurred
            context: Error context information

        Returns:
            int: Exit code the process should terminate with
        """
        self._log_error(error, context)

        if context.error_type == ErrorType.INPUT_ERROR:
            self._suggest_input_fixes()
        elif context.error_type == ErrorType.CONFIGURATION_ERROR:
            self._suggest_configuration_fixes()
        elif context.error_type == ErrorType.DEGENERATE_ERROR:
            self._suggest_degenerate_fixes()
        elif context.error_type == ErrorType.INVARIANT_ERROR:
            self._suggest_invariant_fixes()
        elif context.error_type == ErrorType.FILE_ERROR:
            file_path = context.additional_info.get("file_path", "unknown")
            self.logger.info(f"Check that {file_path} exists and is readable")

        return self.exit_code_for(error)

    @staticmethod
    def exit_code_for(error: Exception) -> int:
        """Map an exception to the documented exit code."""
        if isinstance(error, ConfusionProfilerError):
            return error.exit_code
        if isinstance(error, (OSError, ValueError)):
            return ExitCode.INPUT_ERROR
        return 1

    @staticmethod
    def context_for(error: Exception, operation: str, component: str) -> ErrorContext:
        """Build the ErrorContext matching an exception raised by the library."""
        if isinstance(error, ConfusionProfilerError):
            if error.error_context is not None:
                return error.error_context
            error_type = error.error_type
            severity = (ErrorSeverity.CRITICAL if error_type == ErrorType.INVARIANT_ERROR
                        else ErrorSeverity.HIGH)
            return ErrorContext(error_type, severity, operation, component, dict(error.details))
        if isinstance(error, OSError):
            return ErrorContext(ErrorType.FILE_ERROR, ErrorSeverity.HIGH, operation, component,
                                {"file_path": getattr(error, "filename", None)})
        return ErrorContext(ErrorType.INPUT_ERROR, ErrorSeverity.CRITICAL, operation, component)

    def _log_error(self, error: Exception, context: ErrorContext) -> None:
        error_msg = f"Error in {context.component}.{context.operation}: {str(error)}"

        if context.severity == ErrorSeverity.CRITICAL:
            self.logger.error(error_msg, exception=error)
        elif context.severity == ErrorSeverity.HIGH:
            self.logger.error(error_msg)
        elif context.severity == ErrorSeverity.MEDIUM:
            self.logger.warning(error_msg)
        else:
            self.logger.debug(error_msg)

    def _suggest_input_fixes(self) -> None:
        self.logger.info("Input error solutions:")
        self.logger.info("  • CSV: one row per line, comma-separated, no header")
        self.logger.info('  • JSON: {"cells": [[...], ...]} with an optional "labels" list')
        self.logger.info("  • Cells must be finite, nonnegative and form a square array with d >= 2")
        self.logger.info("  • Use `fixtures` to list the built-in matrix names")

    def _suggest_configuration_fixes(self) -> None:
        self.logger.info("Configuration error solutions:")
        self.logger.info("  • Check YAML syntax and indentation")
        self.logger.info("  • Counts (restarts, samples) must be positive integers")
        self.logger.info("  • Tolerances must be positive, epsilon nonnegative")

    def _suggest_degenerate_fixes(self) -> None:
        self.logger.info("Degenerate input:")
        self.logger.info("  • At least two rows and two columns need positive mass")
        self.logger.info("  • Monte Carlo classes with tiny acceptance rates need a larger --max-draws")

    def _suggest_invariant_fixes(self) -> None:
        self.logger.info("Invariant violation:")
        self.logger.info("  • Re-run with more --restarts to rule out a local optimum")
        self.logger.info("  • Re-run with --verbose and report the seed and input matrix")
