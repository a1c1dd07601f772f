"""Custom exception types used across the project."""

from __future__ import annotations

from typing import Any, Sequence


class SpinDomainError(ValueError):
    """Raised when quantum numbers, coupling histories or labels are out of range."""


class SetupParseError(ValueError):
    """Raised when a setup document cannot be parsed."""

    def __init__(self, message: str, *, location: str | None = None) -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class InvalidSetupError(ValueError):
    """Raised when an optical setup fails validation before simulation or export."""

    def __init__(self, message: str, *, diagnostics: Sequence[Any] = ()) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__(message)


class SimulationDomainError(ValueError):
    """Raised when simulation parameters or state dimensions are invalid."""


class SimulationResourceError(RuntimeError):
    """Raised when a problem exceeds a configured size cap."""


class CompilationError(RuntimeError):
    """Raised when the setup compiler runs out of detectors of a required polarity."""


class ReportExportError(RuntimeError):
    """Raised when a report or setup document cannot be written."""
