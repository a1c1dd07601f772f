"""Domain-level data models."""

from .report import CSV_HEADER, DegreeStudyRecord, SweepReport, SweepSummary, VerificationReport
from .setup import Diagnostic, DiagnosticCode, Fiber, OpticalSetup, Polarizer
from .trace import CompilerTrace, EmitterRecord, StepKind

__all__ = [
    "CSV_HEADER",
    "CompilerTrace",
    "DegreeStudyRecord",
    "Diagnostic",
    "DiagnosticCode",
    "EmitterRecord",
    "Fiber",
    "OpticalSetup",
    "Polarizer",
    "StepKind",
    "SweepReport",
    "SweepSummary",
    "VerificationReport",
]
