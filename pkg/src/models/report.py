"""Pydantic models for verification reports and sweep summaries."""

from __future__ import annotations

import csv
import io
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

CSV_HEADER = ("history", "two_m", "fidelity", "success_prob", "exact", "null")

EXACT_FIDELITY_FLOOR = 1.0 - 1e-9


class VerificationReport(BaseModel):
    """Outcome of compiling, simulating and comparing one coupled-basis label."""

    label: str
    history: str
    two_m: int
    fidelity: float = Field(ge=0.0)
    exact_match: bool
    success_probability: float = Field(ge=0.0)
    null_projection: bool

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _exact_implies_fidelity(self) -> "VerificationReport":
        if self.exact_match and self.fidelity < EXACT_FIDELITY_FLOOR:
            raise ValueError(f"exact_match reported with fidelity {self.fidelity!r} below {EXACT_FIDELITY_FLOOR!r}")
        return self

    def csv_row(self) -> tuple[str, ...]:
        return (
            self.history,
            str(self.two_m),
            repr(self.fidelity),
            repr(self.success_probability),
            "true" if self.exact_match else "false",
            "true" if self.null_projection else "false",
        )


class SweepSummary(BaseModel):
    """Aggregate figures over a full coupled-basis sweep."""

    n: int
    labels: int
    exact_matches: int
    min_fidelity: float
    min_success_probability: float
    max_success_probability: float
    gram_deviation: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @computed_field(return_type=bool)
    def all_exact(self) -> bool:
        return self.exact_matches == self.labels == 2**self.n


class SweepReport(BaseModel):
    """One report per label in enumeration order plus the summary."""

    summary: SweepSummary
    reports: tuple[VerificationReport, ...]

    model_config = ConfigDict(frozen=True)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for report in self.reports:
            writer.writerow(report.csv_row())
        return buffer.getvalue()


class DegreeStudyRecord(BaseModel):
    """One extra-fiber variant of a compiled setup, from the report-only degree study."""

    label: str
    emitter: int
    detector: int
    base_probability: float
    extended_probability: float
    state_preserved: bool
    monotone: bool

    model_config = ConfigDict(frozen=True)
