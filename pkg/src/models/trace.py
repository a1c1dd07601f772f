"""Pydantic models recording the decisions of the setup compiler."""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from .setup import Polarizer


class StepKind(str, Enum):
    FIRST = "FIRST"
    UP = "UP"
    DOWN = "DOWN"


class EmitterRecord(BaseModel):
    """How one emitter was wired."""

    emitter: int
    step: StepKind
    detectors: tuple[int, ...]
    reserved: Optional[tuple[int, int]] = None

    model_config = ConfigDict(frozen=True)


class CompilerTrace(BaseModel):
    """Per-emitter record of a compilation, serializable for debugging."""

    label: str
    polarizers: tuple[Polarizer, ...]
    records: tuple[EmitterRecord, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _reserved_pairs_disjoint(self) -> "CompilerTrace":
        seen: set[int] = set()
        for record in self.records:
            if record.reserved is None:
                continue
            overlap = seen.intersection(record.reserved)
            if overlap:
                raise ValueError(f"detectors {sorted(overlap)} reserved twice (emitter {record.emitter})")
            seen.update(record.reserved)
        return self
