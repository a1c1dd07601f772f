"""Pydantic models describing the emitter-detector fiber network."""

from __future__ import annotations

import cmath
import math
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, field_validator, model_validator

_POLARIZER_ALIASES = {
    "σ-": "σ-",
    "σ−": "σ-",
    "s-": "σ-",
    "sigma-": "σ-",
    "sigma_minus": "σ-",
    "σ+": "σ+",
    "s+": "σ+",
    "sigma+": "σ+",
    "sigma_plus": "σ+",
}

# phase factors e^{i pi k/2}, exact
_QUARTER_TURN_UNITS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class Polarizer(str, Enum):
    """Circular polarization filter in front of a detector."""

    SIGMA_MINUS = "σ-"
    SIGMA_PLUS = "σ+"

    @classmethod
    def parse(cls, value: Any) -> "Polarizer":
        if isinstance(value, Polarizer):
            return value
        text = str(value).strip()
        canonical = _POLARIZER_ALIASES.get(text) or _POLARIZER_ALIASES.get(text.lower())
        if canonical is None:
            raise ValueError(f"Unknown polarizer {value!r}; expected 'σ-' or 'σ+'.")
        return cls(canonical)

    @property
    def projected_bit(self) -> int:
        """Bit the emitting qubit is projected onto: σ- heralds |+> (0), σ+ heralds |-> (1)."""

        return 0 if self is Polarizer.SIGMA_MINUS else 1

    def flipped(self) -> "Polarizer":
        return Polarizer.SIGMA_PLUS if self is Polarizer.SIGMA_MINUS else Polarizer.SIGMA_MINUS


def _coerce_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("phase_over_pi must be a rational number, not a boolean.")
    try:
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(repr(value))
        if isinstance(value, str):
            return Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"phase_over_pi {value!r} is not an exact rational.") from exc
    raise ValueError("phase_over_pi must be an integer or a 'p/q' string.")


PhaseOverPi = Annotated[
    Fraction,
    BeforeValidator(_coerce_fraction),
    PlainSerializer(lambda value: str(value), return_type=str),
]


class Fiber(BaseModel):
    """One optical fiber from an emitter to a detector, carrying a phase of phase_over_pi * pi."""

    emitter: int = Field(ge=1)
    detector: int = Field(ge=1)
    phase_over_pi: PhaseOverPi = Fraction(0)

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    def quarter_turns(self) -> Optional[int]:
        """Return k with phase = k*pi/2 (k in 0..3) when the phase is a quarter turn, else None."""

        doubled = 2 * self.phase_over_pi
        if doubled.denominator != 1:
            return None
        return int(doubled) % 4

    def gaussian_unit(self) -> Optional[tuple[int, int]]:
        """Exact (re, im) of the unit-modulus factor for quarter-turn phases."""

        turns = self.quarter_turns()
        return None if turns is None else _QUARTER_TURN_UNITS[turns]

    def phase_factor(self) -> complex:
        unit = self.gaussian_unit()
        if unit is not None:
            return complex(*unit)
        return cmath.exp(1j * math.pi * float(self.phase_over_pi))

    @property
    def is_pi(self) -> bool:
        return self.quarter_turns() == 2


class OpticalSetup(BaseModel):
    """N emitters, N polarizer-filtered detectors and the fibers between them (1-based indices)."""

    n: int = Field(ge=1)
    polarizers: tuple[Polarizer, ...]
    fibers: tuple[Fiber, ...] = ()

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("polarizers", mode="before")
    @classmethod
    def _coerce_polarizers(cls, value: Any) -> tuple[Polarizer, ...]:
        if isinstance(value, (str, bytes)) or not isinstance(value, (list, tuple)):
            raise ValueError("polarizers must be an array of 'σ-'/'σ+' entries.")
        return tuple(Polarizer.parse(item) for item in value)

    @field_validator("fibers", mode="after")
    @classmethod
    def _canonical_fibers(cls, value: tuple[Fiber, ...]) -> tuple[Fiber, ...]:
        seen: set[tuple[int, int]] = set()
        for fiber in value:
            key = (fiber.emitter, fiber.detector)
            if key in seen:
                raise ValueError(f"duplicate fiber from emitter {fiber.emitter} to detector {fiber.detector}")
            seen.add(key)
        return tuple(sorted(value, key=lambda fiber: (fiber.emitter, fiber.detector)))

    @model_validator(mode="after")
    def _check_indices(self) -> "OpticalSetup":
        if len(self.polarizers) != self.n:
            raise ValueError(
                f"{len(self.polarizers)} polarizers given for {self.n} emitters; detector and emitter counts must match"
            )
        for fiber in self.fibers:
            if fiber.emitter > self.n or fiber.detector > self.n:
                raise ValueError(
                    f"fiber ({fiber.emitter}, {fiber.detector}) references an index outside 1..{self.n}"
                )
        return self

    def fibers_of(self, emitter: int) -> tuple[Fiber, ...]:
        return tuple(fiber for fiber in self.fibers if fiber.emitter == emitter)

    def degree(self, emitter: int) -> int:
        return sum(1 for fiber in self.fibers if fiber.emitter == emitter)

    def fiber_map(self) -> dict[tuple[int, int], Fiber]:
        return {(fiber.emitter, fiber.detector): fiber for fiber in self.fibers}

    def count(self, polarizer: Polarizer) -> int:
        return sum(1 for item in self.polarizers if item is polarizer)

    @property
    def is_quarter_turn(self) -> bool:
        """True when every phase is a multiple of pi/2, i.e. amplitudes stay Gaussian integers."""

        return all(fiber.quarter_turns() is not None for fiber in self.fibers)


class DiagnosticCode(str, Enum):
    ISOLATED_EMITTER = "isolated-emitter"
    NO_PERFECT_MATCHING = "no-perfect-matching"
    INDEX_OUT_OF_RANGE = "index-out-of-range"
    DUPLICATE_FIBER = "duplicate-fiber"
    POLARIZER_COUNT = "polarizer-count"


class Diagnostic(BaseModel):
    """A single setup validation finding."""

    code: DiagnosticCode
    message: str
    emitter: Optional[int] = None
    detector: Optional[int] = None

    model_config = ConfigDict(frozen=True)
