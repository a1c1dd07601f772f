"""Translate a coupled-basis label into the fiber network that projects onto it.

Construction, per emitter i:
  * emitter 1 is wired to every detector;
  * S_i > S_(i-1) (UP): wired to every detector not yet reserved;
  * S_i < S_(i-1) (DOWN): wired to one unreserved σ- detector through a pi
    phase and one unreserved σ+ detector; both become reserved.
N/2 + m detectors carry σ- filters (lowest indices), the rest σ+.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from src.components.optical_setup import validate_setup
from src.components.spin_algebra import CoupledLabel, HalfInt, label_violation
from src.models.setup import Fiber, OpticalSetup, Polarizer
from src.models.trace import CompilerTrace, EmitterRecord, StepKind
from src.utils.exceptions import CompilationError, SpinDomainError

logger = logging.getLogger(__name__)

Chooser = Callable[[Polarizer, tuple[int, ...]], int]


def lowest_index_chooser(polarizer: Polarizer, candidates: tuple[int, ...]) -> int:
    return candidates[0]


def highest_index_chooser(polarizer: Polarizer, candidates: tuple[int, ...]) -> int:
    return candidates[-1]


def seeded_chooser(seed: int) -> Chooser:
    """A chooser that picks uniformly among admissible detectors, reproducibly."""

    rng = np.random.default_rng(seed)

    def choose(polarizer: Polarizer, candidates: tuple[int, ...]) -> int:
        return candidates[int(rng.integers(len(candidates)))]

    return choose


@dataclass(frozen=True, slots=True)
class Feasibility:
    feasible: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.feasible


def label_feasibility(label: CoupledLabel | Sequence[HalfInt], m: HalfInt | None = None) -> Feasibility:
    """Check that a label names a state and that its detector layout can be wired.

    Accepts either a :class:`CoupledLabel` or a raw spin sequence plus ``m``, so
    that labels which cannot be constructed can still be diagnosed.
    """

    if isinstance(label, CoupledLabel):
        twice_spins, twice_m = label.history.twice_values, label.m.twice_value
    else:
        if m is None:
            return Feasibility(False, "m is required when passing a raw spin sequence")
        twice_spins, twice_m = tuple(spin.twice_value for spin in label), m.twice_value

    reason = label_violation(twice_spins, twice_m)
    if reason:
        return Feasibility(False, reason)

    n = len(twice_spins)
    if (n + twice_m) % 2:
        return Feasibility(False, "N/2 + m is not an integer")
    minus_count = (n + twice_m) // 2
    plus_count = n - minus_count
    if minus_count < 0 or plus_count < 0:
        return Feasibility(False, "negative detector count")

    down_steps = (n - twice_spins[-1]) // 2
    if down_steps > min(minus_count, plus_count):
        return Feasibility(
            False,
            f"{down_steps} DOWN steps need more σ-/σ+ pairs than the {minus_count}/{plus_count} detectors provide",
        )
    return Feasibility(True)


def _choose(
    chooser: Chooser,
    polarizer: Polarizer,
    polarizers: Sequence[Polarizer],
    reserved: set[int],
    emitter: int,
) -> int:
    candidates = tuple(
        index for index, item in enumerate(polarizers, start=1) if item is polarizer and index not in reserved
    )
    if not candidates:
        raise CompilationError(f"No unreserved {polarizer.value} detector left for emitter {emitter}.")
    choice = chooser(polarizer, candidates)
    if choice not in candidates:
        raise CompilationError(f"Chooser returned detector {choice}, not one of {candidates}.")
    return choice


def compile_setup(label: CoupledLabel, tie_break: Chooser | None = None) -> tuple[OpticalSetup, CompilerTrace]:
    """Build the optical setup projecting onto ``label`` and record each wiring decision."""

    feasibility = label_feasibility(label)
    if not feasibility:
        raise SpinDomainError(f"Label {label} is not compilable: {feasibility.reason}.")

    chooser = tie_break or lowest_index_chooser
    n = label.n
    minus_count = (n + label.m.twice_value) // 2
    polarizers = (Polarizer.SIGMA_MINUS,) * minus_count + (Polarizer.SIGMA_PLUS,) * (n - minus_count)
    all_detectors = tuple(range(1, n + 1))

    fibers = [Fiber(emitter=1, detector=detector) for detector in all_detectors]
    records = [EmitterRecord(emitter=1, step=StepKind.FIRST, detectors=all_detectors)]
    reserved: set[int] = set()

    for emitter in range(2, n + 1):
        if label.history.step(emitter) > 0:
            detectors = tuple(detector for detector in all_detectors if detector not in reserved)
            fibers.extend(Fiber(emitter=emitter, detector=detector) for detector in detectors)
            records.append(EmitterRecord(emitter=emitter, step=StepKind.UP, detectors=detectors))
            logger.debug("Emitter %s UP -> detectors %s", emitter, detectors)
            continue

        minus_detector = _choose(chooser, Polarizer.SIGMA_MINUS, polarizers, reserved, emitter)
        plus_detector = _choose(chooser, Polarizer.SIGMA_PLUS, polarizers, reserved, emitter)
        fibers.append(Fiber(emitter=emitter, detector=minus_detector, phase_over_pi=1))
        fibers.append(Fiber(emitter=emitter, detector=plus_detector))
        reserved.update((minus_detector, plus_detector))
        records.append(
            EmitterRecord(
                emitter=emitter,
                step=StepKind.DOWN,
                detectors=tuple(sorted((minus_detector, plus_detector))),
                reserved=(minus_detector, plus_detector),
            )
        )
        logger.debug("Emitter %s DOWN -> σ- %s (pi), σ+ %s", emitter, minus_detector, plus_detector)

    setup = OpticalSetup(n=n, polarizers=polarizers, fibers=tuple(fibers))
    diagnostics = validate_setup(setup)
    if diagnostics:
        raise CompilationError(
            f"Compiled setup for {label} is invalid: " + "; ".join(item.message for item in diagnostics)
        )

    trace = CompilerTrace(label=str(label), polarizers=polarizers, records=tuple(records))
    return setup, trace


def trace_to_json(trace: CompilerTrace) -> str:
    return trace.model_dump_json(indent=2) + "\n"
