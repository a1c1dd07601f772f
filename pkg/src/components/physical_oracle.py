"""Full emission-superposition model of the coincidence measurement.

Every emitter decays to |+> emitting a σ- photon or to |-> emitting a σ+
photon, amplitude 1/sqrt(2) each. The photon enters one of the emitter's
fibers with amplitude e^{i phase}/sqrt(deg) and survives with amplitude
sqrt(eta). Bosonic amplitudes of indistinguishable photon configurations are
added before projecting onto 'one photon per detector, passing its filter'.

Cost grows as prod_i (2 deg_i), so the model is kept to a handful of emitters.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import NamedTuple

import numpy as np

from src.components.optical_setup import require_valid
from src.components.spin_algebra import StateVector
from src.config.settings import SimulationSettings, get_simulation_settings
from src.models.setup import OpticalSetup, Polarizer
from src.utils.exceptions import SimulationDomainError, SimulationResourceError

logger = logging.getLogger(__name__)

# photon polarization emitted when the emitter decays to bit 0 (|+>) or bit 1 (|->)
_EMITTED = (Polarizer.SIGMA_MINUS, Polarizer.SIGMA_PLUS)


class OracleOutcome(NamedTuple):
    state: StateVector
    probability: float
    accepted_configurations: int


def _channels(setup: OpticalSetup, emitter: int, efficiency: float) -> list[tuple[int, tuple[int, Polarizer], complex]]:
    fibers = setup.fibers_of(emitter)
    scale = math.sqrt(efficiency / (2 * len(fibers)))
    return [
        (bit, (fiber.detector, _EMITTED[bit]), scale * fiber.phase_factor())
        for bit in (0, 1)
        for fiber in fibers
    ]


def emission_oracle(
    setup: OpticalSetup,
    per_photon_efficiency: float | None = None,
    *,
    settings: SimulationSettings | None = None,
) -> OracleOutcome:
    """Conditional atomic state and probability of the all-detectors-click event."""

    settings = settings or get_simulation_settings()
    efficiency = settings.resolved_efficiency(per_photon_efficiency)
    if not 0.0 < efficiency <= 1.0:
        raise SimulationDomainError(f"Per-photon efficiency must lie in (0, 1], got {efficiency!r}.")
    if setup.n > settings.oracle_max_qubits:
        raise SimulationResourceError(
            f"emission_oracle is capped at {settings.oracle_max_qubits} emitters; setup has {setup.n}."
        )
    require_valid(setup)

    n = setup.n
    accepted_modes = tuple((detector, polarizer) for detector, polarizer in enumerate(setup.polarizers, start=1))
    per_emitter = [_channels(setup, emitter, efficiency) for emitter in range(1, n + 1)]

    # (atomic basis index, sorted photon modes) -> amplitude
    superposition: dict[tuple[int, tuple[tuple[int, Polarizer], ...]], complex] = {}
    for history in itertools.product(*per_emitter):
        index = 0
        amplitude = complex(1.0)
        for bit, _, factor in history:
            index = (index << 1) | bit
            amplitude *= factor
        modes = tuple(sorted((mode for _, mode, _ in history), key=lambda mode: (mode[0], mode[1].value)))
        key = (index, modes)
        superposition[key] = superposition.get(key, 0j) + amplitude

    amplitudes = np.zeros(1 << n, dtype=np.complex128)
    accepted = 0
    for (index, modes), amplitude in superposition.items():
        if modes != accepted_modes:
            continue
        amplitudes[index] += amplitude
        accepted += 1

    probability = float(np.vdot(amplitudes, amplitudes).real)
    logger.debug("Emission oracle: %s accepted configurations, probability %s", accepted, probability)
    if probability == 0.0:
        logger.warning("Emission oracle found no accepted configuration for a %s-emitter setup", n)
        return OracleOutcome(StateVector(n, amplitudes), 0.0, 0)
    return OracleOutcome(StateVector(n, amplitudes / math.sqrt(probability)), probability, accepted)
