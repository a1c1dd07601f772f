"""Compare compiled and simulated states against Clebsch-Gordan references."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from src.components.postselect_simulator import simulate, success_probability
from src.components.setup_compiler import compile_setup
from src.components.spin_algebra import CoupledLabel, StateVector, build_reference_state, enumerate_coupled_basis
from src.config.settings import get_report_settings, get_simulation_settings
from src.models.report import (
    EXACT_FIDELITY_FLOOR,
    DegreeStudyRecord,
    SweepReport,
    SweepSummary,
    VerificationReport,
)
from src.models.setup import Fiber, OpticalSetup
from src.utils.exceptions import ReportExportError, SpinDomainError

logger = logging.getLogger(__name__)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for normalized states."""

    return abs(a.inner(b)) ** 2


def _phase_aligned(amplitudes: np.ndarray, anchor: int) -> np.ndarray:
    pivot = amplitudes[anchor]
    return amplitudes * (np.conj(pivot) / abs(pivot))


def matches_up_to_phase(state: StateVector, reference: StateVector, tolerance: float) -> bool:
    """Amplitude-wise equality after making the first nonzero reference amplitude real-positive in both."""

    if state.n_qubits != reference.n_qubits:
        return False
    nonzero = np.flatnonzero(np.abs(reference.amplitudes) > tolerance)
    if nonzero.size == 0:
        return False
    anchor = int(nonzero[0])
    if abs(state.amplitudes[anchor]) <= tolerance:
        return False
    return bool(
        np.allclose(
            _phase_aligned(state.amplitudes, anchor),
            _phase_aligned(reference.amplitudes, anchor),
            rtol=0.0,
            atol=tolerance,
        )
    )


def _verify(
    label: CoupledLabel,
    tolerance: float | None = None,
    per_photon_efficiency: float | None = None,
) -> tuple[VerificationReport, np.ndarray]:
    tol = get_simulation_settings().resolved_tolerance(tolerance)
    setup, _ = compile_setup(label)
    result = simulate(setup)
    probability = success_probability(setup, per_photon_efficiency, projection=result.projection)
    reference = build_reference_state(label)

    if result.null_projection:
        score, exact = 0.0, False
    else:
        score = fidelity(reference, result.state)
        exact = score >= EXACT_FIDELITY_FLOOR and matches_up_to_phase(result.state, reference, tol)

    report = VerificationReport(
        label=str(label),
        history=label.doubled_history(),
        two_m=label.m.twice_value,
        fidelity=score,
        exact_match=exact,
        success_probability=probability,
        null_projection=result.null_projection,
    )
    if not exact:
        logger.debug("Label %s did not verify: fidelity %s", label, score)
    return report, np.array(result.state.amplitudes)


def verify_label(
    label: CoupledLabel,
    tolerance: float | None = None,
    per_photon_efficiency: float | None = None,
) -> VerificationReport:
    """Compile, simulate and compare ``label`` with its reference state."""

    report, _ = _verify(label, tolerance, per_photon_efficiency)
    return report


def _verify_job(job: tuple[str, float | None, float | None]) -> tuple[VerificationReport, np.ndarray]:
    label, tolerance, per_photon_efficiency = job
    return _verify(CoupledLabel.parse(label), tolerance, per_photon_efficiency)


def gram_deviation(states: Sequence[StateVector | np.ndarray]) -> float:
    """Largest entry of |G - 1| for the Gram matrix of ``states``."""

    if not states:
        return 0.0
    rows = np.array([state.amplitudes if isinstance(state, StateVector) else state for state in states])
    gram = rows.conj() @ rows.T
    return float(np.max(np.abs(gram - np.eye(len(rows)))))


def sweep_basis(
    n: int,
    tolerance: float | None = None,
    per_photon_efficiency: float | None = None,
    workers: int | None = None,
) -> SweepReport:
    """Verify every label of the n-qubit coupled basis, in enumeration order."""

    report_settings = get_report_settings()
    cap = report_settings.sweep_max_qubits
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= cap:
        raise SpinDomainError(f"Sweep size must be an integer in 1..{cap}, got {n!r}.")

    labels = enumerate_coupled_basis(n)
    jobs = [(str(label), tolerance, per_photon_efficiency) for label in labels]
    worker_count = report_settings.resolved_workers(workers)
    if worker_count > 1:
        with ProcessPoolExecutor(max_workers=worker_count) as executor:
            outcomes = list(executor.map(_verify_job, jobs))
    else:
        outcomes = [_verify_job(job) for job in jobs]

    reports = tuple(report for report, _ in outcomes)
    probabilities = [report.success_probability for report in reports]
    summary = SweepSummary(
        n=n,
        labels=len(reports),
        exact_matches=sum(1 for report in reports if report.exact_match),
        min_fidelity=min(report.fidelity for report in reports),
        min_success_probability=min(probabilities),
        max_success_probability=max(probabilities),
        gram_deviation=gram_deviation([amplitudes for _, amplitudes in outcomes]),
    )
    logger.info(
        "Swept %s labels for n=%s: %s exact, min fidelity %s",
        summary.labels,
        n,
        summary.exact_matches,
        summary.min_fidelity,
    )
    return SweepReport(summary=summary, reports=reports)


def write_csv(report: SweepReport, path: Path) -> None:
    try:
        Path(path).write_text(report.to_csv(), encoding="utf-8")
    except OSError as exc:
        raise ReportExportError(f"Failed to write CSV report to {path}.") from exc


def _with_extra_fiber(setup: OpticalSetup, emitter: int, detector: int) -> OpticalSetup:
    return OpticalSetup(
        n=setup.n,
        polarizers=setup.polarizers,
        fibers=setup.fibers + (Fiber(emitter=emitter, detector=detector),),
    )


def degree_study(n: int, per_photon_efficiency: float | None = None) -> list[DegreeStudyRecord]:
    """Add each absent phase-free fiber to every compiled setup up to n emitters and compare.

    Report only: records whether the heralded state survives and whether the
    success probability stayed put or dropped.
    """

    cap = get_report_settings().sweep_max_qubits
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= cap:
        raise SpinDomainError(f"Degree study size must be an integer in 1..{cap}, got {n!r}.")

    tolerance = get_simulation_settings().resolved_tolerance()
    records: list[DegreeStudyRecord] = []
    for size in range(1, n + 1):
        for label in enumerate_coupled_basis(size):
            setup, _ = compile_setup(label)
            base = simulate(setup)
            base_probability = success_probability(setup, per_photon_efficiency, projection=base.projection)
            existing = setup.fiber_map()

            for emitter in range(1, size + 1):
                for detector in range(1, size + 1):
                    if (emitter, detector) in existing:
                        continue
                    extended_setup = _with_extra_fiber(setup, emitter, detector)
                    extended = simulate(extended_setup)
                    extended_probability = success_probability(
                        extended_setup, per_photon_efficiency, projection=extended.projection
                    )
                    preserved = not extended.null_projection and (
                        fidelity(base.state, extended.state) >= EXACT_FIDELITY_FLOOR
                    )
                    monotone = extended_probability <= base_probability + tolerance
                    if not monotone:
                        logger.warning(
                            "Extra fiber (%s, %s) on %s raised success probability from %s to %s",
                            emitter,
                            detector,
                            label,
                            base_probability,
                            extended_probability,
                        )
                    records.append(
                        DegreeStudyRecord(
                            label=str(label),
                            emitter=emitter,
                            detector=detector,
                            base_probability=base_probability,
                            extended_probability=extended_probability,
                            state_preserved=preserved,
                            monotone=monotone,
                        )
                    )
    return records
