"""Cross-checks of the permanent formula against the full emission-superposition model."""

from __future__ import annotations

import pytest

from src.components.physical_oracle import emission_oracle
from src.components.postselect_simulator import simulate, success_probability
from src.components.setup_compiler import compile_setup
from src.components.spin_algebra import CoupledLabel, enumerate_coupled_basis
from src.components.verification import fidelity
from src.config.settings import SimulationSettings
from src.models.setup import Fiber, OpticalSetup, Polarizer
from src.utils.exceptions import SimulationDomainError, SimulationResourceError


@pytest.mark.parametrize(
    ("fixture_name", "expected"),
    [("two_emitter_setup", 1 / 4), ("singlet_setup", 1 / 8), ("switch_setup", 1 / 24)],
)
def test_oracle_spot_probabilities(request, fixture_name, expected):
    setup = request.getfixturevalue(fixture_name)

    outcome = emission_oracle(setup)

    assert outcome.probability == pytest.approx(expected, rel=1e-12)
    assert fidelity(outcome.state, simulate(setup).state) == pytest.approx(1.0, abs=1e-10)


def test_single_emitter_probability_is_one_half():
    setup, _ = compile_setup(CoupledLabel.parse("1/2;-1/2"))

    outcome = emission_oracle(setup)

    assert outcome.probability == pytest.approx(0.5)
    assert outcome.state.allclose(outcome.state.basis("-"))


@pytest.mark.parametrize("n", range(1, 5))
def test_oracle_agrees_with_permanent_formula_on_compiled_setups(n):
    for label in enumerate_coupled_basis(n):
        setup, _ = compile_setup(label)
        outcome = emission_oracle(setup)

        assert fidelity(outcome.state, simulate(setup).state) >= 1 - 1e-10
        assert outcome.probability == pytest.approx(success_probability(setup), rel=1e-9)


def test_oracle_agrees_under_loss_and_quarter_turns():
    setup = OpticalSetup(
        n=3,
        polarizers=(Polarizer.SIGMA_PLUS, Polarizer.SIGMA_MINUS, Polarizer.SIGMA_MINUS),
        fibers=(
            Fiber(emitter=1, detector=1),
            Fiber(emitter=1, detector=2, phase_over_pi="1/2"),
            Fiber(emitter=2, detector=2),
            Fiber(emitter=2, detector=3, phase_over_pi="1/3"),
            Fiber(emitter=3, detector=1, phase_over_pi=1),
            Fiber(emitter=3, detector=3),
        ),
    )

    outcome = emission_oracle(setup, 0.3)

    assert outcome.probability == pytest.approx(success_probability(setup, 0.3), rel=1e-9)
    assert fidelity(outcome.state, simulate(setup).state) == pytest.approx(1.0, abs=1e-10)


def test_oracle_enforces_cap_and_efficiency_range(switch_setup, monkeypatch):
    monkeypatch.setenv("COUPLING_ORACLE_MAX_QUBITS", "2")

    with pytest.raises(SimulationDomainError):
        emission_oracle(switch_setup, 0.0)
    with pytest.raises(SimulationResourceError):
        emission_oracle(switch_setup)


def test_oracle_accepts_injected_settings(switch_setup, singlet_setup):
    tight = SimulationSettings(COUPLING_ORACLE_MAX_QUBITS=2, COUPLING_EFFICIENCY=0.5)

    with pytest.raises(SimulationResourceError):
        emission_oracle(switch_setup, settings=tight)
    assert emission_oracle(singlet_setup, settings=tight).probability == pytest.approx(0.5**2 / 8, rel=1e-9)
