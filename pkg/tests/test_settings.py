"""Unit tests for simulation and report settings."""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from src.config import settings


def test_simulation_defaults(monkeypatch):
    for name in ("COUPLING_TOLERANCE", "COUPLING_MAX_QUBITS", "COUPLING_EFFICIENCY"):
        monkeypatch.delenv(name, raising=False)

    cfg = settings.get_simulation_settings()

    assert cfg.tolerance == 1e-10
    assert cfg.max_qubits == 12
    assert cfg.bruteforce_max_qubits == 10
    assert cfg.oracle_max_qubits == 4
    assert cfg.efficiency == 1.0


def test_simulation_settings_read_environment(monkeypatch):
    monkeypatch.setenv("COUPLING_TOLERANCE", "1e-6")
    monkeypatch.setenv("COUPLING_EFFICIENCY", "0.25")

    cfg = settings.get_simulation_settings()

    assert cfg.resolved_tolerance() == 1e-6
    assert cfg.resolved_tolerance(1e-3) == 1e-3
    assert cfg.resolved_efficiency() == 0.25
    assert cfg.resolved_efficiency(0.5) == 0.5


def test_non_positive_tolerance_falls_back(monkeypatch):
    monkeypatch.setenv("COUPLING_TOLERANCE", "0")

    assert settings.get_simulation_settings().resolved_tolerance(-1.0) == 1e-10


def test_report_settings_normalise_strings(monkeypatch):
    monkeypatch.setenv("COUPLING_OUTPUT_FORMAT", " JSON ")
    monkeypatch.setenv("COUPLING_LOG_LEVEL", "debug")

    cfg = settings.get_report_settings()

    assert cfg.output_format == "json"
    assert cfg.log_level == "DEBUG"


def test_report_settings_reject_unknown_format(monkeypatch):
    monkeypatch.setenv("COUPLING_OUTPUT_FORMAT", "xml")

    with pytest.raises(ValidationError):
        settings.get_report_settings()


def test_worker_resolution(monkeypatch):
    monkeypatch.setenv("COUPLING_SWEEP_WORKERS", "0")

    cfg = settings.get_report_settings()

    assert cfg.resolved_workers() == 1
    assert cfg.resolved_workers(4) == 4
