"""Test configuration for pytest."""

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from src.config import settings  # noqa: E402
from src.models.setup import Fiber, OpticalSetup, Polarizer  # noqa: E402

MINUS = Polarizer.SIGMA_MINUS
PLUS = Polarizer.SIGMA_PLUS


@pytest.fixture(autouse=True)
def clear_settings_cache():
    settings.get_simulation_settings.cache_clear()
    settings.get_report_settings.cache_clear()
    yield
    settings.get_simulation_settings.cache_clear()
    settings.get_report_settings.cache_clear()


@pytest.fixture
def two_emitter_setup() -> OpticalSetup:
    """Both emitters wired to both detectors, both filters σ-: heralds |++>."""

    return OpticalSetup(
        n=2,
        polarizers=(MINUS, MINUS),
        fibers=tuple(Fiber(emitter=e, detector=d) for e in (1, 2) for d in (1, 2)),
    )


@pytest.fixture
def singlet_setup() -> OpticalSetup:
    return OpticalSetup(
        n=2,
        polarizers=(MINUS, PLUS),
        fibers=(
            Fiber(emitter=1, detector=1),
            Fiber(emitter=1, detector=2),
            Fiber(emitter=2, detector=1, phase_over_pi=1),
            Fiber(emitter=2, detector=2),
        ),
    )


@pytest.fixture
def switch_setup() -> OpticalSetup:
    """Three emitters; the third acts as a switch and heralds 2|++-> - |+-+> - |-++>."""

    return OpticalSetup(
        n=3,
        polarizers=(MINUS, PLUS, MINUS),
        fibers=(
            Fiber(emitter=1, detector=1),
            Fiber(emitter=1, detector=2),
            Fiber(emitter=1, detector=3),
            Fiber(emitter=2, detector=1),
            Fiber(emitter=2, detector=2),
            Fiber(emitter=2, detector=3),
            Fiber(emitter=3, detector=2),
            Fiber(emitter=3, detector=3, phase_over_pi=1),
        ),
    )
