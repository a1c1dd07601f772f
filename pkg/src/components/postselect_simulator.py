"""Projection of the emitters' qubits by the coincidence event 'each detector fires once'.

The coefficient of a detected bitstring b is the permanent of the N x N matrix
M_b[i][j] = e^{i phase(i, j)} if fiber (i, j) exists and detector j's filter
heralds bit i of b, else 0. Permanents are evaluated with Ryser's formula,
exactly in Gaussian integers whenever all phases are multiples of pi/2.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, NamedTuple, Union

import numpy as np

from src.components.optical_setup import require_valid
from src.components.spin_algebra import StateVector, bitstring, parse_bitstring
from src.config.settings import SimulationSettings, get_simulation_settings
from src.models.setup import OpticalSetup
from src.utils.exceptions import SimulationDomainError, SimulationResourceError

logger = logging.getLogger(__name__)

# float coefficients below this modulus are treated as cancelled
_FLOAT_ZERO = 1e-12


@dataclass(frozen=True, slots=True)
class GaussianInt:
    """Exact complex integer re + i*im."""

    re: int = 0
    im: int = 0

    def __add__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def norm(self) -> int:
        """Squared modulus."""

        return self.re * self.re + self.im * self.im


Coefficient = Union[GaussianInt, complex]


@dataclass(frozen=True, slots=True, eq=False)
class UnnormalizedProjection:
    """Nonzero coefficients per detected bitstring (basis index), before normalization."""

    n: int
    coefficients: Mapping[int, Coefficient]
    exact: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", MappingProxyType(dict(sorted(self.coefficients.items()))))

    def coefficient(self, key: str | int) -> Coefficient:
        index = parse_bitstring(key) if isinstance(key, str) else key
        default: Coefficient = GaussianInt() if self.exact else 0j
        return self.coefficients.get(index, default)

    @property
    def is_null(self) -> bool:
        return not self.coefficients

    def as_array(self) -> np.ndarray:
        amplitudes = np.zeros(1 << self.n, dtype=np.complex128)
        for index, value in self.coefficients.items():
            amplitudes[index] = complex(value)
        return amplitudes

    def squared_norm(self) -> int | float:
        if self.exact:
            return sum(value.norm() for value in self.coefficients.values())
        return float(sum(abs(value) ** 2 for value in self.coefficients.values()))

    def flipped(self) -> "UnnormalizedProjection":
        """Relabel every qubit |+> <-> |->."""

        mask = (1 << self.n) - 1
        return UnnormalizedProjection(
            self.n, {index ^ mask: value for index, value in self.coefficients.items()}, self.exact
        )

    def matches(self, other: "UnnormalizedProjection", tolerance: float = 1e-10) -> bool:
        if other.n != self.n:
            return False
        if self.exact and other.exact:
            return dict(self.coefficients) == dict(other.coefficients)
        return bool(np.allclose(self.as_array(), other.as_array(), rtol=0.0, atol=tolerance))

    def to_text(self) -> str:
        """One 'bitstring re im' line per nonzero coefficient, sorted by bitstring."""

        lines = []
        for index, value in self.coefficients.items():
            if isinstance(value, GaussianInt):
                re, im = str(value.re), str(value.im)
            else:
                re, im = repr(value.real + 0.0), repr(value.imag + 0.0)
            lines.append(f"{bitstring(index, self.n)} {re} {im}")
        return "\n".join(lines)


class SimulationResult(NamedTuple):
    projection: UnnormalizedProjection
    state: StateVector
    null_projection: bool


@lru_cache(maxsize=32)
def _ryser_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    subsets = np.arange(1, 1 << n)
    indicator = ((subsets[:, None] >> np.arange(n)) & 1).astype(np.int64)
    # (-1)^(n - |S|)
    signs = np.where((n - indicator.sum(axis=1)) % 2 == 0, 1, -1).astype(np.int64)
    indicator.setflags(write=False)
    signs.setflags(write=False)
    return indicator, signs


@lru_cache(maxsize=32)
def _bit_table(n: int) -> np.ndarray:
    indices = np.arange(1 << n)
    bits = (indices[:, None] >> np.arange(n - 1, -1, -1)) & 1
    bits.setflags(write=False)
    return bits


def _permanent_gaussian(real: np.ndarray, imag: np.ndarray) -> GaussianInt:
    indicator, signs = _ryser_tables(real.shape[0])
    sums_re = indicator @ real.T
    sums_im = indicator @ imag.T
    product_re = np.ones(indicator.shape[0], dtype=np.int64)
    product_im = np.zeros(indicator.shape[0], dtype=np.int64)
    for row in range(real.shape[0]):
        column_re, column_im = sums_re[:, row], sums_im[:, row]
        product_re, product_im = (
            product_re * column_re - product_im * column_im,
            product_re * column_im + product_im * column_re,
        )
    return GaussianInt(int(signs @ product_re), int(signs @ product_im))


def _permanent_complex(matrix: np.ndarray) -> complex:
    indicator, signs = _ryser_tables(matrix.shape[0])
    return complex(signs @ np.prod(indicator @ matrix.T, axis=1))


def _check_size(setup: OpticalSetup, cap: int, what: str) -> None:
    if setup.n > cap:
        raise SimulationResourceError(f"{what} is capped at {cap} emitters; setup has {setup.n}.")


def project(setup: OpticalSetup, *, settings: SimulationSettings | None = None) -> UnnormalizedProjection:
    """Coefficient of every bitstring via per-bitstring Ryser permanents."""

    settings = settings or get_simulation_settings()
    _check_size(setup, settings.max_qubits, "simulate")
    n = setup.n
    exact = setup.is_quarter_turn
    detector_bits = np.array([polarizer.projected_bit for polarizer in setup.polarizers])
    plus_count = int(np.count_nonzero(detector_bits == 0))

    if exact:
        real = np.zeros((n, n), dtype=np.int64)
        imag = np.zeros((n, n), dtype=np.int64)
        for fiber in setup.fibers:
            row, column = fiber.emitter - 1, fiber.detector - 1
            real[row, column], imag[row, column] = fiber.gaussian_unit()
    else:
        weights = np.zeros((n, n), dtype=np.complex128)
        for fiber in setup.fibers:
            weights[fiber.emitter - 1, fiber.detector - 1] = fiber.phase_factor()

    coefficients: dict[int, Coefficient] = {}
    for index, bits in enumerate(_bit_table(n)):
        if n - int(bits.sum()) != plus_count:
            continue
        compatible = bits[:, None] == detector_bits[None, :]
        if exact:
            value = _permanent_gaussian(real * compatible, imag * compatible)
            if value:
                coefficients[index] = value
        else:
            value = _permanent_complex(weights * compatible)
            if abs(value) > _FLOAT_ZERO:
                coefficients[index] = value

    return UnnormalizedProjection(n, coefficients, exact)


def simulate(setup: OpticalSetup, *, settings: SimulationSettings | None = None) -> SimulationResult:
    """Post-selected projection of ``setup`` and the normalized N-qubit state it heralds."""

    require_valid(setup)
    projection = project(setup, settings=settings)
    if projection.is_null:
        logger.warning("Setup with %s emitters post-selects nothing (all coefficients cancel)", setup.n)
        return SimulationResult(projection, StateVector(setup.n, np.zeros(1 << setup.n)), True)

    state = StateVector(setup.n, projection.as_array()).normalize()
    return SimulationResult(projection, state, False)


def simulate_bruteforce(setup: OpticalSetup, *, settings: SimulationSettings | None = None) -> UnnormalizedProjection:
    """Reference projection by enumerating all N! emitter -> detector assignments."""

    settings = settings or get_simulation_settings()
    _check_size(setup, settings.bruteforce_max_qubits, "simulate_bruteforce")
    n = setup.n
    fibers = setup.fiber_map()
    exact = setup.is_quarter_turn
    units = (1, 1j, -1, -1j)
    totals: dict[int, complex] = {}
    exact_totals: dict[int, list[int]] = {}

    for assignment in itertools.permutations(range(1, n + 1)):
        path = [fibers.get((emitter, detector)) for emitter, detector in enumerate(assignment, start=1)]
        if any(fiber is None for fiber in path):
            continue

        index = 0
        for detector in assignment:
            index = (index << 1) | setup.polarizers[detector - 1].projected_bit

        if exact:
            turns = sum(fiber.quarter_turns() for fiber in path) % 4
            unit = units[turns]
            accumulator = exact_totals.setdefault(index, [0, 0])
            accumulator[0] += int(unit.real)
            accumulator[1] += int(unit.imag)
        else:
            amplitude = complex(1.0)
            for fiber in path:
                amplitude *= fiber.phase_factor()
            totals[index] = totals.get(index, 0j) + amplitude

    if exact:
        coefficients: dict[int, Coefficient] = {
            index: GaussianInt(re, im) for index, (re, im) in exact_totals.items() if re or im
        }
    else:
        coefficients = {index: value for index, value in totals.items() if abs(value) > _FLOAT_ZERO}
    return UnnormalizedProjection(n, coefficients, exact)


def path_weight(setup: OpticalSetup) -> Fraction:
    """prod_i 1/(2 deg_i): 1/sqrt(2) per decay channel and 1/sqrt(deg_i) per fiber, squared."""

    weight = Fraction(1)
    for emitter in range(1, setup.n + 1):
        weight /= 2 * setup.degree(emitter)
    return weight


def success_probability(
    setup: OpticalSetup,
    per_photon_efficiency: float | None = None,
    *,
    projection: UnnormalizedProjection | None = None,
    settings: SimulationSettings | None = None,
) -> float:
    """Probability of the coincidence event under the equal-splitting model convention.

    eta^N * sum_b |coefficient(b)|^2 * prod_i 1/(2 deg_i).
    """

    settings = settings or get_simulation_settings()
    efficiency = settings.resolved_efficiency(per_photon_efficiency)
    if not 0.0 < efficiency <= 1.0:
        raise SimulationDomainError(f"Per-photon efficiency must lie in (0, 1], got {efficiency!r}.")

    require_valid(setup)
    if projection is None:
        projection = project(setup, settings=settings)

    norm = projection.squared_norm()
    if isinstance(norm, int):
        lossless = float(Fraction(norm) * path_weight(setup))
    else:
        lossless = norm * float(path_weight(setup))
    return lossless * efficiency**setup.n
