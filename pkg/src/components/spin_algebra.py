"""Exact quantum-number bookkeeping and Clebsch-Gordan reference states.

Half-integers are stored doubled so all quantum-number arithmetic stays in
integers. Relative signs follow the Condon-Shortley convention.

Bit convention, used by every module: qubit 1 is the most significant bit of
a basis index, bit 0 is |+> and bit 1 is |->. Text forms write qubit 1
leftmost with the characters '+' and '-'.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from src.config.settings import get_simulation_settings
from src.utils.exceptions import SimulationDomainError, SpinDomainError

logger = logging.getLogger(__name__)

_BIT_TO_CHAR = {"0": "+", "1": "-"}
_CHAR_TO_BIT = {"+": "0", "-": "1", "\u2212": "1"}


@dataclass(frozen=True, slots=True, order=True)
class HalfInt:
    """A half-integer quantum number stored as twice its value."""

    twice_value: int

    def __post_init__(self) -> None:
        if isinstance(self.twice_value, bool) or not isinstance(self.twice_value, (int, np.integer)):
            raise SpinDomainError(f"HalfInt expects an integer doubled value, got {self.twice_value!r}.")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse '1/2', '-3/2', '+1' or '0' into a HalfInt."""

        raw = text.strip()
        try:
            value = Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpinDomainError(f"Not a half-integer: {text!r}.") from exc

        doubled = 2 * value
        if doubled.denominator != 1:
            raise SpinDomainError(f"Not a half-integer: {text!r}.")
        return cls(int(doubled))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def history_violation(twice_spins: Sequence[int]) -> str | None:
    """Return why a doubled-spin sequence is not a coupling history, or None."""

    if not twice_spins:
        return "coupling history must contain at least one spin"
    if twice_spins[0] != 1:
        return "S1 must be 1/2"
    for index in range(1, len(twice_spins)):
        previous, current = twice_spins[index - 1], twice_spins[index]
        if current < 0:
            return f"S{index + 1} must be non-negative"
        if abs(current - previous) != 1:
            return f"S{index + 1} must differ from S{index} by exactly 1/2"
    return None


def label_violation(twice_spins: Sequence[int], twice_m: int) -> str | None:
    """Return why (history, m) does not name a coupled-basis state, or None."""

    reason = history_violation(twice_spins)
    if reason:
        return reason
    final = twice_spins[-1]
    if abs(twice_m) > final:
        return f"|m| = {HalfInt(abs(twice_m))} exceeds S{len(twice_spins)} = {HalfInt(final)}"
    if (twice_m - len(twice_spins)) % 2:
        return f"m = {HalfInt(twice_m)} has the wrong parity for {len(twice_spins)} qubits"
    return None


@dataclass(frozen=True, slots=True)
class CouplingHistory:
    """Intermediate total spins S1..SN obtained by adding one qubit at a time."""

    spins: tuple[HalfInt, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "spins", tuple(self.spins))
        reason = history_violation(self.twice_values)
        if reason:
            raise SpinDomainError(f"Invalid coupling history: {reason}.")

    @classmethod
    def from_twice(cls, twice_spins: Sequence[int]) -> "CouplingHistory":
        return cls(tuple(HalfInt(value) for value in twice_spins))

    @property
    def n(self) -> int:
        return len(self.spins)

    @property
    def twice_values(self) -> tuple[int, ...]:
        return tuple(spin.twice_value for spin in self.spins)

    @property
    def final(self) -> HalfInt:
        return self.spins[-1]

    def step(self, index: int) -> int:
        """Return +1 if S_index > S_(index-1), else -1 (1-based, index >= 2)."""

        if not 2 <= index <= self.n:
            raise SpinDomainError(f"Step index {index} outside 2..{self.n}.")
        return self.spins[index - 1].twice_value - self.spins[index - 2].twice_value

    def __str__(self) -> str:
        return ",".join(str(spin) for spin in self.spins)


@dataclass(frozen=True, slots=True)
class CoupledLabel:
    """Unambiguous name |S1,...,SN; m> of one coupled-basis state."""

    history: CouplingHistory
    m: HalfInt

    def __post_init__(self) -> None:
        reason = label_violation(self.history.twice_values, self.m.twice_value)
        if reason:
            raise SpinDomainError(f"Invalid coupled label: {reason}.")

    @classmethod
    def from_twice(cls, twice_spins: Sequence[int], twice_m: int) -> "CoupledLabel":
        return cls(CouplingHistory.from_twice(twice_spins), HalfInt(twice_m))

    @classmethod
    def parse(cls, text: str) -> "CoupledLabel":
        """Parse `S1,...,SN;m` (halves as 'p/2') or the doubled alias `d:1,2,1;1`."""

        raw = text.strip()
        doubled = raw.startswith("d:")
        if doubled:
            raw = raw[2:]

        parts = raw.split(";")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise SpinDomainError(f"Label {text!r} must look like 'S1,S2,...,SN;m'.")

        spin_texts = [item for item in parts[0].split(",")]
        if doubled:
            try:
                twice_spins = [int(item) for item in spin_texts]
                twice_m = int(parts[1])
            except ValueError as exc:
                raise SpinDomainError(f"Doubled label {text!r} must contain integers only.") from exc
        else:
            twice_spins = [HalfInt.parse(item).twice_value for item in spin_texts]
            twice_m = HalfInt.parse(parts[1]).twice_value

        return cls.from_twice(twice_spins, twice_m)

    @property
    def n(self) -> int:
        return self.history.n

    @property
    def total_spin(self) -> HalfInt:
        return self.history.final

    def doubled_history(self) -> str:
        """Doubled spins joined by spaces, the CSV `history` column."""

        return " ".join(str(value) for value in self.history.twice_values)

    def __str__(self) -> str:
        return f"{self.history};{self.m}"


def bitstring(index: int, n: int) -> str:
    """Render a basis index as '+'/'-' characters, qubit 1 leftmost."""

    return format(index, f"0{n}b").translate(str.maketrans(_BIT_TO_CHAR))


def parse_bitstring(text: str) -> int:
    """Inverse of :func:`bitstring`."""

    if not text or any(char not in _CHAR_TO_BIT for char in text):
        raise SpinDomainError(f"Bitstring {text!r} must consist of '+' and '-' only.")
    return int("".join(_CHAR_TO_BIT[char] for char in text), 2)


@dataclass(frozen=True, slots=True, eq=False)
class StateVector:
    """Dense complex amplitudes over the 2^N product basis of |+>/|-> qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise SimulationDomainError("A state needs at least one qubit.")
        data = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if data.shape != (1 << self.n_qubits,):
            raise SimulationDomainError(
                f"Expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, got {data.size}."
            )
        data.setflags(write=False)
        object.__setattr__(self, "amplitudes", data)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        amplitudes = np.zeros(1 << len(bits), dtype=np.complex128)
        amplitudes[parse_bitstring(bits)] = 1.0
        return cls(len(bits), amplitudes)

    @classmethod
    def from_text(cls, n_qubits: int, text: str) -> "StateVector":
        """Parse 'bitstring re im' lines; missing bitstrings are zero."""

        amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 3 or len(fields[0]) != n_qubits:
                raise SimulationDomainError(f"Line {line_number}: expected '<bitstring> <re> <im>'.")
            amplitudes[parse_bitstring(fields[0])] = complex(float(fields[1]), float(fields[2]))
        return cls(n_qubits, amplitudes)

    def bitstring(self, index: int) -> str:
        return bitstring(index, self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tolerance: float = 1e-12) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= tolerance

    def normalize(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise SimulationDomainError("Cannot normalize the zero vector.")
        return StateVector(self.n_qubits, self.amplitudes / norm)

    def inner(self, other: "StateVector") -> complex:
        """Return <self|other>."""

        if other.n_qubits != self.n_qubits:
            raise SimulationDomainError(
                f"Dimension mismatch: {self.n_qubits} qubits vs {other.n_qubits} qubits."
            )
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def allclose(self, other: "StateVector", tolerance: float = 1e-10) -> bool:
        return other.n_qubits == self.n_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=tolerance)
        )

    def to_text(self, threshold: float = 1e-15) -> str:
        lines = []
        for index, amplitude in enumerate(self.amplitudes):
            if abs(amplitude) <= threshold:
                continue
            lines.append(
                f"{bitstring(index, self.n_qubits)} {_format_float(amplitude.real)} {_format_float(amplitude.imag)}"
            )
        return "\n".join(lines)


def _format_float(value: float) -> str:
    # normalises -0.0
    return repr(float(value) + 0.0)


def cg_coefficient(j: HalfInt, m_total: HalfInt, delta_j: int, m2: int) -> float:
    """Return <j, m_total - m2; 1/2, m2 | j + delta_j/2, m_total> (Condon-Shortley).

    ``delta_j`` and ``m2`` are signs (+1 or -1) standing for +-1/2.
    """

    if delta_j not in (1, -1) or m2 not in (1, -1):
        raise SpinDomainError("delta_j and m2 must be +1 or -1 (meaning +-1/2).")

    twice_j, twice_m = j.twice_value, m_total.twice_value
    if twice_j < 0:
        raise SpinDomainError(f"Spin j = {j} must be non-negative.")
    if delta_j == -1 and twice_j < 1:
        raise SpinDomainError("Coupling down to j - 1/2 requires j >= 1/2.")
    if (twice_j + twice_m) % 2 == 0:
        raise SpinDomainError(f"m_total = {m_total} has the wrong parity for j = {j} coupled to 1/2.")
    if abs(twice_m) > twice_j + 1:
        raise SpinDomainError(f"|m_total| = {HalfInt(abs(twice_m))} exceeds j + 1/2.")
    if abs(twice_m - m2) > twice_j:
        raise SpinDomainError(f"Implied m1 = {HalfInt(twice_m - m2)} is outside -j..j for j = {j}.")

    plus = Fraction(twice_j + twice_m + 1, 2 * (twice_j + 1))
    minus = Fraction(twice_j - twice_m + 1, 2 * (twice_j + 1))

    if delta_j == 1:
        return math.sqrt(plus) if m2 == 1 else math.sqrt(minus)
    return -math.sqrt(minus) if m2 == 1 else math.sqrt(plus)


def _single_qubit(twice_m: int) -> np.ndarray:
    return np.array([1.0, 0.0]) if twice_m == 1 else np.array([0.0, 1.0])


@lru_cache(maxsize=8192)
def _coupled_amplitudes(twice_spins: tuple[int, ...], twice_m: int) -> np.ndarray:
    if len(twice_spins) == 1:
        result = _single_qubit(twice_m)
        result.setflags(write=False)
        return result

    parent_spins = twice_spins[:-1]
    parent = parent_spins[-1]
    delta = twice_spins[-1] - parent
    result = np.zeros(1 << len(twice_spins))
    for twice_m2 in (1, -1):
        parent_m = twice_m - twice_m2
        if abs(parent_m) > parent:
            continue
        coefficient = cg_coefficient(HalfInt(parent), HalfInt(twice_m), delta, twice_m2)
        if coefficient == 0.0:
            continue
        result += coefficient * np.kron(_coupled_amplitudes(parent_spins, parent_m), _single_qubit(twice_m2))

    result.setflags(write=False)
    return result


def build_reference_state(label: CoupledLabel) -> StateVector:
    """Build |S1..SN; m> by recursive Clebsch-Gordan coupling (real amplitudes)."""

    cap = get_simulation_settings().max_qubits
    if label.n > cap:
        raise SpinDomainError(f"Label has {label.n} qubits; the configured cap is {cap}.")
    return StateVector(label.n, _coupled_amplitudes(label.history.twice_values, label.m.twice_value))


def _histories(n: int) -> Iterator[tuple[int, ...]]:
    def extend(prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        last = prefix[-1]
        if last > 0:
            yield from extend(prefix + (last - 1,))
        yield from extend(prefix + (last + 1,))

    yield from extend((1,))


def enumerate_coupled_basis(n: int) -> list[CoupledLabel]:
    """All 2^n labels, lexicographic in the doubled-spin history, then ascending m."""

    cap = get_simulation_settings().max_qubits
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= cap:
        raise SpinDomainError(f"Number of qubits must be an integer in 1..{cap}, got {n!r}.")

    labels = [
        CoupledLabel.from_twice(history, twice_m)
        for history in _histories(n)
        for twice_m in range(-history[-1], history[-1] + 1, 2)
    ]
    logger.debug("Enumerated %s coupled-basis labels for n=%s", len(labels), n)
    return labels


@lru_cache(maxsize=16)
def _popcounts(n: int) -> np.ndarray:
    indices = np.arange(1 << n)
    counts = ((indices[:, None] >> np.arange(n)) & 1).sum(axis=1)
    counts.setflags(write=False)
    return counts


def _swap(amplitudes: np.ndarray, n: int, first: int, second: int) -> np.ndarray:
    tensor = amplitudes.reshape((2,) * n)
    return np.swapaxes(tensor, first, second).reshape(-1)


def total_sz(state: StateVector) -> StateVector:
    """Apply S_z = sum_i sigma_z^(i)/2."""

    n = state.n_qubits
    diagonal = (n - 2 * _popcounts(n)) / 2.0
    return StateVector(n, diagonal * state.amplitudes)


def subsystem_spin_squared(state: StateVector, k: int) -> StateVector:
    """Apply S^2 of the first k qubits, written as k(4-k)/4 + sum of pairwise swaps."""

    n = state.n_qubits
    if not 1 <= k <= n:
        raise SimulationDomainError(f"Subsystem size {k} outside 1..{n}.")
    result = (k * (4 - k) / 4.0) * state.amplitudes
    for first in range(k):
        for second in range(first + 1, k):
            result = result + _swap(state.amplitudes, n, first, second)
    return StateVector(n, result)


def total_spin_squared(state: StateVector) -> StateVector:
    """Apply S^2 = sum_{i,j} S^(i) . S^(j) on all qubits."""

    return subsystem_spin_squared(state, state.n_qubits)
