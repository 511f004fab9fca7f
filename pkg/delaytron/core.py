"""Dense state-vector and density-matrix algebra for small registers.

Basis ordering: qubit 0 is the most significant bit of the basis index, so the
bitstring of index ``i`` reads ``q[0] q[1] ... q[n-1]``.

All values are immutable and every operation returns a new value.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    ImpossiblePostSelectionError,
    InvalidStateError,
    NonFiniteStateError,
    QubitIndexError,
    SimulationError,
    SubsystemError,
)
from .gates import GateOp

logger = logging.getLogger(__name__)

MAX_QUBITS = 4

# Tolerances
ATOL_ALGEBRAIC = 1e-12
ATOL_COMPOSED = 1e-10
IMAG_GUARD = 1e-9
PSD_SLACK = 1e-10
IMPOSSIBLE_BRANCH = 1e-14


def _check_register(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise SimulationError(
            f"Register size {n_qubits} is outside the supported range [1, {MAX_QUBITS}]"
        )


def _check_qubits(qubits: Iterable[int], n_qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise QubitIndexError(f"Qubit index {q} out of range for {n_qubits} qubit(s)")


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def bitstring(index: int, n_qubits: int) -> str:
    """Basis label of ``index``, qubit 0 first."""
    return format(index, f"0{n_qubits}b")


def _apply_local(
    vectors: np.ndarray, operator: np.ndarray, qubits: Sequence[int], n_qubits: int
) -> np.ndarray:
    """Apply a k-qubit operator to every column of a ``(2^n, m)`` array."""
    k = len(qubits)
    columns = vectors.shape[1]
    tensor = vectors.reshape([2] * n_qubits + [columns])
    tensor = np.moveaxis(tensor, list(qubits), list(range(k)))
    shape = tensor.shape
    tensor = (operator @ tensor.reshape(2 ** k, -1)).reshape(shape)
    tensor = np.moveaxis(tensor, list(range(k)), list(qubits))
    return tensor.reshape(2 ** n_qubits, columns)


def embed_operator(operator: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Lift a k-qubit operator on ``qubits`` to the full 2^n-dimensional space."""
    _check_qubits(qubits, n_qubits)
    if operator.shape != (2 ** len(qubits), 2 ** len(qubits)):
        raise SimulationError(
            f"Operator of shape {operator.shape} does not act on {len(qubits)} qubit(s)"
        )
    return _apply_local(np.eye(2 ** n_qubits, dtype=complex), operator, qubits, n_qubits)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_register(self.n_qubits)
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        if amplitudes.shape[0] != 2 ** self.n_qubits:
            raise InvalidStateError(
                f"Expected {2 ** self.n_qubits} amplitudes, got {amplitudes.shape[0]}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise NonFiniteStateError("State vector has non-finite amplitudes")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > ATOL_ALGEBRAIC:
            raise InvalidStateError(f"State vector is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The all-zero basis state |0...0>."""
        _check_register(n_qubits)
        amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
        amplitudes[0] = 1.0
        return cls(n_qubits, amplitudes)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state for a bitstring such as ``"01"``."""
        if not bits or set(bits) - {"0", "1"}:
            raise InvalidStateError(f"Invalid basis label: {bits!r}")
        amplitudes = np.zeros(2 ** len(bits), dtype=complex)
        amplitudes[int(bits, 2)] = 1.0
        return cls(len(bits), amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], normalize: bool = False) -> "StateVector":
        """Build a state from raw amplitudes, optionally renormalizing them."""
        array = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n_qubits = int(round(np.log2(array.shape[0]))) if array.shape[0] else 0
        if array.shape[0] != 2 ** n_qubits:
            raise InvalidStateError(f"Amplitude count {array.shape[0]} is not a power of two")
        if normalize:
            norm = np.linalg.norm(array)
            if norm == 0.0 or not np.isfinite(norm):
                raise InvalidStateError("Cannot normalize a zero or non-finite vector")
            array = array / norm
        return cls(n_qubits, array)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        """|amplitude|^2 for each basis index."""
        return np.abs(self.amplitudes) ** 2

    def tensor(self, other: "StateVector") -> "StateVector":
        """Product state with ``self`` on the leading qubits."""
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator over ``n_qubits`` qubits."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        _check_register(self.n_qubits)
        entries = _frozen(self.entries)
        dim = 2 ** self.n_qubits
        if entries.shape != (dim, dim):
            raise InvalidStateError(f"Expected a {dim}x{dim} matrix, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NonFiniteStateError("Density matrix has non-finite entries")
        if not np.allclose(entries, entries.conj().T, rtol=0.0, atol=ATOL_ALGEBRAIC):
            raise InvalidStateError("Density matrix is not Hermitian")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > ATOL_ALGEBRAIC:
            raise InvalidStateError(f"Density matrix trace is {trace!r}, expected 1")
        smallest = float(np.linalg.eigvalsh(entries).min())
        if smallest < -PSD_SLACK:
            raise InvalidStateError(f"Density matrix has negative eigenvalue {smallest!r}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2 ** n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        """Tr[rho^2]; 1 for pure states."""
        return float(np.trace(self.entries @ self.entries).real)

    def probabilities(self) -> np.ndarray:
        """Computational-basis outcome probabilities (the real diagonal)."""
        return np.clip(np.diag(self.entries).real, 0.0, None)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class Projector:
    """Computational-basis projector |outcome><outcome| on one qubit."""

    target_qubit: int
    outcome: int

    def __post_init__(self) -> None:
        if self.outcome not in (0, 1):
            raise SimulationError(f"Projector outcome must be 0 or 1, got {self.outcome!r}")
        if self.target_qubit < 0:
            raise QubitIndexError(f"Negative projector target {self.target_qubit}")

    def matrix(self) -> np.ndarray:
        out = np.zeros((2, 2), dtype=complex)
        out[self.outcome, self.outcome] = 1.0
        return out

    def operator(self, n_qubits: int) -> np.ndarray:
        """The projector embedded in an ``n_qubits`` register."""
        return embed_operator(self.matrix(), (self.target_qubit,), n_qubits)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return ``U|psi>`` for the gate's unitary ``U``."""
    _check_qubits(gate.qubits, state.n_qubits)
    amplitudes = _apply_local(
        state.amplitudes.reshape(-1, 1), gate.matrix(), gate.qubits, state.n_qubits
    )[:, 0]
    if not np.all(np.isfinite(amplitudes)):
        raise NonFiniteStateError(f"Gate {gate.kind.value} produced non-finite amplitudes")
    return StateVector(state.n_qubits, amplitudes)


def evolve_density(rho: DensityMatrix, gate: GateOp) -> DensityMatrix:
    """Return ``U rho U^dagger``."""
    _check_qubits(gate.qubits, rho.n_qubits)
    unitary = gate.matrix()
    left = _apply_local(rho.entries, unitary, gate.qubits, rho.n_qubits)
    both = _apply_local(left.conj().T, unitary, gate.qubits, rho.n_qubits).conj().T
    return DensityMatrix(rho.n_qubits, (both + both.conj().T) / 2.0)


def to_density(state: StateVector) -> DensityMatrix:
    """Pure-state density matrix ``|psi><psi|``."""
    return DensityMatrix(state.n_qubits, np.outer(state.amplitudes, state.amplitudes.conj()))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``.

    Kept qubits retain their relative order, so the result's qubit 0 is the
    smallest kept index.
    """
    kept = sorted(set(keep))
    if not kept:
        raise SubsystemError("Partial trace needs at least one qubit to keep")
    _check_qubits(kept, rho.n_qubits)
    n = rho.n_qubits
    if len(kept) == n:
        return rho

    traced = [q for q in range(n) if q not in kept]
    tensor = rho.entries.reshape([2] * (2 * n))
    perm = kept + traced + [q + n for q in kept] + [q + n for q in traced]
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    tensor = np.transpose(tensor, perm).reshape(dk, dt, dk, dt)
    reduced = np.trace(tensor, axis1=1, axis2=3)
    return DensityMatrix(len(kept), (reduced + reduced.conj().T) / 2.0)


def expectation(rho: DensityMatrix, proj: Union[Projector, Sequence[Projector]]) -> float:
    """Tr[rho P] for a projector or a product of projectors on distinct qubits."""
    projectors: List[Projector] = [proj] if isinstance(proj, Projector) else list(proj)
    if not projectors:
        raise SubsystemError("Expectation needs at least one projector")
    targets = [p.target_qubit for p in projectors]
    if len(set(targets)) != len(targets):
        raise SubsystemError(f"Projectors repeat a qubit: {targets}")
    _check_qubits(targets, rho.n_qubits)

    operator = np.eye(2 ** rho.n_qubits, dtype=complex)
    for p in projectors:
        operator = operator @ p.operator(rho.n_qubits)
    value = complex(np.trace(rho.entries @ operator))
    if abs(value.imag) > IMAG_GUARD:
        raise SimulationError(
            "Projector expectation has a non-negligible imaginary part", repr(value)
        )
    real = value.real
    if real < -ATOL_COMPOSED or real > 1.0 + ATOL_COMPOSED:
        raise SimulationError(f"Projector expectation {real!r} lies outside [0, 1]")
    if real < 0.0 or real > 1.0:
        logger.debug("Clamping expectation %r into [0, 1]", real)
    return min(1.0, max(0.0, real))


def branch_probability(state: StateVector, qubit: int, outcome: int) -> float:
    """Probability of reading ``outcome`` on ``qubit``."""
    _check_qubits((qubit,), state.n_qubits)
    tensor = np.moveaxis(state.amplitudes.reshape([2] * state.n_qubits), qubit, 0)
    return float(np.sum(np.abs(tensor[outcome]) ** 2))


def post_select(state: StateVector, qubit: int, outcome: int) -> Tuple[StateVector, float]:
    """Condition on ``qubit`` reading ``outcome`` and remove that qubit.

    Returns the renormalized state of the remaining qubits (original order)
    together with the branch probability.
    """
    if outcome not in (0, 1):
        raise SimulationError(f"Post-selection outcome must be 0 or 1, got {outcome!r}")
    probability = branch_probability(state, qubit, outcome)
    if probability < IMPOSSIBLE_BRANCH:
        raise ImpossiblePostSelectionError(
            f"Post-selecting qubit {qubit} on outcome {outcome} is impossible",
            f"branch probability {probability!r}",
        )
    if state.n_qubits == 1:
        raise SubsystemError("Cannot post-select away the only qubit of the register")

    tensor = np.moveaxis(state.amplitudes.reshape([2] * state.n_qubits), qubit, 0)
    remaining = tensor[outcome].reshape(-1) / np.sqrt(probability)
    return StateVector(state.n_qubits - 1, remaining), probability


def measure_probabilities(state: StateVector) -> Dict[str, float]:
    """Computational-basis outcome distribution keyed by bitstring (qubit 0 first)."""
    probabilities = state.probabilities()
    return {bitstring(i, state.n_qubits): float(p) for i, p in enumerate(probabilities)}
