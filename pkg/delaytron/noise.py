"""Static device noise: depolarizing gate errors and symmetric readout flips.

Coherence times are carried as metadata only; no amplitude or phase damping
is simulated.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .circuits import Circuit
from .core import DensityMatrix, StateVector, bitstring, embed_operator, evolve_density, to_density
from .exceptions import MissingNoiseEntryError, NoiseModelError
from .gates import GateOp

logger = logging.getLogger(__name__)

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise NoiseModelError(f"{name} must be a probability in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class QubitNoise:
    """Per-qubit error rates plus coherence-time metadata."""

    gate_error: float = 0.0
    readout_error: float = 0.0
    t1_us: Optional[float] = None
    t2_us: Optional[float] = None
    physical: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "gate_error", _check_probability("gate_error", self.gate_error))
        object.__setattr__(
            self, "readout_error", _check_probability("readout_error", self.readout_error)
        )
        for name in ("t1_us", "t2_us"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0.0):
                raise NoiseModelError(f"{name} must be a non-negative time, got {value!r}")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "gate_error": self.gate_error,
            "readout_error": self.readout_error,
        }
        for name in ("t1_us", "t2_us", "physical"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out


@dataclass(frozen=True)
class NoiseModel:
    """Device error rates keyed by logical qubit and by (control, target) pair."""

    per_qubit: Mapping[int, QubitNoise] = field(default_factory=dict)
    cnot_error: Mapping[Tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        per_qubit = {int(q): noise for q, noise in self.per_qubit.items()}
        cnot_error = {}
        for pair, value in self.cnot_error.items():
            control, target = (int(q) for q in pair)
            if control == target:
                raise NoiseModelError(f"Two-qubit error pair repeats qubit {control}")
            cnot_error[(control, target)] = _check_probability(
                f"cnot_error[{control},{target}]", value
            )
        object.__setattr__(self, "per_qubit", per_qubit)
        object.__setattr__(self, "cnot_error", cnot_error)

    @classmethod
    def uniform(
        cls, n_qubits: int, gate_error: float = 0.0, readout_error: float = 0.0, cnot_error: float = 0.0
    ) -> "NoiseModel":
        """Same rates on every qubit and every ordered pair."""
        return cls(
            per_qubit={q: QubitNoise(gate_error, readout_error) for q in range(n_qubits)},
            cnot_error={
                pair: cnot_error for pair in itertools.permutations(range(n_qubits), 2)
            },
        )

    @classmethod
    def ideal(cls, n_qubits: int) -> "NoiseModel":
        return cls.uniform(n_qubits)

    def qubit(self, index: int) -> QubitNoise:
        try:
            return self.per_qubit[index]
        except KeyError:
            raise MissingNoiseEntryError(f"Noise model has no entry for qubit {index}")

    def gate_error_for(self, gate: GateOp) -> float:
        if len(gate.qubits) == 1:
            return self.qubit(gate.qubits[0]).gate_error
        pair = (gate.qubits[0], gate.qubits[1])
        if pair not in self.cnot_error:
            raise MissingNoiseEntryError(
                f"Noise model has no two-qubit error for control {pair[0]}, target {pair[1]}"
            )
        return self.cnot_error[pair]

    def check_covers(self, circuit: Circuit) -> None:
        """Raise if any gate or measured qubit lacks a noise entry."""
        for q in range(circuit.n_qubits):
            self.qubit(q)
        for op in circuit.ops:
            self.gate_error_for(op)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubits": {str(q): self.per_qubit[q].to_dict() for q in sorted(self.per_qubit)},
            "cnot_error": [
                {"control": c, "target": t, "error": self.cnot_error[(c, t)]}
                for c, t in sorted(self.cnot_error)
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NoiseModel":
        try:
            per_qubit = {
                int(q): QubitNoise(**entry) for q, entry in data.get("qubits", {}).items()
            }
            cnot_error = {
                (int(e["control"]), int(e["target"])): e["error"]
                for e in data.get("cnot_error", [])
            }
        except (KeyError, TypeError, ValueError) as e:
            raise NoiseModelError("Malformed noise document", str(e))
        return cls(per_qubit=per_qubit, cnot_error=cnot_error)


def depolarize(rho: DensityMatrix, qubits: Sequence[int], probability: float) -> DensityMatrix:
    """Local depolarizing channel on ``qubits``.

    rho -> (1 - p) rho + p * Tr_qubits(rho) (x) I / 2^k, written as the
    uniform Pauli twirl over the k-qubit Pauli group.
    """
    probability = _check_probability("depolarizing probability", probability)
    if probability == 0.0:
        return rho
    k = len(qubits)
    twirled = np.zeros_like(rho.entries)
    for factors in itertools.product(_PAULIS, repeat=k):
        pauli = factors[0]
        for factor in factors[1:]:
            pauli = np.kron(pauli, factor)
        full = embed_operator(pauli, qubits, rho.n_qubits)
        twirled = twirled + full @ rho.entries @ full.conj().T
    twirled = twirled / (4 ** k)
    entries = (1.0 - probability) * rho.entries + probability * twirled
    return DensityMatrix(rho.n_qubits, (entries + entries.conj().T) / 2.0)


def apply_noise(circuit: Circuit, noise: NoiseModel) -> DensityMatrix:
    """Evolve |0...0><0...0| through the circuit with a depolarizing channel after each gate."""
    noise.check_covers(circuit)
    rho = to_density(StateVector.zero(circuit.n_qubits))
    for op in circuit.ops:
        rho = evolve_density(rho, op)
        rho = depolarize(rho, op.qubits, noise.gate_error_for(op))
    logger.debug("Noisy evolution finished with purity %.6f", rho.purity())
    return rho


def readout_confusion(readout_error: float) -> np.ndarray:
    """Column-stochastic symmetric bit-flip matrix."""
    r = _check_probability("readout_error", readout_error)
    return np.array([[1.0 - r, r], [r, 1.0 - r]])


def apply_readout_error(
    probabilities: Mapping[str, float],
    noise: NoiseModel,
    qubits: Optional[Sequence[int]] = None,
) -> Dict[str, float]:
    """Flip each measured bit independently with its qubit's readout error.

    ``probabilities`` maps bitstrings to probabilities; bit ``i`` of a key is
    read from logical qubit ``qubits[i]`` (default: qubit ``i``). A
    single-qubit marginal is passed as ``{"0": p0, "1": p1}`` with
    ``qubits=[q]``.
    """
    width = _key_width(probabilities.keys())
    measured = list(qubits) if qubits is not None else list(range(width))
    if len(measured) != width:
        raise NoiseModelError(
            f"Distribution keys have {width} bit(s) but {len(measured)} qubit(s) were named"
        )

    tensor = np.zeros(2 ** width)
    for key, p in probabilities.items():
        tensor[int(key, 2)] = float(p)
    tensor = tensor.reshape([2] * width)
    for axis, q in enumerate(measured):
        confusion = readout_confusion(noise.qubit(q).readout_error)
        tensor = np.moveaxis(np.tensordot(confusion, tensor, axes=([1], [axis])), 0, axis)
    flat = tensor.reshape(-1)
    return {bitstring(i, width): float(flat[i]) for i in range(flat.shape[0])}


def _key_width(keys: Iterable[str]) -> int:
    widths = {len(k) for k in keys}
    if len(widths) != 1:
        raise NoiseModelError(f"Distribution keys must share one bit width, got {sorted(widths)}")
    return widths.pop()


def measured_distribution(rho: DensityMatrix, noise: Optional[NoiseModel] = None) -> Dict[str, float]:
    """Full bitstring distribution of ``rho``, with readout flips when ``noise`` is given."""
    probabilities = rho.probabilities()
    probabilities = probabilities / probabilities.sum()
    distribution = {bitstring(i, rho.n_qubits): float(p) for i, p in enumerate(probabilities)}
    if noise is None:
        return distribution
    return apply_readout_error(distribution, noise)
