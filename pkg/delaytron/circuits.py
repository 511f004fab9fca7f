"""Circuit representation and the two delayed-choice circuit builders."""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from .core import StateVector, apply_gate
from .exceptions import CircuitError
from .gates import GateOp, cnot, controlled_hadamard, hadamard, phase, rot_y

logger = logging.getLogger(__name__)

SYSTEM_QUBIT = 0
ANCILLA_QUBIT = 1
HERALD_QUBIT = 2

# Logical qubit -> physical qubit used on the 14-qubit device
EA_QDCE_PHYSICAL_QUBITS: Tuple[str, ...] = ("q[8]", "q[9]", "q[10]")


class Scheme(str, Enum):
    """Experiment variants."""

    QDCE = "QDCE"
    EA_QDCE = "EA-QDCE"

    @property
    def n_qubits(self) -> int:
        return 2 if self is Scheme.QDCE else 3


def get_supported_schemes() -> List[str]:
    return [scheme.value for scheme in Scheme]


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``n_qubits`` logical qubits, plus scheme metadata."""

    n_qubits: int
    ops: Tuple[GateOp, ...] = ()
    scheme: Optional[Scheme] = None
    alpha: Optional[float] = None
    phi: Optional[float] = None
    physical_qubits: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.n_qubits < 1:
            raise CircuitError(f"Circuit needs at least one qubit, got {self.n_qubits}")
        for index, op in enumerate(self.ops):
            bad = [q for q in op.qubits if q >= self.n_qubits]
            if bad:
                raise CircuitError(
                    f"Gate #{index} ({op.kind.value}) uses qubit(s) {bad} outside a "
                    f"{self.n_qubits}-qubit circuit"
                )
        if self.scheme is not None:
            scheme = Scheme(self.scheme)
            object.__setattr__(self, "scheme", scheme)
            if self.n_qubits != scheme.n_qubits:
                raise CircuitError(
                    f"{scheme.value} circuits have {scheme.n_qubits} qubits, got {self.n_qubits}"
                )
        if self.physical_qubits and len(self.physical_qubits) != self.n_qubits:
            raise CircuitError(
                "Physical qubit mapping must name every logical qubit",
                f"{len(self.physical_qubits)} names for {self.n_qubits} qubits",
            )

    def gate_levels(self) -> List[int]:
        """Layer index of each op: one past the deepest earlier op sharing a qubit."""
        frontier = [0] * self.n_qubits
        levels = []
        for op in self.ops:
            level = max(frontier[q] for q in op.qubits)
            for q in op.qubits:
                frontier[q] = level + 1
            levels.append(level)
        return levels

    def depth(self) -> int:
        levels = self.gate_levels()
        return max(levels) + 1 if levels else 0

    def summary(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value if self.scheme else None,
            "n_qubits": self.n_qubits,
            "gate_count": len(self.ops),
            "depth": self.depth(),
            "gates": sorted({op.kind.value for op in self.ops}),
            "physical_qubits": list(self.physical_qubits),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value if self.scheme else None,
            "n_qubits": self.n_qubits,
            "parameters": {"alpha": self.alpha, "phi": self.phi},
            "physical_qubits": list(self.physical_qubits),
            "ops": [op.to_dict() for op in self.ops],
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Circuit":
        try:
            parameters = data.get("parameters") or {}
            return cls(
                n_qubits=int(data["n_qubits"]),
                ops=tuple(GateOp.from_dict(op) for op in data.get("ops", [])),
                scheme=Scheme(data["scheme"]) if data.get("scheme") else None,
                alpha=parameters.get("alpha"),
                phi=parameters.get("phi"),
                physical_qubits=tuple(data.get("physical_qubits", ())),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CircuitError("Malformed circuit document", str(e))


def _check_angles(phi: float, alpha: float) -> None:
    if not (math.isfinite(phi) and math.isfinite(alpha)):
        raise CircuitError(f"Angles must be finite, got phi={phi!r}, alpha={alpha!r}")


def build_qdce(phi: float, alpha: float) -> Circuit:
    """Single-ancilla circuit: the ancilla decides whether the second beam splitter acts.

    q0 is the interferometer photon, q1 the ancilla prepared in
    cos(alpha)|0> + sin(alpha)|1>.
    """
    _check_angles(phi, alpha)
    ops = (
        hadamard(SYSTEM_QUBIT),
        phase(phi, SYSTEM_QUBIT),
        rot_y(alpha, ANCILLA_QUBIT),
        controlled_hadamard(ANCILLA_QUBIT, SYSTEM_QUBIT),
    )
    return Circuit(2, ops, scheme=Scheme.QDCE, alpha=alpha, phi=phi)


def build_ea_qdce(phi: float, alpha: float) -> Circuit:
    """Entanglement-assisted circuit with an EPR ancilla pair (q1, q2).

    The rotation of q2 comes after q0 and q1 have interacted.
    """
    _check_angles(phi, alpha)
    ops = (
        hadamard(ANCILLA_QUBIT),
        cnot(ANCILLA_QUBIT, HERALD_QUBIT),
        hadamard(SYSTEM_QUBIT),
        phase(phi, SYSTEM_QUBIT),
        controlled_hadamard(ANCILLA_QUBIT, SYSTEM_QUBIT),
        rot_y(alpha, HERALD_QUBIT),
    )
    return Circuit(
        3,
        ops,
        scheme=Scheme.EA_QDCE,
        alpha=alpha,
        phi=phi,
        physical_qubits=EA_QDCE_PHYSICAL_QUBITS,
    )


def build_circuit(scheme: Scheme, phi: float, alpha: float) -> Circuit:
    """Dispatch to the builder for ``scheme``."""
    if Scheme(scheme) is Scheme.QDCE:
        return build_qdce(phi, alpha)
    return build_ea_qdce(phi, alpha)


def simulate(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    """Apply the circuit's ops left to right, starting from |0...0> by default."""
    state = initial if initial is not None else StateVector.zero(circuit.n_qubits)
    if state.n_qubits != circuit.n_qubits:
        raise CircuitError(
            f"Initial state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    logger.debug("Simulating %d gate(s) on %d qubit(s)", len(circuit.ops), circuit.n_qubits)
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state

