"""Gate set for the delayed-choice circuits.

Every gate is described by a :class:`GateOp` value: its kind, the qubits it acts
on and its real parameters. The dense unitary is built on demand by
:meth:`GateOp.matrix`, with the operator factors ordered as
``controls + targets`` (the first listed qubit is the most significant factor).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .exceptions import CircuitError


class GateKind(str, Enum):
    """Supported gate kinds, named after their hardware mnemonics."""

    HADAMARD = "H"
    PHASE = "U1"
    ROT_Y = "RY"
    CNOT = "CX"
    CONTROLLED_HADAMARD = "CH"
    U3 = "U3"


# kind -> (targets, controls, parameters)
_ARITY: Dict[GateKind, Tuple[int, int, int]] = {
    GateKind.HADAMARD: (1, 0, 0),
    GateKind.PHASE: (1, 0, 1),
    GateKind.ROT_Y: (1, 0, 1),
    GateKind.CNOT: (1, 1, 0),
    GateKind.CONTROLLED_HADAMARD: (1, 1, 0),
    GateKind.U3: (1, 0, 3),
}

_SQRT_HALF = 1.0 / math.sqrt(2.0)

HADAMARD_MATRIX = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _controlled(target_matrix: np.ndarray) -> np.ndarray:
    """Block-diagonal ``diag(I, U)`` with the control as the leading factor."""
    dim = target_matrix.shape[0]
    out = np.eye(2 * dim, dtype=complex)
    out[dim:, dim:] = target_matrix
    return out


def _phase_matrix(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def _rot_y_matrix(alpha: float) -> np.ndarray:
    # |0> -> cos(a)|0> + sin(a)|1>; full angle, not the exp(-i a Y / 2) half angle
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


_MATRIX_BUILDERS: Dict[GateKind, Callable[..., np.ndarray]] = {
    GateKind.HADAMARD: lambda: HADAMARD_MATRIX.copy(),
    GateKind.PHASE: _phase_matrix,
    GateKind.ROT_Y: _rot_y_matrix,
    GateKind.CNOT: lambda: _controlled(PAULI_X),
    GateKind.CONTROLLED_HADAMARD: lambda: _controlled(HADAMARD_MATRIX),
    GateKind.U3: _u3_matrix,
}


@dataclass(frozen=True)
class GateOp:
    """One gate application on named qubits."""

    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    params: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        try:
            kind = GateKind(self.kind)
        except ValueError:
            raise CircuitError(f"Unsupported gate kind: {self.kind}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

        n_targets, n_controls, n_params = _ARITY[kind]
        if len(self.targets) != n_targets or len(self.controls) != n_controls:
            raise CircuitError(
                f"Gate {kind.value} expects {n_targets} target(s) and {n_controls} control(s)",
                f"got targets={self.targets}, controls={self.controls}",
            )
        if len(self.params) != n_params:
            raise CircuitError(
                f"Gate {kind.value} expects {n_params} parameter(s)", f"got {self.params}"
            )
        if any(not math.isfinite(p) for p in self.params):
            raise CircuitError(f"Gate {kind.value} has non-finite parameters", str(self.params))
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"Gate {kind.value} has a negative qubit index", str(self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"Gate {kind.value} repeats a qubit", str(self.qubits))

    @property
    def qubits(self) -> Tuple[int, ...]:
        """Qubits in operator factor order: controls first, then targets."""
        return self.controls + self.targets

    def matrix(self) -> np.ndarray:
        """Dense unitary over :attr:`qubits`."""
        return _MATRIX_BUILDERS[self.kind](*self.params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "targets": list(self.targets),
            "controls": list(self.controls),
            "params": list(self.params),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GateOp":
        try:
            return cls(
                kind=GateKind(data["kind"]),
                targets=tuple(data["targets"]),
                controls=tuple(data.get("controls", ())),
                params=tuple(data.get("params", ())),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CircuitError("Malformed gate document", str(e))


def hadamard(target: int) -> GateOp:
    return GateOp(GateKind.HADAMARD, (target,))


def phase(phi: float, target: int) -> GateOp:
    return GateOp(GateKind.PHASE, (target,), params=(phi,))


def rot_y(alpha: float, target: int = 0) -> GateOp:
    """Rotation taking |0> to cos(alpha)|0> + sin(alpha)|1>.

    The gate is defined by that action, not by an exponential form. The
    hardware rotation exp(-i theta sigma_y / 2) sends |0> to
    cos(theta/2)|0> + sin(theta/2)|1>, so this gate equals it at
    theta = 2 * alpha, i.e. ``u3(2 * alpha, 0, 0)``.
    """
    return GateOp(GateKind.ROT_Y, (target,), params=(alpha,))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(GateKind.CNOT, (target,), controls=(control,))


def controlled_hadamard(control: int, target: int) -> GateOp:
    return GateOp(GateKind.CONTROLLED_HADAMARD, (target,), controls=(control,))


def u3(theta: float, phi: float, lam: float, target: int) -> GateOp:
    return GateOp(GateKind.U3, (target,), params=(theta, phi, lam))


def is_unitary(matrix: np.ndarray, atol: float = 1e-12) -> bool:
    """Check ``U^dagger U = I`` entrywise within ``atol``."""
    identity = np.eye(matrix.shape[0], dtype=complex)
    return bool(np.allclose(matrix.conj().T @ matrix, identity, rtol=0.0, atol=atol))


def get_supported_gates() -> List[str]:
    """Get the list of supported gate mnemonics."""
    return [kind.value for kind in GateKind]


def gate_arity(kind: GateKind) -> Tuple[int, int, int]:
    """Number of (targets, controls, parameters) a gate kind takes."""
    return _ARITY[GateKind(kind)]

