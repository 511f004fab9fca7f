"""Tests for the gate set."""

import math

import numpy as np
import pytest

from delaytron.exceptions import CircuitError
from delaytron.gates import (
    GateKind,
    GateOp,
    cnot,
    controlled_hadamard,
    gate_arity,
    get_supported_gates,
    hadamard,
    is_unitary,
    phase,
    rot_y,
    u3,
)


class TestGateMatrices:
    """Test cases for dense gate unitaries."""

    def test_hadamard_matrix(self):
        """H is (1/sqrt 2)[[1, 1], [1, -1]]."""
        expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        assert np.allclose(hadamard(0).matrix(), expected, atol=1e-12)

    def test_phase_matrix(self):
        """U1(phi) is diag(1, e^{i phi})."""
        matrix = phase(math.pi / 3, 0).matrix()
        assert np.allclose(matrix, np.diag([1, np.exp(1j * math.pi / 3)]), atol=1e-12)

    def test_rot_y_sends_zero_to_cos_sin(self):
        """RY(alpha)|0> = cos(alpha)|0> + sin(alpha)|1>."""
        alpha = 0.37
        column = rot_y(alpha).matrix()[:, 0]
        assert np.allclose(column, [math.cos(alpha), math.sin(alpha)], atol=1e-12)

    def test_rot_y_equals_u3_with_doubled_angle(self):
        """RY(alpha) is the hardware U3(2 alpha, 0, 0)."""
        for alpha in (0.0, 0.3, math.pi / 4, math.pi / 2, 2.0):
            assert np.allclose(rot_y(alpha).matrix(), u3(2 * alpha, 0, 0, 0).matrix(), atol=1e-12)

    def test_cnot_matrix(self):
        """CX with the control as the leading factor."""
        expected = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
        assert np.allclose(cnot(0, 1).matrix(), expected)

    def test_controlled_hadamard_matrix(self):
        """CH acts as identity when the control is 0 and as H otherwise."""
        matrix = controlled_hadamard(1, 0).matrix()
        assert np.allclose(matrix[:2, :2], np.eye(2))
        assert np.allclose(matrix[2:, 2:], np.array([[1, 1], [1, -1]]) / math.sqrt(2))
        assert np.allclose(matrix[:2, 2:], 0)

    @pytest.mark.parametrize(
        "gate",
        [
            hadamard(0),
            phase(1.1, 0),
            rot_y(0.7),
            cnot(0, 1),
            controlled_hadamard(1, 0),
            u3(0.4, 1.3, -2.2, 0),
        ],
    )
    def test_every_gate_is_unitary(self, gate):
        """Each gate satisfies U^dagger U = I."""
        assert is_unitary(gate.matrix())

    def test_is_unitary_rejects_non_unitary(self):
        """A scaled identity is not unitary."""
        assert not is_unitary(2 * np.eye(2))


class TestGateOp:
    """Test cases for GateOp validation and serialization."""

    def test_qubits_lists_controls_first(self):
        """Operator factor order is controls then targets."""
        assert cnot(1, 2).qubits == (1, 2)
        assert controlled_hadamard(1, 0).qubits == (1, 0)

    def test_kind_accepts_mnemonic(self):
        """Kinds can be given by their hardware mnemonic."""
        op = GateOp("H", (0,))
        assert op.kind is GateKind.HADAMARD

    def test_unknown_kind(self):
        """Unknown kinds are rejected."""
        with pytest.raises(CircuitError) as exc_info:
            GateOp("SWAP", (0, 1))

        assert "Unsupported gate kind" in str(exc_info.value)

    def test_wrong_arity(self):
        """A CNOT without a control is malformed."""
        with pytest.raises(CircuitError):
            GateOp(GateKind.CNOT, (0,))

    def test_missing_parameter(self):
        """U1 needs its phase."""
        with pytest.raises(CircuitError):
            GateOp(GateKind.PHASE, (0,))

    def test_repeated_qubit(self):
        """Control and target must differ."""
        with pytest.raises(CircuitError):
            cnot(1, 1)

    def test_negative_qubit(self):
        """Negative qubit indices are rejected."""
        with pytest.raises(CircuitError):
            hadamard(-1)

    def test_non_finite_parameter(self):
        """NaN angles are rejected."""
        with pytest.raises(CircuitError):
            phase(float("nan"), 0)

    def test_dict_round_trip(self):
        """from_dict(to_dict()) rebuilds the same gate."""
        op = u3(0.1, 0.2, 0.3, 2)
        assert GateOp.from_dict(op.to_dict()) == op

    def test_from_dict_malformed(self):
        """Missing keys raise CircuitError."""
        with pytest.raises(CircuitError):
            GateOp.from_dict({"kind": "H"})


class TestGateCatalogue:
    """Test cases for gate listings."""

    def test_supported_gates(self):
        """Every kind is listed by mnemonic."""
        assert get_supported_gates() == ["H", "U1", "RY", "CX", "CH", "U3"]

    def test_gate_arity(self):
        """Arity is (targets, controls, parameters)."""
        assert gate_arity(GateKind.CONTROLLED_HADAMARD) == (1, 1, 0)
        assert gate_arity("U3") == (1, 0, 3)
