"""JSON schema definitions for sweep and noise configuration documents."""

from typing import Any, Dict, List

from .circuits import get_supported_schemes
from .gates import get_supported_gates


SUPPORTED_MODES: List[str] = ["exact", "sampled"]


_PROBABILITY: Dict[str, Any] = {"type": "number", "minimum": 0, "maximum": 1}

_ANGLE_LIST: Dict[str, Any] = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "number"},
}


NOISE_MODEL_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["qubits"],
    "properties": {
        "qubits": {
            "type": "object",
            "propertyNames": {"pattern": "^[0-9]+$"},
            "additionalProperties": {
                "type": "object",
                "required": ["gate_error", "readout_error"],
                "properties": {
                    "gate_error": {
                        **_PROBABILITY,
                        "description": "Depolarizing probability after each single-qubit gate",
                    },
                    "readout_error": {
                        **_PROBABILITY,
                        "description": "Symmetric bit-flip probability at measurement",
                    },
                    "t1_us": {
                        "type": "number",
                        "minimum": 0,
                        "description": "Coherence time in microseconds (metadata)",
                    },
                    "t2_us": {
                        "type": "number",
                        "minimum": 0,
                        "description": "Relaxation time in microseconds (metadata)",
                    },
                    "physical": {
                        "type": "string",
                        "description": "Device qubit label, e.g. q[8]",
                    },
                },
                "additionalProperties": False,
            },
            "description": "Per logical qubit error rates keyed by index",
        },
        "cnot_error": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["control", "target", "error"],
                "properties": {
                    "control": {"type": "integer", "minimum": 0},
                    "target": {"type": "integer", "minimum": 0},
                    "error": _PROBABILITY,
                },
                "additionalProperties": False,
            },
            "description": "Two-qubit depolarizing probability per (control, target) pair",
        },
    },
    "additionalProperties": False,
}


SWEEP_CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["scheme"],
    "properties": {
        "scheme": {
            "type": "string",
            "enum": get_supported_schemes(),
            "description": "Experiment variant",
        },
        "alpha_values": {
            **_ANGLE_LIST,
            "description": "Ancilla angles (radians unless degrees is true)",
        },
        "alpha_steps": {
            "type": "integer",
            "description": "Number of evenly spaced ancilla angles over [0, pi/2]",
        },
        "phi_values": {
            **_ANGLE_LIST,
            "description": "Interferometer phases (radians unless degrees is true)",
        },
        "phi_steps": {
            "type": "integer",
            "description": "Number of evenly spaced phases over one period",
        },
        "mode": {
            "type": "string",
            "enum": SUPPORTED_MODES,
            "description": "Density-matrix expectations or shot sampling",
        },
        "shots": {
            "type": "integer",
            "minimum": 0,
            "description": "Shots per repetition (sampled mode)",
        },
        "repetitions": {
            "type": "integer",
            "minimum": 1,
            "description": "Independent repetitions per point (sampled mode)",
        },
        "seed": {
            "type": "integer",
            "minimum": 0,
            "description": "Root seed for every sampled point",
        },
        "branch": {
            "type": "integer",
            "enum": [0, 1],
            "description": "Restrict EA-QDCE records to one herald outcome",
        },
        "degrees": {
            "type": "boolean",
            "description": "Interpret alpha_values and phi_values in degrees",
        },
        "noise": NOISE_MODEL_SCHEMA,
    },
    "not": {
        "anyOf": [
            {"required": ["alpha_values", "alpha_steps"]},
            {"required": ["phi_values", "phi_steps"]},
        ]
    },
    "additionalProperties": False,
}


def get_sweep_config_schema() -> Dict[str, Any]:
    """Get the sweep configuration schema.

    Returns:
        The JSON schema for sweep configuration documents.
    """
    return SWEEP_CONFIG_SCHEMA


def get_noise_model_schema() -> Dict[str, Any]:
    """Get the noise model schema.

    Returns:
        The JSON schema for noise documents.
    """
    return NOISE_MODEL_SCHEMA


def get_supported_modes() -> List[str]:
    return SUPPORTED_MODES.copy()


__all__ = [
    "SWEEP_CONFIG_SCHEMA",
    "NOISE_MODEL_SCHEMA",
    "get_sweep_config_schema",
    "get_noise_model_schema",
    "get_supported_modes",
    "get_supported_schemes",
    "get_supported_gates",
]
