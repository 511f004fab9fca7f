"""
Delaytron: delayed-choice interferometer experiments on a small qubit simulator.

This package simulates the quantum delayed-choice experiment with a quantum
ancilla (single-ancilla and entanglement-assisted variants) on an exact
state-vector/density-matrix core, compares it with a local hidden-variable
model, and writes the results as CSV, SVG and JSON provenance files.

Main API:
    run_sweep: Evaluate a sweep config into intensity records
    simulate_point: Detector intensities of one circuit at (alpha, phi)
    load_config: Read and validate a sweep config file

Classes:
    StateVector, DensityMatrix, Projector: Quantum state primitives
    Circuit: Gate list with scheme metadata
    NoiseModel: Device error rates
    SweepConfig, SweepRunner: Sweep description and driver

Example:
    >>> from delaytron import SweepConfig, run_sweep
    >>> config = SweepConfig(scheme="QDCE", alpha_values=(0.0,), phi_values=(0.0,))
    >>> round(run_sweep(config)[0].e0, 12)
    0.5
"""

from dataclasses import replace
from typing import Dict, Optional

# Version information
__version__ = "0.1.0"
__author__ = "Delaytron Contributors"
__description__ = "Quantum delayed-choice experiments on a small qubit simulator"

from .analytic import (
    Behavior,
    IntensityPair,
    hv_intensity,
    hv_monte_carlo,
    qm_entangled_printed,
    qm_entangled_simulated,
    qm_single,
    visibility,
)
from .circuits import Circuit, Scheme, build_circuit, build_ea_qdce, build_qdce, simulate
from .core import (
    DensityMatrix,
    Projector,
    StateVector,
    apply_gate,
    expectation,
    partial_trace,
    post_select,
    to_density,
)
from .exceptions import (
    AnalysisError,
    CircuitError,
    ConfigParsingError,
    ConfigValidationError,
    DelaytronError,
    ImpossiblePostSelectionError,
    MissingNoiseEntryError,
    NoiseModelError,
    OutputError,
    SamplingError,
    SimulationError,
)
from .experiment import (
    IntensityRecord,
    Mode,
    SweepConfig,
    SweepRunner,
    compare_qm_hv,
    run_sweep,
    sample_shots,
)
from .noise import NoiseModel, QubitNoise, apply_noise, apply_readout_error
from .parser import ConfigParser, bundled_config_path, load_config, write_config
from .schema import get_supported_gates, get_supported_schemes, get_sweep_config_schema

# Public API
__all__ = [
    # Main API functions
    "run_sweep",
    "simulate_point",
    "compare_qm_hv",
    "load_config",
    "write_config",
    "bundled_config_path",
    # Core classes
    "StateVector",
    "DensityMatrix",
    "Projector",
    "Circuit",
    "Scheme",
    "NoiseModel",
    "QubitNoise",
    "SweepConfig",
    "SweepRunner",
    "IntensityRecord",
    "Mode",
    "ConfigParser",
    "IntensityPair",
    "Behavior",
    # Operations
    "apply_gate",
    "to_density",
    "partial_trace",
    "expectation",
    "post_select",
    "build_qdce",
    "build_ea_qdce",
    "build_circuit",
    "simulate",
    "apply_noise",
    "apply_readout_error",
    "sample_shots",
    "qm_single",
    "qm_entangled_printed",
    "qm_entangled_simulated",
    "hv_intensity",
    "hv_monte_carlo",
    "visibility",
    # Exceptions
    "DelaytronError",
    "SimulationError",
    "CircuitError",
    "AnalysisError",
    "NoiseModelError",
    "MissingNoiseEntryError",
    "ImpossiblePostSelectionError",
    "SamplingError",
    "ConfigParsingError",
    "ConfigValidationError",
    "OutputError",
    # Utility functions
    "get_sweep_config_schema",
    "get_supported_schemes",
    "get_supported_gates",
    # Version info
    "__version__",
]


def simulate_point(
    scheme: str, alpha: float, phi: float, branch: Optional[int] = None
) -> Dict[str, float]:
    """Exact, noiseless D0/D1 intensities of one circuit.

    Args:
        scheme: ``"QDCE"`` or ``"EA-QDCE"``.
        alpha: Ancilla angle in radians.
        phi: Interferometer phase in radians.
        branch: Herald outcome to condition on (EA-QDCE only; default 0).

    Returns:
        ``{"e0": ..., "e1": ...}``; EA-QDCE results also carry ``joint_e0``
        and ``branch_prob``.

    Raises:
        DelaytronError: If the inputs are invalid.

    Example:
        >>> round(simulate_point("EA-QDCE", 0.0, 0.0, branch=1)["e0"], 12)
        1.0
    """
    config = SweepConfig(scheme=scheme, alpha_values=(alpha,), phi_values=(phi,))
    if branch is not None or config.scheme is Scheme.EA_QDCE:
        config = replace(config, branch=0 if branch is None else branch)
    record = run_sweep(config)[0]
    result = {"e0": record.e0, "e1": record.e1}
    if record.joint_e0 is not None:
        result["joint_e0"] = record.joint_e0
        result["branch_prob"] = record.branch_prob  # type: ignore[assignment]
    return result
