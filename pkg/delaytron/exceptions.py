"""Custom exceptions for Delaytron."""

from typing import Optional


class DelaytronError(Exception):
    """Base exception for all Delaytron errors."""

    def __init__(self, message: str, details: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            return f"{self.message}: {self.details}"
        return self.message


class SimulationError(DelaytronError):
    """Raised when a state or operator computation fails."""
    pass


class QubitIndexError(SimulationError):
    """Raised when a qubit index is outside the register."""
    pass


class NonFiniteStateError(SimulationError):
    """Raised when amplitudes or matrix entries become NaN or infinite."""
    pass


class InvalidStateError(SimulationError):
    """Raised when a state violates normalization, Hermiticity or positivity."""
    pass


class SubsystemError(SimulationError):
    """Raised when a partial trace or post-selection names an invalid subsystem."""
    pass


class ImpossiblePostSelectionError(SimulationError):
    """Raised when the requested measurement branch has vanishing probability."""
    pass


class CircuitError(DelaytronError):
    """Raised when a gate or circuit is malformed."""
    pass


class AnalysisError(DelaytronError):
    """Raised when a closed-form or curve analysis receives invalid input."""
    pass


class EmptyCurveError(AnalysisError):
    """Raised when a visibility is requested for an empty curve."""
    pass


class NoiseModelError(DelaytronError):
    """Raised when a noise model is invalid."""
    pass


class MissingNoiseEntryError(NoiseModelError):
    """Raised when a circuit uses a qubit or pair the noise model does not cover."""
    pass


class SamplingError(DelaytronError):
    """Raised when shot sampling receives an invalid distribution."""
    pass


class ConfigParsingError(DelaytronError):
    """Raised when a configuration document cannot be read or parsed."""
    pass


class ConfigValidationError(DelaytronError):
    """Raised when a configuration document violates the schema or a domain rule."""
    pass


class OutputError(DelaytronError):
    """Raised when writing a CSV, SVG, report or manifest fails."""
    pass
