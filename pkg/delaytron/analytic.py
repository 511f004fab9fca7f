"""Closed-form intensities, the local hidden-variable model and visibility.

These functions serve as oracles for the simulator. Detector D0 corresponds
to the system qubit reading 0, D1 to it reading 1.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .circuits import HERALD_QUBIT, SYSTEM_QUBIT, build_ea_qdce, simulate
from .core import Projector, expectation, partial_trace, post_select, to_density
from .exceptions import AnalysisError, EmptyCurveError

INTENSITY_SLACK = 1e-9


@dataclass(frozen=True)
class IntensityPair:
    """Detector intensities (D0, D1)."""

    e0: float
    e1: float

    @property
    def total(self) -> float:
        return self.e0 + self.e1


class Behavior(str, Enum):
    """Pre-assigned behaviour of the photon in the hidden-variable model."""

    PARTICLE = "particle"
    WAVE = "wave"


@dataclass(frozen=True)
class HvSample:
    """One hidden-variable draw: the ancilla value and the behaviour it fixes.

    Objectivity: the behaviour is a function of ``lambda1`` alone, so the
    particle and wave sets never overlap. The hidden variable of the distant
    herald qubit plays no part in the detector statistics and is not stored.
    """

    lambda1: int
    behavior: Behavior

    @classmethod
    def from_lambda(cls, lambda1: int) -> "HvSample":
        return cls(lambda1, hv_behavior(lambda1))


@dataclass(frozen=True)
class DiscrepancyEntry:
    """As-printed entangled-ancilla intensity next to the simulated quantities."""

    alpha: float
    phi: float
    branch: int
    printed: float
    conditional: float
    joint: float

    @property
    def conditional_gap(self) -> float:
        return self.printed - self.conditional

    @property
    def joint_gap(self) -> float:
        return self.printed - self.joint


def qm_single(alpha: float, phi: float) -> IntensityPair:
    """System-qubit intensities with a single ancilla in cos(a)|0> + sin(a)|1>."""
    cos2a = math.cos(alpha) ** 2
    sin2a = math.sin(alpha) ** 2
    e0 = cos2a / 2.0 + sin2a * math.cos(phi / 2.0) ** 2
    e1 = cos2a / 2.0 + sin2a * math.sin(phi / 2.0) ** 2
    return IntensityPair(e0, e1)


def qm_entangled_printed(alpha: float, phi: float, branch: int) -> float:
    """Entangled-ancilla intensity exactly as the published expression reads.

    AS PRINTED, NOT SIMULATED. Its alpha = 0 limit (1.0 on branch 0) matches
    neither the conditional (0.5) nor the joint (0.25) intensity of the
    circuit; use :func:`qm_entangled_simulated` for ground truth.
    """
    _check_branch(branch)
    fringe = math.cos(phi / 2.0) ** 2
    if branch == 0:
        return math.cos(alpha / 4.0) ** 2 + math.sin(alpha) ** 2 * fringe / 2.0
    return math.sin(alpha / 4.0) ** 2 + math.cos(alpha) ** 2 * fringe / 2.0


def qm_entangled_simulated(
    alpha: float, phi: float, branch: int
) -> Tuple[IntensityPair, IntensityPair, float]:
    """Simulate the entangled-ancilla circuit and post-select the herald qubit.

    Returns ``(conditional, joint, branch_probability)`` where the joint
    intensities are the conditional ones times the branch probability.
    """
    _check_branch(branch)
    state = simulate(build_ea_qdce(phi, alpha))
    remaining, probability = post_select(state, HERALD_QUBIT, branch)
    system = partial_trace(to_density(remaining), keep=[SYSTEM_QUBIT])
    conditional = IntensityPair(
        expectation(system, Projector(0, 0)), expectation(system, Projector(0, 1))
    )
    joint = IntensityPair(conditional.e0 * probability, conditional.e1 * probability)
    return conditional, joint, probability


def printed_discrepancy(alpha: float, phi: float, branch: int) -> DiscrepancyEntry:
    conditional, joint, _ = qm_entangled_simulated(alpha, phi, branch)
    return DiscrepancyEntry(
        alpha=alpha,
        phi=phi,
        branch=branch,
        printed=qm_entangled_printed(alpha, phi, branch),
        conditional=conditional.e0,
        joint=joint.e0,
    )


def hv_behavior(lambda1: int) -> Behavior:
    """Ancilla value 0 (open interferometer) -> particle, 1 (closed) -> wave."""
    if lambda1 not in (0, 1):
        raise AnalysisError(f"Hidden variable lambda1 must be 0 or 1, got {lambda1!r}")
    return Behavior.PARTICLE if lambda1 == 0 else Behavior.WAVE


def hv_conditional(behavior: Behavior, phi: float) -> IntensityPair:
    """Detector distribution conditioned on the pre-assigned behaviour."""
    if Behavior(behavior) is Behavior.PARTICLE:
        return IntensityPair(0.5, 0.5)
    return IntensityPair(math.cos(phi / 2.0) ** 2, math.sin(phi / 2.0) ** 2)


def hv_joint_distribution(phi: float) -> Dict[str, float]:
    """P(q0, q1) of the hidden-variable model, summed over lambda1.

    Keys are bitstrings ``"<q0><q1>"``; lambda1 is uniform, matching the EPR
    marginal of the ancilla.
    """
    distribution: Dict[str, float] = {}
    for lambda1 in (0, 1):
        pair = hv_conditional(hv_behavior(lambda1), phi)
        distribution[f"0{lambda1}"] = 0.5 * pair.e0
        distribution[f"1{lambda1}"] = 0.5 * pair.e1
    return distribution


def hv_intensity(phi: float) -> float:
    """Hidden-variable D0 intensity, identical for both herald branches and all alpha."""
    return 0.25 + math.cos(phi / 2.0) ** 2 / 2.0


def hv_monte_carlo(phi: float, n_samples: int, seed: int) -> float:
    """Empirical D0 frequency of the hidden-variable model over ``n_samples`` draws."""
    if n_samples < 1:
        raise AnalysisError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    lambda1 = rng.integers(0, 2, size=n_samples)
    p_detector0 = np.where(lambda1 == 0, 0.5, math.cos(phi / 2.0) ** 2)
    hits = rng.random(n_samples) < p_detector0
    return float(np.mean(hits))


def visibility(curve: Iterable[Tuple[float, float]]) -> float:
    """Fringe contrast (E_max - E_min) / (E_max + E_min) of an intensity curve."""
    intensities = [float(value) for _, value in curve]
    if not intensities:
        raise EmptyCurveError("Cannot compute visibility of an empty curve")
    for value in intensities:
        if not (-INTENSITY_SLACK <= value <= 1.0 + INTENSITY_SLACK):
            raise AnalysisError(f"Intensity {value!r} lies outside [0, 1]")
    e_max, e_min = max(intensities), min(intensities)
    if e_max + e_min <= 0.0:
        return 0.0
    return min(1.0, max(0.0, (e_max - e_min) / (e_max + e_min)))


def visibility_theory(alpha: float) -> float:
    """Single-ancilla visibility sin^2(alpha)."""
    return math.sin(alpha) ** 2


def qm_single_curve(alpha: float, phi_values: Sequence[float]) -> Sequence[Tuple[float, float]]:
    """Single-ancilla D0 curve over ``phi_values``."""
    return [(phi, qm_single(alpha, phi).e0) for phi in phi_values]


def _check_branch(branch: int) -> None:
    if branch not in (0, 1):
        raise AnalysisError(f"Branch must be 0 or 1, got {branch!r}")
