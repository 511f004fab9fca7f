"""Sweep driver: exact and shot-sampled intensities over (alpha, phi) grids."""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .analytic import (
    DiscrepancyEntry,
    hv_intensity,
    printed_discrepancy,
    qm_entangled_simulated,
    visibility,
)
from .circuits import HERALD_QUBIT, SYSTEM_QUBIT, Circuit, Scheme, build_circuit, simulate
from .core import (
    IMPOSSIBLE_BRANCH,
    DensityMatrix,
    Projector,
    expectation,
    measure_probabilities,
    partial_trace,
    to_density,
)
from .exceptions import (
    ConfigValidationError,
    ImpossiblePostSelectionError,
    SamplingError,
)
from .noise import NoiseModel, apply_noise, apply_readout_error, measured_distribution

logger = logging.getLogger(__name__)

DEFAULT_SHOTS = 8192
DEFAULT_REPETITIONS = 3
DEFAULT_PHI_STEPS = 21
DEFAULT_ALPHA_STEPS = 5
DISTRIBUTION_TOLERANCE = 1e-9


class Mode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


def phi_grid(steps: int = DEFAULT_PHI_STEPS) -> Tuple[float, ...]:
    """Evenly spaced phases covering one period that always contain 0 and pi.

    Odd step counts span [0, 2pi] inclusive; even counts span [0, 2pi).
    """
    if steps < 1:
        raise ConfigValidationError(f"phi_steps must be positive, got {steps}")
    if steps == 1:
        return (0.0,)
    values = np.linspace(0.0, 2.0 * math.pi, steps, endpoint=bool(steps % 2))
    return tuple(float(v) for v in values)


def alpha_grid(steps: int = DEFAULT_ALPHA_STEPS) -> Tuple[float, ...]:
    """Evenly spaced ancilla angles over [0, pi/2] inclusive."""
    if steps < 1:
        raise ConfigValidationError(f"alpha_steps must be positive, got {steps}")
    if steps == 1:
        return (0.0,)
    return tuple(float(v) for v in np.linspace(0.0, math.pi / 2.0, steps))


def _check_angles(name: str, values: Sequence[float]) -> Tuple[float, ...]:
    try:
        values = tuple(values)
    except TypeError:
        raise ConfigValidationError(f"{name} must be a sequence of angles, got {values!r}")
    if not values:
        raise ConfigValidationError(f"{name} must not be empty")
    out = []
    for value in values:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigValidationError(f"{name} contains a non-numeric value: {value!r}")
        if not math.isfinite(value):
            raise ConfigValidationError(f"{name} contains a non-finite value: {value!r}")
        out.append(value)
    return tuple(out)


@dataclass(frozen=True)
class SweepConfig:
    """Everything that determines a sweep's output."""

    scheme: Scheme
    alpha_values: Tuple[float, ...]
    phi_values: Tuple[float, ...]
    mode: Mode = Mode.EXACT
    shots: int = DEFAULT_SHOTS
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    noise: Optional[NoiseModel] = None
    branch: Optional[int] = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError:
            raise ConfigValidationError(f"scheme: unsupported value {self.scheme!r}")
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
        except ValueError:
            raise ConfigValidationError(f"mode: unsupported value {self.mode!r}")
        object.__setattr__(self, "alpha_values", _check_angles("alpha_values", self.alpha_values))
        object.__setattr__(self, "phi_values", _check_angles("phi_values", self.phi_values))

        for name in ("shots", "repetitions", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigValidationError(f"{name}: expected an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.mode is Mode.SAMPLED and self.shots < 1:
            raise ConfigValidationError(f"shots: sampled mode needs at least 1 shot, got {self.shots}")
        if self.shots < 0:
            raise ConfigValidationError(f"shots: must not be negative, got {self.shots}")
        if self.repetitions < 1:
            raise ConfigValidationError(f"repetitions: must be at least 1, got {self.repetitions}")
        if self.seed < 0:
            raise ConfigValidationError(f"seed: must be a non-negative integer, got {self.seed}")
        if self.branch is not None:
            if self.branch not in (0, 1):
                raise ConfigValidationError(f"branch: must be 0 or 1, got {self.branch!r}")
            if self.scheme is not Scheme.EA_QDCE:
                raise ConfigValidationError("branch: post-selection applies to EA-QDCE only")
        if self.noise is not None and not isinstance(self.noise, NoiseModel):
            raise ConfigValidationError(f"noise: expected a NoiseModel, got {type(self.noise)!r}")

    @property
    def branches(self) -> Tuple[int, ...]:
        if self.scheme is Scheme.QDCE:
            return ()
        return (self.branch,) if self.branch is not None else (0, 1)

    @property
    def point_count(self) -> int:
        return len(self.alpha_values) * len(self.phi_values)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "scheme": self.scheme.value,
            "alpha_values": list(self.alpha_values),
            "phi_values": list(self.phi_values),
            "mode": self.mode.value,
            "shots": self.shots,
            "repetitions": self.repetitions,
            "seed": self.seed,
        }
        if self.branch is not None:
            out["branch"] = self.branch
        if self.noise is not None:
            out["noise"] = self.noise.to_dict()
        return out


@dataclass(frozen=True)
class IntensityRecord:
    """One sweep point (and herald branch, for EA-QDCE)."""

    scheme: Scheme
    alpha: float
    phi: float
    branch: Optional[int]
    mode: Mode
    e0: float
    e1: float
    joint_e0: Optional[float] = None
    branch_prob: Optional[float] = None
    shots_used: Optional[int] = None
    stderr0: Optional[float] = None
    stderr1: Optional[float] = None

    @property
    def sort_key(self) -> Tuple[float, float, int]:
        return (self.alpha, self.phi, -1 if self.branch is None else self.branch)


def sample_shots(distribution: Mapping[str, float], shots: int, seed: int) -> Dict[str, int]:
    """Multinomial draw of ``shots`` outcomes; identical seeds give identical counts."""
    if shots < 1:
        raise SamplingError(f"shots must be positive, got {shots}")
    if not distribution:
        raise SamplingError("Cannot sample from an empty distribution")
    keys = sorted(distribution)
    probabilities = np.array([float(distribution[k]) for k in keys])
    if not np.all(np.isfinite(probabilities)) or np.any(probabilities < -DISTRIBUTION_TOLERANCE):
        raise SamplingError("Distribution has negative or non-finite probabilities")
    total = float(probabilities.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
        raise SamplingError(f"Distribution is not normalized (sum={total!r})")
    probabilities = np.clip(probabilities, 0.0, None)
    probabilities = probabilities / probabilities.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probabilities)
    return {key: int(count) for key, count in zip(keys, counts)}


def derive_seed(seed: int, point_index: int, repetition: int) -> int:
    """Generator seed for one repetition of one sweep point, independent of scheduling."""
    sequence = np.random.SeedSequence(seed, spawn_key=(point_index, repetition))
    return int(sequence.generate_state(1)[0])


def _binomial_stderr(estimate: float, trials: int) -> float:
    return math.sqrt(max(estimate * (1.0 - estimate), 0.0) / trials)


class SweepRunner:
    """Evaluates every (alpha, phi) point of a :class:`SweepConfig`."""

    def __init__(self, config: SweepConfig, max_workers: Optional[int] = None) -> None:
        """Initialize the runner.

        Args:
            config: Sweep to evaluate.
            max_workers: Thread count for point evaluation. ``None`` or 1 runs
                sequentially; results do not depend on this value.
        """
        self.config = config
        self.max_workers = max_workers

    def run(self) -> List[IntensityRecord]:
        """Evaluate all points and return their records in grid order.

        Raises:
            DelaytronError: If a point cannot be evaluated.
        """
        config = self.config
        points = [
            (index, alpha, phi)
            for index, (alpha, phi) in enumerate(
                (a, p) for a in config.alpha_values for p in config.phi_values
            )
        ]
        logger.info(
            "Running %s %s sweep over %d point(s)",
            config.scheme.value,
            config.mode.value,
            len(points),
        )
        if config.noise is not None:
            config.noise.check_covers(build_circuit(config.scheme, 0.0, 0.0))

        if self.max_workers and self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                batches = list(pool.map(lambda point: self.evaluate_point(*point), points))
        else:
            batches = [self.evaluate_point(*point) for point in points]

        records = [record for batch in batches for record in batch]
        logger.info("Sweep produced %d record(s)", len(records))
        return records

    def evaluate_point(self, index: int, alpha: float, phi: float) -> List[IntensityRecord]:
        circuit = build_circuit(self.config.scheme, phi, alpha)
        logger.debug("Point %d circuit: %s", index, circuit.to_json(indent=None))
        if self.config.mode is Mode.EXACT:
            return self._exact_records(circuit)
        return self._sampled_records(index, circuit)

    def _density(self, circuit: Circuit) -> DensityMatrix:
        if self.config.noise is None:
            return to_density(simulate(circuit))
        return apply_noise(circuit, self.config.noise)

    def _record(self, circuit: Circuit, **values: Any) -> IntensityRecord:
        return IntensityRecord(
            scheme=self.config.scheme,
            alpha=float(circuit.alpha),  # type: ignore[arg-type]
            phi=float(circuit.phi),  # type: ignore[arg-type]
            mode=self.config.mode,
            **values,
        )

    def _exact_records(self, circuit: Circuit) -> List[IntensityRecord]:
        rho = self._density(circuit)
        noise = self.config.noise

        if self.config.scheme is Scheme.QDCE:
            system = partial_trace(rho, keep=[SYSTEM_QUBIT])
            marginal = {
                "0": expectation(system, Projector(0, 0)),
                "1": expectation(system, Projector(0, 1)),
            }
            if noise is not None:
                marginal = apply_readout_error(marginal, noise, qubits=[SYSTEM_QUBIT])
            return [self._record(circuit, branch=None, e0=marginal["0"], e1=marginal["1"])]

        joint = {
            f"{s}{h}": expectation(rho, [Projector(SYSTEM_QUBIT, s), Projector(HERALD_QUBIT, h)])
            for s in (0, 1)
            for h in (0, 1)
        }
        if noise is not None:
            joint = apply_readout_error(joint, noise, qubits=[SYSTEM_QUBIT, HERALD_QUBIT])

        records = []
        for branch in self.config.branches:
            probability = joint[f"0{branch}"] + joint[f"1{branch}"]
            if probability < IMPOSSIBLE_BRANCH:
                raise ImpossiblePostSelectionError(
                    f"Herald branch {branch} is impossible at alpha={circuit.alpha}, phi={circuit.phi}"
                )
            records.append(
                self._record(
                    circuit,
                    branch=branch,
                    e0=joint[f"0{branch}"] / probability,
                    e1=joint[f"1{branch}"] / probability,
                    joint_e0=joint[f"0{branch}"],
                    branch_prob=probability,
                )
            )
        return records

    def _distribution(self, circuit: Circuit) -> Dict[str, float]:
        if self.config.noise is None:
            return measure_probabilities(simulate(circuit))
        return measured_distribution(apply_noise(circuit, self.config.noise), self.config.noise)

    def _sampled_records(self, index: int, circuit: Circuit) -> List[IntensityRecord]:
        config = self.config
        distribution = self._distribution(circuit)
        counts: Counter = Counter()
        for repetition in range(config.repetitions):
            counts.update(
                sample_shots(distribution, config.shots, derive_seed(config.seed, index, repetition))
            )
        total = config.shots * config.repetitions

        if config.scheme is Scheme.QDCE:
            hits = sum(n for key, n in counts.items() if key[SYSTEM_QUBIT] == "0")
            e0 = hits / total
            stderr = _binomial_stderr(e0, total)
            return [
                self._record(
                    circuit,
                    branch=None,
                    e0=e0,
                    e1=1.0 - e0,
                    shots_used=total,
                    stderr0=stderr,
                    stderr1=stderr,
                )
            ]

        records = []
        for branch in config.branches:
            in_branch = sum(n for key, n in counts.items() if key[HERALD_QUBIT] == str(branch))
            if in_branch == 0:
                raise SamplingError(
                    f"No shot landed in herald branch {branch} at point {index}",
                    "increase shots or repetitions",
                )
            hits = sum(
                n
                for key, n in counts.items()
                if key[HERALD_QUBIT] == str(branch) and key[SYSTEM_QUBIT] == "0"
            )
            e0 = hits / in_branch
            stderr = _binomial_stderr(e0, in_branch)
            records.append(
                self._record(
                    circuit,
                    branch=branch,
                    e0=e0,
                    e1=1.0 - e0,
                    joint_e0=hits / total,
                    branch_prob=in_branch / total,
                    shots_used=total,
                    stderr0=stderr,
                    stderr1=stderr,
                )
            )
        return records


def run_sweep(config: SweepConfig, max_workers: Optional[int] = None) -> List[IntensityRecord]:
    """Evaluate a sweep. Output depends only on ``config``."""
    return SweepRunner(config, max_workers=max_workers).run()


@dataclass(frozen=True)
class VisibilityPoint:
    alpha: float
    visibility: float
    theory: Optional[float]
    branch: Optional[int] = None


def visibility_sweep(
    config: SweepConfig, max_workers: Optional[int] = None
) -> List[VisibilityPoint]:
    """Visibility of the D0 curve for every alpha (and herald branch) of a sweep."""
    curves: Dict[Tuple[float, Optional[int]], List[Tuple[float, float]]] = {}
    for record in run_sweep(config, max_workers=max_workers):
        curves.setdefault((record.alpha, record.branch), []).append((record.phi, record.e0))

    points = []
    for (alpha, branch), curve in curves.items():
        # Noiseless theory: sin^2 on the single-ancilla and herald-0 curves, cos^2 on herald-1.
        theory = math.cos(alpha) ** 2 if branch == 1 else math.sin(alpha) ** 2
        points.append(VisibilityPoint(alpha, visibility(curve), theory, branch))
    return points


@dataclass(frozen=True)
class ComparisonRow:
    alpha: float
    phi: float
    branch: int
    qm_e0: float
    qm_joint_e0: float
    hv_e0: float

    @property
    def divergence(self) -> float:
        return abs(self.qm_e0 - self.hv_e0)


@dataclass(frozen=True)
class Divergence:
    alpha: float
    branch: int
    value: float
    phi: float


@dataclass(frozen=True)
class ComparisonTable:
    """Quantum (post-selected, simulated) versus hidden-variable D0 curves."""

    phi_values: Tuple[float, ...]
    branch: int
    rows: Tuple[ComparisonRow, ...]
    max_divergence: Tuple[Divergence, ...]
    discrepancies: Tuple[DiscrepancyEntry, ...] = field(default=())

    def qm_curve(self, alpha: float) -> List[Tuple[float, float]]:
        return [(row.phi, row.qm_e0) for row in self.rows if row.alpha == alpha]

    def hv_curve(self, alpha: float) -> List[Tuple[float, float]]:
        return [(row.phi, row.hv_e0) for row in self.rows if row.alpha == alpha]


DIVERGENCE_TIE = 1e-12


def compare_qm_hv(
    alpha_values: Sequence[float], phi_grid_values: Sequence[float], branch: int = 0
) -> ComparisonTable:
    """Tabulate simulated post-selected QM intensities against the HV prediction."""
    alphas = _check_angles("alpha_values", alpha_values)
    phis = _check_angles("phi_values", phi_grid_values)
    if branch not in (0, 1):
        raise ConfigValidationError(f"branch: must be 0 or 1, got {branch!r}")

    hv_column = [hv_intensity(phi) for phi in phis]
    rows: List[ComparisonRow] = []
    divergences: List[Divergence] = []
    for alpha in alphas:
        alpha_rows = []
        for phi, hv in zip(phis, hv_column):
            conditional, joint, _ = qm_entangled_simulated(alpha, phi, branch)
            alpha_rows.append(ComparisonRow(alpha, phi, branch, conditional.e0, joint.e0, hv))
        largest = max(row.divergence for row in alpha_rows)
        at = next(row for row in alpha_rows if row.divergence >= largest - DIVERGENCE_TIE)
        divergences.append(Divergence(alpha, branch, largest, at.phi))
        rows.extend(alpha_rows)

    reference_alphas = sorted(set((0.0,) + alphas))
    discrepancies = tuple(
        printed_discrepancy(alpha, 0.0, b) for alpha in reference_alphas for b in (0, 1)
    )
    return ComparisonTable(phis, branch, tuple(rows), tuple(divergences), discrepancies)

