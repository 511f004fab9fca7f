"""Tests for the sweep driver, sampling and the QM vs HV comparison."""

import math
import time

import numpy as np
import pytest

from delaytron.analytic import hv_intensity, qm_single
from delaytron.circuits import Scheme, build_ea_qdce, simulate
from delaytron.core import Projector, expectation, partial_trace, to_density
from delaytron.exceptions import ConfigValidationError, MissingNoiseEntryError, SamplingError
from delaytron.experiment import (
    DEFAULT_PHI_STEPS,
    Mode,
    SweepConfig,
    SweepRunner,
    alpha_grid,
    compare_qm_hv,
    derive_seed,
    phi_grid,
    run_sweep,
    sample_shots,
    visibility_sweep,
)
from delaytron.noise import NoiseModel, QubitNoise
from delaytron.parser import bundled_config_path, load_noise_model


class TestGrids:
    """Test cases for the default angle grids."""

    def test_default_phi_grid_spans_closed_period(self):
        grid = phi_grid()
        assert len(grid) == DEFAULT_PHI_STEPS == 21
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(2 * math.pi)
        assert grid[10] == pytest.approx(math.pi)

    def test_even_phi_grid_contains_pi(self):
        """Even counts use a half-open period so pi stays on the grid."""
        grid = phi_grid(256)
        assert grid[128] == pytest.approx(math.pi, abs=1e-15)
        assert grid[-1] < 2 * math.pi

    def test_single_step(self):
        assert phi_grid(1) == (0.0,)
        assert alpha_grid(1) == (0.0,)

    def test_default_alpha_grid(self):
        assert alpha_grid() == pytest.approx((0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2))

    def test_non_positive_steps(self):
        with pytest.raises(ConfigValidationError):
            phi_grid(0)
        with pytest.raises(ConfigValidationError):
            alpha_grid(-2)


class TestSweepConfig:
    """Test cases for SweepConfig validation."""

    def test_defaults(self):
        config = SweepConfig("QDCE", (0.0,), (0.0,))
        assert config.scheme is Scheme.QDCE
        assert config.mode is Mode.EXACT
        assert config.shots == 8192
        assert config.repetitions == 3
        assert config.branches == ()

    def test_ea_branches(self):
        assert SweepConfig("EA-QDCE", (0.0,), (0.0,)).branches == (0, 1)
        assert SweepConfig("EA-QDCE", (0.0,), (0.0,), branch=1).branches == (1,)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigValidationError) as exc_info:
            SweepConfig("MZI", (0.0,), (0.0,))

        assert "scheme" in str(exc_info.value)

    def test_empty_alpha_values(self):
        with pytest.raises(ConfigValidationError) as exc_info:
            SweepConfig("QDCE", (), (0.0,))

        assert "alpha_values" in str(exc_info.value)

    def test_numpy_angle_arrays(self):
        config = SweepConfig("QDCE", np.linspace(0, math.pi / 2, 3), np.array([0.0, 1.0]))
        assert config.alpha_values == pytest.approx((0.0, math.pi / 4, math.pi / 2))
        assert all(type(a) is float for a in config.alpha_values)
        assert config.phi_values == (0.0, 1.0)

    def test_empty_numpy_array(self):
        with pytest.raises(ConfigValidationError):
            SweepConfig("QDCE", np.array([]), (0.0,))

    def test_scalar_angles(self):
        with pytest.raises(ConfigValidationError):
            SweepConfig("QDCE", 0.5, (0.0,))

    def test_non_finite_phi(self):
        with pytest.raises(ConfigValidationError):
            SweepConfig("QDCE", (0.0,), (float("nan"),))

    def test_sampled_needs_shots(self):
        with pytest.raises(ConfigValidationError) as exc_info:
            SweepConfig("QDCE", (0.0,), (0.0,), mode="sampled", shots=0)

        assert "shots" in str(exc_info.value)

    def test_exact_mode_ignores_zero_shots(self):
        assert SweepConfig("QDCE", (0.0,), (0.0,), shots=0).shots == 0

    def test_negative_seed(self):
        with pytest.raises(ConfigValidationError):
            SweepConfig("QDCE", (0.0,), (0.0,), seed=-1)

    def test_branch_requires_entangled_scheme(self):
        with pytest.raises(ConfigValidationError):
            SweepConfig("QDCE", (0.0,), (0.0,), branch=0)


class TestSampleShots:
    """Test cases for multinomial shot sampling."""

    def test_certain_outcome(self):
        assert sample_shots({"0": 1.0}, 100, seed=0) == {"0": 100}

    def test_fair_coin_concentration(self):
        shots = 10**5
        counts = sample_shots({"0": 0.5, "1": 0.5}, shots, seed=11)
        assert sum(counts.values()) == shots
        assert abs(counts["0"] / shots - 0.5) <= 5 * math.sqrt(0.25 / shots)

    def test_same_seed_same_counts(self):
        distribution = {"00": 0.1, "01": 0.2, "10": 0.3, "11": 0.4}
        assert sample_shots(distribution, 500, seed=5) == sample_shots(distribution, 500, seed=5)

    def test_not_normalized(self):
        with pytest.raises(SamplingError):
            sample_shots({"0": 0.5, "1": 0.4}, 10, seed=0)

    def test_empty_distribution(self):
        with pytest.raises(SamplingError):
            sample_shots({}, 10, seed=0)

    def test_derive_seed_is_stable_and_distinct(self):
        assert derive_seed(0, 3, 1) == derive_seed(0, 3, 1)
        assert derive_seed(0, 3, 1) != derive_seed(0, 3, 2)
        assert derive_seed(0, 3, 1) != derive_seed(1, 3, 1)


class TestExactSweep:
    """Test cases for exact-mode sweeps."""

    def test_qdce_matches_closed_form_on_dense_grid(self):
        alphas = tuple(np.linspace(0, math.pi / 2, 16))
        phis = tuple(np.linspace(0, 2 * math.pi, 64))
        started = time.perf_counter()
        records = run_sweep(SweepConfig("QDCE", alphas, phis))
        assert time.perf_counter() - started <= 1.0
        assert len(records) == 16 * 64
        worst = max(abs(r.e0 - qm_single(r.alpha, r.phi).e0) for r in records)
        assert worst <= 1e-10

    def test_extreme_alphas(self):
        records = run_sweep(SweepConfig("QDCE", (0.0, math.pi / 2), phi_grid()))
        for record in records:
            expected = 0.5 if record.alpha == 0.0 else math.cos(record.phi / 2) ** 2
            assert abs(record.e0 - expected) <= 1e-12
            assert record.stderr0 is None
            assert record.branch is None

    def test_ea_branch_structure(self):
        records = run_sweep(SweepConfig("EA-QDCE", (0.0, math.pi / 2), phi_grid()))
        for record in records:
            fringe = math.cos(record.phi / 2) ** 2
            flat_branch = 0 if record.alpha == 0.0 else 1
            expected = 0.5 if record.branch == flat_branch else fringe
            assert abs(record.e0 - expected) <= 1e-10

    def test_ea_branch_probabilities_sum_to_one(self):
        records = run_sweep(SweepConfig("EA-QDCE", alpha_grid(), phi_grid(9)))
        totals = {}
        for record in records:
            totals[(record.alpha, record.phi)] = totals.get((record.alpha, record.phi), 0.0) + record.branch_prob
        assert all(abs(total - 1.0) <= 1e-12 for total in totals.values())

    def test_ea_law_of_total_probability(self):
        """Joint D0 intensities summed over herald branches equal the unconditioned intensity."""
        records = run_sweep(SweepConfig("EA-QDCE", alpha_grid(), phi_grid(7)))
        joint = {}
        for record in records:
            joint[(record.alpha, record.phi)] = joint.get((record.alpha, record.phi), 0.0) + record.joint_e0
        for (alpha, phi), total in joint.items():
            system = partial_trace(to_density(simulate(build_ea_qdce(phi, alpha))), [0])
            assert total == pytest.approx(expectation(system, Projector(0, 0)), abs=1e-10)

    def test_single_branch(self):
        records = run_sweep(SweepConfig("EA-QDCE", (0.0,), (0.0, 1.0), branch=1))
        assert {r.branch for r in records} == {1}

    def test_parallel_matches_sequential(self):
        config = SweepConfig("EA-QDCE", alpha_grid(3), phi_grid(5))
        assert run_sweep(config, max_workers=4) == run_sweep(config)

    def test_runner_evaluate_point(self):
        runner = SweepRunner(SweepConfig("QDCE", (0.0,), (0.0,)))
        (record,) = runner.evaluate_point(0, math.pi / 2, 0.0)
        assert record.e0 == pytest.approx(1.0, abs=1e-12)


class TestSampledSweep:
    """Test cases for shot-sampled sweeps."""

    def test_qdce_within_five_stderr(self):
        config = SweepConfig("QDCE", alpha_grid(), phi_grid(), mode="sampled", shots=8192, repetitions=3, seed=2024)
        records = run_sweep(config)
        inside = 0
        for record in records:
            exact = qm_single(record.alpha, record.phi).e0
            assert record.shots_used == 8192 * 3
            if abs(record.e0 - exact) <= 5 * record.stderr0 + 1e-9:
                inside += 1
        assert inside >= 0.99 * len(records)

    def test_stderr_formula(self):
        config = SweepConfig("QDCE", (math.pi / 4,), (1.0,), mode="sampled", shots=1000, repetitions=2, seed=1)
        (record,) = run_sweep(config)
        expected = math.sqrt(record.e0 * (1 - record.e0) / 2000)
        assert record.stderr0 == pytest.approx(expected)
        assert record.e1 == pytest.approx(1 - record.e0)

    def test_ea_post_selected_stderr_uses_branch_shots(self):
        config = SweepConfig("EA-QDCE", (math.pi / 4,), (0.5,), mode="sampled", shots=4000, repetitions=1, seed=3)
        for record in run_sweep(config):
            in_branch = round(record.branch_prob * record.shots_used)
            assert record.stderr0 == pytest.approx(math.sqrt(record.e0 * (1 - record.e0) / in_branch))
            assert record.joint_e0 == pytest.approx(record.e0 * record.branch_prob)

    def test_seed_determinism(self):
        config = SweepConfig("EA-QDCE", alpha_grid(3), phi_grid(5), mode="sampled", shots=256, seed=9)
        assert run_sweep(config) == run_sweep(config)
        assert run_sweep(config, max_workers=3) == run_sweep(config)

    def test_different_seeds_differ(self):
        base = dict(scheme="QDCE", alpha_values=(math.pi / 4,), phi_values=(1.0,), mode="sampled", shots=512)
        first = run_sweep(SweepConfig(seed=1, **base))
        second = run_sweep(SweepConfig(seed=2, **base))
        assert first != second


class TestNoisySweep:
    """Test cases for sweeps with a noise model."""

    def setup_method(self):
        self.melbourne = load_noise_model(bundled_config_path())

    def test_bundled_noise_lowers_visibility(self):
        config = SweepConfig("QDCE", (math.pi / 2,), phi_grid(), noise=self.melbourne)
        (point,) = visibility_sweep(config)
        assert 0.5 < point.visibility < 1.0

    def test_noise_never_raises_visibility_away_from_zero_alpha(self):
        alphas = alpha_grid(9)[1:]
        clean = visibility_sweep(SweepConfig("QDCE", alphas, phi_grid()))
        noisy = visibility_sweep(SweepConfig("QDCE", alphas, phi_grid(), noise=self.melbourne))
        for a, b in zip(clean, noisy):
            assert b.visibility <= a.visibility + 1e-10

    def test_gate_noise_leaks_fringe_at_zero_alpha(self):
        """Depolarizing the ancilla after RY(0) lets the beam splitter act on a small fraction of runs."""
        clean = visibility_sweep(SweepConfig("QDCE", (0.0,), phi_grid()))
        noisy = visibility_sweep(SweepConfig("QDCE", (0.0,), phi_grid(), noise=self.melbourne))
        assert clean[0].visibility <= 1e-12
        assert 0.0 < noisy[0].visibility < 0.01

    def test_zero_noise_reproduces_exact(self):
        zero = NoiseModel(
            per_qubit={0: QubitNoise(), 1: QubitNoise(), 2: QubitNoise()},
            cnot_error={(1, 0): 0.0, (1, 2): 0.0},
        )
        for scheme in ("QDCE", "EA-QDCE"):
            clean = run_sweep(SweepConfig(scheme, alpha_grid(), phi_grid(9)))
            noisy = run_sweep(SweepConfig(scheme, alpha_grid(), phi_grid(9), noise=zero))
            for a, b in zip(clean, noisy):
                assert abs(a.e0 - b.e0) <= 1e-12
                assert abs(a.e1 - b.e1) <= 1e-12

    def test_noisy_ea_branches(self):
        records = run_sweep(SweepConfig("EA-QDCE", (0.0,), (0.0, math.pi), noise=self.melbourne))
        assert len(records) == 4
        for record in records:
            assert 0.0 <= record.e0 <= 1.0
            assert record.e0 + record.e1 == pytest.approx(1.0, abs=1e-12)

    def test_noisy_sampled_sweep(self):
        config = SweepConfig(
            "EA-QDCE", (math.pi / 4,), (0.0,), mode="sampled", shots=1024, seed=0, noise=self.melbourne
        )
        records = run_sweep(config)
        assert sum(r.branch_prob for r in records) == pytest.approx(1.0)

    def test_uncovered_noise_model(self):
        partial = NoiseModel(per_qubit={0: QubitNoise(), 1: QubitNoise()}, cnot_error={(1, 0): 0.0})
        with pytest.raises(MissingNoiseEntryError):
            run_sweep(SweepConfig("EA-QDCE", (0.0,), (0.0,), noise=partial))


class TestVisibilitySweep:
    """Test cases for visibility extraction from sweeps."""

    def test_sin_squared_law(self):
        alphas = alpha_grid(9)
        points = visibility_sweep(SweepConfig("QDCE", alphas, phi_grid(256)))
        for point in points:
            assert point.visibility == pytest.approx(math.sin(point.alpha) ** 2, abs=1e-6)
        assert points[0].visibility == pytest.approx(0.0, abs=1e-9)
        assert points[-1].visibility == pytest.approx(1.0, abs=1e-9)

    def test_herald_branch_theory(self):
        points = visibility_sweep(SweepConfig("EA-QDCE", (0.0,), phi_grid()))
        by_branch = {p.branch: p for p in points}
        assert by_branch[0].visibility == pytest.approx(0.0, abs=1e-9)
        assert by_branch[1].visibility == pytest.approx(1.0, abs=1e-9)
        assert by_branch[1].theory == pytest.approx(1.0)


class TestCompareQmHv:
    """Test cases for the QM vs hidden-variable comparison."""

    def setup_method(self):
        self.alphas = (0.0, math.pi / 4, math.pi / 2)
        self.table = compare_qm_hv(self.alphas, phi_grid())

    def test_hv_column_identical_across_alpha(self):
        reference = self.table.hv_curve(0.0)
        for alpha in self.alphas[1:]:
            assert self.table.hv_curve(alpha) == reference
        for phi, value in reference:
            assert value == hv_intensity(phi)

    def test_qm_curves_differ_between_extremes(self):
        flat = dict(self.table.qm_curve(0.0))
        fringe = dict(self.table.qm_curve(math.pi / 2))
        assert max(abs(flat[phi] - fringe[phi]) for phi in flat) >= 0.4

    def test_max_divergence_at_zero_alpha(self):
        entry = self.table.max_divergence[0]
        assert entry.alpha == 0.0
        assert entry.value == pytest.approx(0.25, abs=1e-10)
        assert entry.phi == 0.0

    def test_quarter_pi_agrees_with_hidden_variables(self):
        assert self.table.max_divergence[1].value == pytest.approx(0.0, abs=1e-10)

    def test_discrepancies_include_origin(self):
        origin = [d for d in self.table.discrepancies if d.alpha == 0.0 and d.branch == 0]
        assert len(origin) == 1
        assert origin[0].printed == pytest.approx(1.0)
        assert origin[0].conditional == pytest.approx(0.5, abs=1e-10)
        assert origin[0].joint == pytest.approx(0.25, abs=1e-10)

    def test_branch_validation(self):
        with pytest.raises(ConfigValidationError):
            compare_qm_hv((0.0,), (0.0,), branch=3)

    def test_empty_grid(self):
        with pytest.raises(ConfigValidationError):
            compare_qm_hv((), (0.0,))
