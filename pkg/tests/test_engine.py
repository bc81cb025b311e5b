import dataclasses
import logging

import numpy as np
import pytest

from config import ConfigManager
from modules.core import NotConvergedError, TimeOutOfRangeError, unvec, vec
from modules.engine import (
    IntegrationConfig,
    evolve_no_tick,
    matrix_exponential_states,
    matrix_exponential_survival,
    normalized_state_at,
    top_level_population,
)
from modules.stats import evolution_violations, sandwich_violations


class TestIntegrationConfig:
    def test_defaults(self, config):
        assert config.abs_tol == 1e-10
        assert config.rel_tol == 1e-8
        assert config.survival_cutoff == 1e-9
        assert config.horizon_for(2.0) == pytest.approx(5e3)

    def test_explicit_horizon_wins(self):
        assert IntegrationConfig(max_horizon=7.0).horizon_for(100.0) == 7.0

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            IntegrationConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            IntegrationConfig(survival_cutoff=1.5)
        with pytest.raises(ValueError):
            IntegrationConfig(max_horizon=-1.0)

    def test_from_settings_ignores_unset_overrides(self):
        config = IntegrationConfig.from_settings(abs_tol=None, rel_tol=1e-9)
        assert config.abs_tol == 1e-10
        assert config.rel_tol == 1e-9

    def test_from_settings_rejects_unknown_override(self):
        with pytest.raises(ValueError):
            IntegrationConfig.from_settings(step_size=0.1)

    def test_from_settings_reads_manager(self, tmp_path):
        (tmp_path / "integration.json").write_text('{"rel_tol": 1e-7, "unused_key": 3}')
        config = IntegrationConfig.from_settings(ConfigManager(str(tmp_path)))
        assert config.rel_tol == 1e-7
        assert config.abs_tol == 1e-10

    def test_tightened(self, config):
        tight = config.tightened()
        assert tight.abs_tol == pytest.approx(config.abs_tol / 2)
        assert tight.rel_tol == pytest.approx(config.rel_tol / 2)


class TestExponentialClock:
    def test_survival_is_exponential(self, exponential_evolution):
        evolution = exponential_evolution
        assert evolution.converged
        assert evolution.status == "converged"
        assert evolution.survival_at_horizon <= 1e-9
        assert np.allclose(evolution.survival, np.exp(-evolution.times), atol=1e-7)

    def test_tick_pdf_equals_rate_times_survival(self, exponential_evolution):
        evolution = exponential_evolution
        assert np.allclose(evolution.tick_pdf, evolution.survival, atol=1e-12)
        assert evolution.gamma == pytest.approx(1.0)
        assert evolution.tail_rate == pytest.approx(1.0, rel=1e-6)

    def test_top_level_population_stays_at_one(self, exponential_evolution):
        assert np.allclose(top_level_population(exponential_evolution, 1.0), 1.0, atol=1e-6)
        with pytest.raises(ValueError):
            top_level_population(exponential_evolution, 0.0)

    def test_integrated_state(self, exponential_evolution):
        assert np.allclose(exponential_evolution.integrated_state(), np.diag([0.0, 1.0]), atol=1e-6)

    def test_unnormalized_states_carry_the_survival(self, exponential_evolution):
        states = exponential_evolution.unnormalized_states
        assert len(states) == len(exponential_evolution.times)
        assert [s.trace for s in states] == pytest.approx(list(exponential_evolution.survival), abs=1e-12)

    def test_requested_sample_times_are_on_the_grid(self, exponential_model):
        config = IntegrationConfig(sample_times=(0.5, 1.25, 3.0))
        evolution = evolve_no_tick(exponential_model, config)
        for t in (0.5, 1.25, 3.0):
            index = int(np.flatnonzero(evolution.times == t)[0])
            assert evolution.survival[index] == pytest.approx(np.exp(-t), abs=1e-7)

    def test_flipped_anticommutator_grows_the_trace(self, exponential_model, config):
        evolution = evolve_no_tick(exponential_model, dataclasses.replace(config, flip_tick_anticommutator=True))
        assert not evolution.converged
        assert evolution.status == "trace_growth"
        assert sandwich_violations(evolution)


class TestDarkClock:
    @pytest.fixture
    def dark_evolution(self, dark_model):
        return evolve_no_tick(dark_model, IntegrationConfig(max_horizon=50.0))

    def test_not_converged(self, dark_evolution):
        assert not dark_evolution.converged
        assert dark_evolution.status == "max_horizon"
        assert dark_evolution.horizon == pytest.approx(50.0)
        assert dark_evolution.survival_at_horizon == pytest.approx(1.0)

    def test_integrated_state_needs_convergence(self, dark_evolution):
        with pytest.raises(NotConvergedError):
            dark_evolution.integrated_state()

    def test_warns_when_not_converged(self, dark_model, caplog):
        with caplog.at_level(logging.WARNING):
            evolve_no_tick(dark_model, IntegrationConfig(max_horizon=10.0))
        assert "max_horizon" in caplog.text


class TestRabiClock:
    def test_matches_matrix_exponential(self, rabi_model, rabi_evolution):
        times = np.linspace(0.0, 20.0, 41)
        reference = matrix_exponential_survival(rabi_model, times)
        assert np.allclose(rabi_evolution.survival_on(times), reference, atol=1e-7)

    def test_grid_states_match_matrix_exponential(self, rabi_model, rabi_evolution):
        times = rabi_evolution.times[::25]
        reference = matrix_exponential_survival(rabi_model, times)
        assert np.allclose(rabi_evolution.survival[::25], reference, atol=1e-7)

    def test_survival_is_sandwiched(self, rabi_evolution):
        assert rabi_evolution.converged
        assert sandwich_violations(rabi_evolution) == []
        assert evolution_violations(rabi_evolution) == []

    def test_conditional_rate_is_bounded_by_gamma(self, rabi_evolution):
        assert np.all(rabi_evolution.conditional_rate <= rabi_evolution.gamma + 1e-8)
        assert np.all(rabi_evolution.conditional_rate >= 0.0)

    def test_tick_pdf_is_minus_survival_derivative(self, rabi_evolution):
        h = 1e-4
        for t in (0.3, 1.0, 4.0):
            derivative = (rabi_evolution.survival_at(t + h) - rabi_evolution.survival_at(t - h)) / (2 * h)
            assert -derivative == pytest.approx(rabi_evolution.tick_pdf_at(t), abs=1e-6)

    def test_tighter_tolerances_agree(self, rabi_model, rabi_evolution, config):
        tight = evolve_no_tick(rabi_model, config.tightened())
        times = np.linspace(0.0, 10.0, 21)
        assert np.allclose(tight.survival_on(times), rabi_evolution.survival_on(times), atol=1e-7)

    def test_normalized_state(self, rabi_evolution):
        for t in (0.0, 0.7, 5.0):
            state = normalized_state_at(rabi_evolution, t)
            assert state.trace == pytest.approx(1.0)
            assert np.all(np.linalg.eigvalsh(state.matrix) >= -1e-12)

    def test_normalized_state_matches_matrix_exponential(self, rabi_model, rabi_evolution):
        reference = matrix_exponential_states(rabi_model, [0.3])[0]
        reference = reference / np.trace(reference).real
        assert np.allclose(normalized_state_at(rabi_evolution, 0.3).matrix, reference, atol=1e-8)

    def test_unnormalized_state_matches_matrix_exponential(self, rabi_model, rabi_evolution):
        for t in (1.7, 12.0):
            reference = matrix_exponential_states(rabi_model, [t])[0]
            assert np.allclose(rabi_evolution.state_at(t), reference, atol=1e-8)

    def test_integrated_state_matches_resolvent(self, rabi_model, rabi_evolution):
        resolvent = np.linalg.pinv(-rabi_model.generator())
        expected = unvec(resolvent @ vec(rabi_model.initial_state.matrix), 2)
        assert np.allclose(rabi_evolution.integrated_state(), expected, atol=1e-6)

    def test_tail_rate_follows_the_slowest_decay(self, rabi_model, rabi_evolution):
        # Survival keeps a small Rabi ripple on top of the slowest mode
        slowest = min(-np.linalg.eigvals(rabi_model.generator()).real)
        assert rabi_evolution.tail_rate == pytest.approx(slowest, rel=0.1)

    def test_starts_in_ground_state(self, rabi_evolution):
        assert np.allclose(normalized_state_at(rabi_evolution, 0.0).matrix, np.diag([1.0, 0.0]))

    def test_times_outside_window(self, rabi_evolution):
        with pytest.raises(TimeOutOfRangeError):
            rabi_evolution.state_at(-1.0)
        with pytest.raises(TimeOutOfRangeError):
            normalized_state_at(rabi_evolution, 2 * rabi_evolution.horizon)
        with pytest.raises(TimeOutOfRangeError):
            rabi_evolution.survival_on(np.array([0.0, 2 * rabi_evolution.horizon]))

    def test_states_are_read_only(self, rabi_evolution):
        with pytest.raises(ValueError):
            rabi_evolution.survival[0] = 0.5
