import logging
import math

import numpy as np
import pytest

from modules.core import hermiticity_error
from modules.engine import evolve_no_tick
from modules.engine.evolution import MAX_CHECKPOINTS
from modules.models import (
    LadderParams,
    bose_einstein_occupation,
    build_cascade_clock,
    build_ladder_clock,
    build_rabi_clock,
    build_random_clock,
    tick_reachable,
)
from modules.oracles import ErlangOracle, erlang_survival
from modules.stats import tick_statistics


class TestSimpleClocks:
    def test_exponential(self, exponential_model):
        assert exponential_model.dim == 2
        assert exponential_model.gamma == pytest.approx(1.0)
        assert exponential_model.notick_lindblad_ops == ()

    def test_rabi(self, rabi_model):
        assert rabi_model.gamma == pytest.approx(1.0)
        assert np.allclose(rabi_model.hamiltonian, [[0.0, 2.5], [2.5, 0.0]])

    def test_invalid_rates(self):
        with pytest.raises(ValueError):
            build_rabi_clock(0.0, 1.0)
        with pytest.raises(ValueError):
            build_cascade_clock(1.0, 0)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_cascade_is_erlang(self, m, config):
        model = build_cascade_clock(1.0, m)
        assert model.dim == m + 1
        assert len(model.notick_lindblad_ops) == m - 1

        evolution = evolve_no_tick(model, config)
        reference = erlang_survival(ErlangOracle(gamma=1.0, m=m), np.asarray(evolution.times))
        assert np.allclose(evolution.survival, reference, atol=1e-7)
        assert tick_statistics(evolution, model).accuracy_N == pytest.approx(m, rel=1e-5)


class TestLadderClock:
    def test_default_structure(self, ladder_model):
        assert ladder_model.dim == 12
        assert len(ladder_model.notick_lindblad_ops) == 4
        assert len(ladder_model.tick_jumps) == 1
        assert ladder_model.gamma == pytest.approx(0.1)
        assert hermiticity_error(ladder_model.hamiltonian) == 0.0
        assert ladder_model.initial_state.trace == pytest.approx(1.0)
        assert ladder_model.metadata["builder"] == "ladder"

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_interaction_terms(self, d):
        model = build_ladder_clock(LadderParams(d=d))
        hamiltonian = np.asarray(model.hamiltonian)
        off_diagonal = hamiltonian - np.diag(np.diag(hamiltonian))
        assert model.dim == 4 * d
        assert np.count_nonzero(off_diagonal) == 2 * (d - 1)
        assert np.allclose(off_diagonal[off_diagonal != 0], 0.1)

    def test_ladder_starts_at_the_bottom(self, ladder_model):
        ladder_ground = np.kron(np.eye(4), np.diag([1.0, 0.0, 0.0]))
        assert np.trace(ladder_ground @ ladder_model.initial_state.matrix).real == pytest.approx(1.0)

    def test_detailed_balance(self, ladder_model):
        params = LadderParams.default()
        up_c, down_c, up_h, down_h = (np.linalg.norm(op) ** 2 for op in ladder_model.notick_lindblad_ops)
        assert up_c / down_c == pytest.approx(math.exp(-params.beta_c * params.omega_c), rel=1e-12)
        assert up_h / down_h == pytest.approx(math.exp(-params.beta_h * params.omega_h), rel=1e-12)

    def test_zero_temperature_keeps_the_zero_operator(self):
        model = build_ladder_clock(LadderParams(beta_c=math.inf))
        assert len(model.notick_lindblad_ops) == 4
        assert not np.any(model.notick_lindblad_ops[0])

    def test_temperature_order(self):
        with pytest.raises(ValueError):
            LadderParams(beta_c=0.1, beta_h=10.0)
        with pytest.raises(ValueError):
            LadderParams(beta_c=1.0, beta_h=1.0)
        with pytest.raises(ValueError):
            LadderParams(d=1)

    def test_off_resonance_warning(self, caplog):
        params = LadderParams(omega_h=4.0)
        assert not params.resonant
        assert params.detuning == pytest.approx(1.0)
        with caplog.at_level(logging.WARNING):
            build_ladder_clock(params)
        assert "off resonance" in caplog.text

    def test_with_updates_skips_unset_values(self):
        params = LadderParams.default().with_updates(g=0.2, beta_c=None)
        assert params.g == 0.2
        assert params.beta_c == 10.0

    def test_ladder_respects_every_bound(self, ladder_model, ladder_evolution):
        assert ladder_evolution.converged
        stats = tick_statistics(ladder_evolution, ladder_model)
        assert stats.violations() == []
        assert stats.accuracy_N > 1.0

    def test_ladder_keeps_bounded_checkpoints(self, ladder_evolution):
        assert len(ladder_evolution.checkpoint_times) <= MAX_CHECKPOINTS + 1
        assert ladder_evolution.coefficients.shape == (ladder_evolution.n_steps, 3, 5)

    @pytest.mark.slow
    def test_longer_ladders_trade_resolution_for_accuracy(self, config):
        accuracy, resolution = [], []
        for d in range(2, 7):
            model = build_ladder_clock(LadderParams.default().with_updates(d=d))
            evolution = evolve_no_tick(model, config)
            assert evolution.converged, f"d={d}: {evolution.status}"
            stats = tick_statistics(evolution, model)
            assert stats.violations() == []
            accuracy.append(stats.accuracy_N)
            resolution.append(stats.resolution_nu)
        assert all(a < b for a, b in zip(accuracy, accuracy[1:])), accuracy
        assert all(a > b for a, b in zip(resolution, resolution[1:])), resolution


def test_bose_einstein_occupation():
    assert bose_einstein_occupation(math.inf, 1.0) == 0.0
    assert bose_einstein_occupation(1.0, 2.0) == pytest.approx(1.0 / (math.exp(2.0) - 1.0))
    with pytest.raises(ValueError):
        bose_einstein_occupation(0.0, 1.0)
    with pytest.raises(ValueError):
        bose_einstein_occupation(1.0, -1.0)


class TestRandomClocks:
    def test_deterministic_in_seed(self):
        assert build_random_clock(3).equals(build_random_clock(3))
        assert not build_random_clock(3).equals(build_random_clock(4))

    @pytest.mark.parametrize("seed", range(10))
    def test_well_formed(self, seed):
        model = build_random_clock(seed)
        assert 2 <= model.dim <= 6
        assert 1 <= len(model.tick_jumps) <= 2
        assert len(model.notick_lindblad_ops) <= 2
        assert model.initial_state.trace == pytest.approx(1.0)
        assert hermiticity_error(model.hamiltonian) <= 1e-10
        assert np.linalg.norm(model.hamiltonian, 2) <= 10.0 * model.gamma * (1.0 + 1e-9)
        assert tick_reachable(model)

    def test_dim_range(self):
        for seed in range(5):
            assert build_random_clock(seed, dim_range=(3, 3)).dim == 3

    def test_invalid_ranges(self):
        with pytest.raises(ValueError):
            build_random_clock(0, dim_range=(1, 3))
        with pytest.raises(ValueError):
            build_random_clock(0, rate_range=(0.0, 1.0))

    def test_dark_clock_is_unreachable(self, dark_model, exponential_model):
        assert not tick_reachable(dark_model)
        assert tick_reachable(exponential_model)
