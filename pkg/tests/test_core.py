import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules.core import (
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    InvalidStateError,
    NonHermitianError,
    apply_generator,
    build_tick_operator,
    dissipator,
    hermitian_max_eigenvalue,
    ket,
    ketbra,
    thermal_qubit_state,
    trace_functional,
    unvec,
    vec,
    vectorize_superoperator,
)


def random_operators(seed, dim, n_ops):
    rng = np.random.default_rng(seed)

    def gaussian():
        return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

    raw = gaussian()
    hamiltonian = 0.5 * (raw + raw.conj().T)
    ops = [gaussian() for _ in range(n_ops)]
    jump = gaussian()
    rho = gaussian()
    return hamiltonian, ops, build_tick_operator([jump]), rho


@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 5), n_ops=st.integers(0, 3))
@settings(max_examples=50, deadline=None)
def test_vectorized_generator_matches_direct_evaluation(seed, dim, n_ops):
    hamiltonian, ops, tick, rho = random_operators(seed, dim, n_ops)

    direct = apply_generator(hamiltonian, ops, tick, rho)
    vectorized = unvec(vectorize_superoperator(hamiltonian, ops, tick) @ vec(rho), dim)

    assert np.allclose(direct, vectorized, atol=1e-10)


@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 5), n_ops=st.integers(0, 3))
@settings(max_examples=50, deadline=None)
def test_trace_decays_at_tick_rate(seed, dim, n_ops):
    """d/dt tr(rho) = -tr(V rho) for every matrix rho"""
    hamiltonian, ops, tick, _ = random_operators(seed, dim, n_ops)
    generator = vectorize_superoperator(hamiltonian, ops, tick)

    assert np.allclose(trace_functional(np.eye(dim)) @ generator, -trace_functional(tick.matrix), atol=1e-10)


def test_column_stacking_convention():
    rng = np.random.default_rng(3)
    a, rho, b = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(3))

    assert np.allclose(vec(a @ rho @ b), np.kron(b.T, a) @ vec(rho))
    assert np.allclose(unvec(vec(rho), 3), rho)


def test_trace_functional():
    rng = np.random.default_rng(5)
    m, rho = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) for _ in range(2))

    assert np.isclose(trace_functional(m) @ vec(rho), np.trace(m @ rho))


def test_dissipator_moves_population_down():
    lowering = ketbra(2, 0, 1)
    excited = ketbra(2, 1, 1)

    assert np.allclose(dissipator(lowering, excited), np.diag([1.0, -1.0]))
    assert np.allclose(dissipator(lowering, ketbra(2, 0, 0)), 0.0)


def test_basis_helpers():
    assert np.allclose(ket(3, 2), [0, 0, 1])
    assert np.allclose(ketbra(3, 0, 2), np.outer(ket(3, 0), ket(3, 2)))


def test_tick_operator_sums_jump_rates():
    j1 = np.sqrt(2.0) * np.array([[0, 1], [0, 0]])
    j2 = np.array([[0, 0], [1, 0]])

    tick = build_tick_operator([j1, j2])

    assert np.allclose(tick.matrix, np.diag([1.0, 2.0]))
    assert hermitian_max_eigenvalue(tick) == pytest.approx(2.0)


def test_tick_operator_needs_a_jump():
    with pytest.raises(ValueError):
        build_tick_operator([])


def test_tick_operator_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatchError):
        build_tick_operator([np.eye(2), np.eye(3)])


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_density_matrix_checks():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.0, 0.5]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(DimensionMismatchError):
        DensityMatrix(np.ones((2, 3)))

    half = DensityMatrix(np.diag([0.25, 0.25]))
    assert half.trace == pytest.approx(0.5)
    assert half.normalized().trace == pytest.approx(1.0)


def test_zero_trace_state_cannot_be_normalized():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.zeros((2, 2))).normalized()


def test_thermal_qubit_detailed_balance():
    occupation = 0.3
    state = thermal_qubit_state(occupation)

    assert np.trace(state).real == pytest.approx(1.0)
    assert state[1, 1].real / state[0, 0].real == pytest.approx(occupation / (1.0 + occupation))
    assert np.allclose(thermal_qubit_state(0.0), np.diag([1.0, 0.0]))
