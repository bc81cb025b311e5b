"""
Superoperators
Right-hand side of the no-tick master equation, direct and vectorized

Column stacking is fixed throughout: vec(A rho B) = (B^T kron A) vec(rho).
"""

from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatchError
from .operators import HermitianOperator, MatrixLike, as_complex_matrix


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix"""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of vec"""
    return np.asarray(vector).reshape(dim, dim, order="F")


def _operator_matrix(op: Union[HermitianOperator, MatrixLike]) -> np.ndarray:
    if isinstance(op, HermitianOperator):
        return op.matrix
    return as_complex_matrix(op)


def _check_dims(dim: int, operators: Sequence[np.ndarray], what: str):
    for index, op in enumerate(operators):
        if op.shape != (dim, dim):
            raise DimensionMismatchError(f"{what} {index} has shape {op.shape}, expected {(dim, dim)}")


def dissipator(jump: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """D[L] rho = L rho L^dagger - 1/2 {L^dagger L, rho}"""
    jump_dag = jump.conj().T
    rate = jump_dag @ jump
    return jump @ rho @ jump_dag - 0.5 * (rate @ rho + rho @ rate)


def apply_generator(
    hamiltonian: MatrixLike,
    dissipator_ops: Sequence[MatrixLike],
    tick_operator: Union[HermitianOperator, MatrixLike],
    rho: np.ndarray,
    tick_sign: float = 1.0,
) -> np.ndarray:
    """Evaluate -i[H, rho] + sum_k D[L_k] rho - 1/2 {V, rho} directly

    Args:
        hamiltonian: clock Hamiltonian H
        dissipator_ops: no-tick Lindblad operators L_k
        tick_operator: V = sum_j J_j^dagger J_j
        rho: (unnormalized) state
        tick_sign: +1 for the physical equation; -1 flips the anticommutator (mutation tests)
    """
    ham = _operator_matrix(hamiltonian)
    tick = _operator_matrix(tick_operator)
    rho = np.asarray(rho, dtype=np.complex128)

    result = -1j * (ham @ rho - rho @ ham)
    for op in dissipator_ops:
        result = result + dissipator(_operator_matrix(op), rho)
    result = result - tick_sign * 0.5 * (tick @ rho + rho @ tick)
    return result


def vectorize_superoperator(
    hamiltonian: MatrixLike,
    dissipator_ops: Sequence[MatrixLike],
    anticommutator_op: Union[HermitianOperator, MatrixLike],
    tick_sign: float = 1.0,
) -> np.ndarray:
    """d^2 x d^2 matrix of the no-tick generator acting on vec(rho)

    Raises:
        DimensionMismatchError: operators of different dimensions
    """
    ham = _operator_matrix(hamiltonian)
    dim = ham.shape[0]
    ops = [_operator_matrix(op) for op in dissipator_ops]
    tick = _operator_matrix(anticommutator_op)
    _check_dims(dim, [ham], "Hamiltonian")
    _check_dims(dim, ops, "Dissipator")
    _check_dims(dim, [tick], "Tick operator")

    ident = np.eye(dim, dtype=np.complex128)
    generator = -1j * (np.kron(ident, ham) - np.kron(ham.T, ident))
    for op in ops:
        rate = op.conj().T @ op
        generator += np.kron(op.conj(), op) - 0.5 * (np.kron(ident, rate) + np.kron(rate.T, ident))
    generator -= tick_sign * 0.5 * (np.kron(ident, tick) + np.kron(tick.T, ident))
    return generator


def trace_functional(matrix: np.ndarray) -> np.ndarray:
    """Row vector w with w . vec(rho) = tr(matrix rho)"""
    return vec(np.asarray(matrix).T)
