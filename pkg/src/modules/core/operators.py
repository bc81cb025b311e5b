"""
Operators and States
Dense complex matrices, Hermitian operators and (unnormalized) density matrices
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import linalg

from .errors import DimensionMismatchError, InvalidStateError, NonHermitianError

logger = logging.getLogger(__name__)

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-10

MatrixLike = Union[np.ndarray, Sequence[Sequence[complex]]]


def as_complex_matrix(entries: MatrixLike) -> np.ndarray:
    """Copy entries into a read-only complex128 matrix

    Args:
        entries: 2-D array-like of complex numbers

    Returns:
        Read-only complex matrix

    Raises:
        DimensionMismatchError: not two-dimensional or zero-sized
        ValueError: NaN or Inf entries
    """
    matrix = np.array(entries, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DimensionMismatchError(f"Expected a non-empty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix contains NaN or Inf entries")
    matrix.setflags(write=False)
    return matrix


def hermiticity_error(matrix: np.ndarray) -> float:
    """Largest entry of |A - A^dagger|"""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^dagger) / 2"""
    return 0.5 * (matrix + matrix.conj().T)


def _require_square(matrix: np.ndarray, what: str) -> int:
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionMismatchError(f"{what} must be square, got {rows}x{cols}")
    return rows


@dataclass(frozen=True)
class HermitianOperator:
    """Square matrix that is Hermitian within TOL_HERM"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = as_complex_matrix(self.matrix)
        _require_square(matrix, "Hermitian operator")
        error = hermiticity_error(matrix)
        if error > TOL_HERM:
            raise NonHermitianError(f"Operator is not Hermitian: max |A - A^dagger| = {error:.3e}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite matrix with trace in [0, 1]

    Unnormalized states are allowed: the no-tick state loses trace over time.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = as_complex_matrix(self.matrix)
        _require_square(matrix, "Density matrix")
        error = hermiticity_error(matrix)
        if error > TOL_HERM:
            raise NonHermitianError(f"Density matrix is not Hermitian: max |rho - rho^dagger| = {error:.3e}")
        min_eig = float(linalg.eigvalsh(symmetrize(matrix))[0])
        if min_eig < -TOL_PSD:
            raise InvalidStateError(f"Density matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")
        trace = float(np.real(np.trace(matrix)))
        if trace > 1.0 + TOL_TRACE:
            raise InvalidStateError(f"Density matrix trace {trace!r} exceeds 1")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def normalized(self) -> "DensityMatrix":
        """Return rho / tr(rho)"""
        trace = self.trace
        if trace <= 0.0:
            raise InvalidStateError("Cannot normalize a state with zero trace")
        return DensityMatrix(self.matrix / trace)


def hermitian_max_eigenvalue(op: Union[HermitianOperator, MatrixLike]) -> float:
    """Largest eigenvalue of a Hermitian operator

    For a positive semidefinite tick operator V this is Gamma, the fastest
    elementary tick rate.
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    return float(linalg.eigvalsh(symmetrize(op.matrix))[-1])


def build_tick_operator(jumps: Iterable[MatrixLike]) -> HermitianOperator:
    """Sum of J^dagger J over the tick-generating jump operators

    Raises:
        ValueError: empty jump list
        DimensionMismatchError: jumps of different or non-square shape
    """
    matrices = [as_complex_matrix(j) for j in jumps]
    if not matrices:
        raise ValueError("A clock needs at least one tick jump operator")

    dim = _require_square(matrices[0], "Jump operator")
    total = np.zeros((dim, dim), dtype=np.complex128)
    for index, jump in enumerate(matrices):
        if jump.shape != (dim, dim):
            raise DimensionMismatchError(f"Jump {index} has shape {jump.shape}, expected {(dim, dim)}")
        total += jump.conj().T @ jump

    return HermitianOperator(symmetrize(total))


def ket(dim: int, n: int) -> np.ndarray:
    """Computational basis vector |n> in dimension dim"""
    vector = np.zeros(dim, dtype=np.complex128)
    vector[n] = 1.0
    return vector


def ketbra(dim: int, m: int, n: int) -> np.ndarray:
    """Matrix unit |m><n|"""
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[m, n] = 1.0
    return matrix


def pure_state(vector: np.ndarray) -> np.ndarray:
    """Projector onto the normalized vector"""
    vector = np.asarray(vector, dtype=np.complex128)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise InvalidStateError("Cannot build a pure state from the zero vector")
    vector = vector / norm
    return np.outer(vector, vector.conj())


def thermal_qubit_state(occupation: float) -> np.ndarray:
    """Gibbs state of a qubit with Bose-Einstein occupation n

    Detailed balance of the rates n*gamma (up) and (1+n)*gamma (down) gives
    p1 / p0 = n / (1 + n).
    """
    if occupation < 0.0:
        raise ValueError(f"Occupation must be non-negative, got {occupation}")
    excited = occupation / (2.0 * occupation + 1.0)
    return np.diag([1.0 - excited, excited]).astype(np.complex128)
