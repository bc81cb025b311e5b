"""
Clock Model
One ticking clock: Hamiltonian, no-tick dissipators, tick jumps and initial state
"""

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from modules.core import (
    TOL_TRACE,
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    InvalidStateError,
    MatrixLike,
    as_complex_matrix,
    build_tick_operator,
    hermitian_max_eigenvalue,
    vectorize_superoperator,
)


@dataclass(frozen=True, eq=False)
class ClockModel:
    """Autonomous clock described by the no-tick master equation

    Units: rates for H (hbar = 1), square roots of rates for the Lindblad
    and jump operators.
    """

    hamiltonian: np.ndarray
    notick_lindblad_ops: Tuple[np.ndarray, ...]
    tick_jumps: Tuple[np.ndarray, ...]
    initial_state: DensityMatrix
    name: str = "clock"
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        hamiltonian = HermitianOperator(self.hamiltonian).matrix
        dim = hamiltonian.shape[0]

        notick = tuple(as_complex_matrix(op) for op in self.notick_lindblad_ops)
        jumps = tuple(as_complex_matrix(op) for op in self.tick_jumps)
        if not jumps:
            raise ValueError("tick_jumps must not be empty: a clock must be able to tick")
        for label, ops in (("no-tick operator", notick), ("tick jump", jumps)):
            for index, op in enumerate(ops):
                if op.shape != (dim, dim):
                    raise DimensionMismatchError(f"{label} {index} has shape {op.shape}, expected {(dim, dim)}")

        state = self.initial_state
        if not isinstance(state, DensityMatrix):
            state = DensityMatrix(state)
        if state.dim != dim:
            raise DimensionMismatchError(f"Initial state has dimension {state.dim}, expected {dim}")
        if abs(state.trace - 1.0) > TOL_TRACE:
            raise InvalidStateError(f"Initial state must have unit trace, got {state.trace!r}")

        object.__setattr__(self, "hamiltonian", hamiltonian)
        object.__setattr__(self, "notick_lindblad_ops", notick)
        object.__setattr__(self, "tick_jumps", jumps)
        object.__setattr__(self, "initial_state", state)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def tick_operator(self) -> HermitianOperator:
        """V = sum_j J_j^dagger J_j"""
        return build_tick_operator(self.tick_jumps)

    @cached_property
    def gamma(self) -> float:
        """Fastest elementary tick rate, the largest eigenvalue of V"""
        return hermitian_max_eigenvalue(self.tick_operator)

    def generator(self, tick_sign: float = 1.0) -> np.ndarray:
        """Vectorized no-tick generator acting on column-stacked states"""
        return vectorize_superoperator(self.hamiltonian, self.notick_lindblad_ops, self.tick_operator, tick_sign=tick_sign)

    def with_initial_state(self, state: Union[DensityMatrix, MatrixLike]) -> "ClockModel":
        """Same clock restarted from another state"""
        return dataclasses.replace(self, initial_state=state)

    def equals(self, other: "ClockModel", atol: float = 0.0) -> bool:
        """Entrywise comparison of every operator and the initial state"""
        if not isinstance(other, ClockModel) or other.dim != self.dim:
            return False
        if len(other.notick_lindblad_ops) != len(self.notick_lindblad_ops):
            return False
        if len(other.tick_jumps) != len(self.tick_jumps):
            return False
        pairs = [(self.hamiltonian, other.hamiltonian), (self.initial_state.matrix, other.initial_state.matrix)]
        pairs += list(zip(self.notick_lindblad_ops, other.notick_lindblad_ops))
        pairs += list(zip(self.tick_jumps, other.tick_jumps))
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in pairs)


def all_jump_operators(model: ClockModel) -> Sequence[np.ndarray]:
    """No-tick operators followed by tick jumps"""
    return list(model.notick_lindblad_ops) + list(model.tick_jumps)
