"""
Core Module
Dense complex linear algebra, state and operator types shared by every other module
"""

from .errors import (
    DimensionMismatchError,
    EnsembleRejectionError,
    InsufficientSamplesError,
    InvalidStateError,
    MalformedDocumentError,
    MuBelowFloorError,
    MultipleCrossingsError,
    NoCrossingError,
    NonHermitianError,
    NonPositiveVarianceError,
    NotConvergedError,
    SchemaVersionUnsupportedError,
    StepUnderflowError,
    SurvivalUnderflowError,
    TickboundError,
    TimeOutOfRangeError,
    UnsupportedMomentError,
)
from .operators import (
    TOL_HERM,
    TOL_PSD,
    TOL_TRACE,
    DensityMatrix,
    HermitianOperator,
    MatrixLike,
    as_complex_matrix,
    build_tick_operator,
    hermitian_max_eigenvalue,
    hermiticity_error,
    ket,
    ketbra,
    pure_state,
    symmetrize,
    thermal_qubit_state,
)
from .superoperator import apply_generator, dissipator, trace_functional, unvec, vec, vectorize_superoperator

__all__ = [
    "TOL_HERM",
    "TOL_PSD",
    "TOL_TRACE",
    "DensityMatrix",
    "HermitianOperator",
    "MatrixLike",
    "as_complex_matrix",
    "build_tick_operator",
    "hermitian_max_eigenvalue",
    "hermiticity_error",
    "ket",
    "ketbra",
    "pure_state",
    "symmetrize",
    "thermal_qubit_state",
    "apply_generator",
    "dissipator",
    "trace_functional",
    "unvec",
    "vec",
    "vectorize_superoperator",
    "TickboundError",
    "NonHermitianError",
    "DimensionMismatchError",
    "InvalidStateError",
    "StepUnderflowError",
    "NotConvergedError",
    "NonPositiveVarianceError",
    "TimeOutOfRangeError",
    "SurvivalUnderflowError",
    "NoCrossingError",
    "MultipleCrossingsError",
    "MuBelowFloorError",
    "EnsembleRejectionError",
    "SchemaVersionUnsupportedError",
    "MalformedDocumentError",
    "InsufficientSamplesError",
    "UnsupportedMomentError",
]
