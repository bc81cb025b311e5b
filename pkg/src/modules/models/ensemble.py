"""
Random Clock Ensemble
Seeded random clock models for property checks
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from config import config_manager
from modules.core import EnsembleRejectionError, build_tick_operator, hermitian_max_eigenvalue, pure_state, trace_functional, vec
from modules.engine import ClockModel

logger = logging.getLogger(__name__)

DEFAULT_DIM_RANGE = (2, 6)
DEFAULT_RATE_RANGE = (0.01, 10.0)
DEFAULT_HAMILTONIAN_SCALE = 10.0
DEFAULT_MAX_RESAMPLES = 100
REACHABILITY_TOL = 1e-12


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _random_operator(rng: np.random.Generator, dim: int, rate_range: Tuple[float, float]) -> np.ndarray:
    """Gaussian operator whose rates (squared singular values) are log-uniform in rate_range"""
    left, _, right = np.linalg.svd(_complex_gaussian(rng, (dim, dim)))
    low, high = np.log(rate_range[0]), np.log(rate_range[1])
    rates = np.exp(rng.uniform(low, high, size=dim))
    return (left * np.sqrt(rates)) @ right


def _random_hamiltonian(rng: np.random.Generator, dim: int, norm: float) -> np.ndarray:
    raw = _complex_gaussian(rng, (dim, dim))
    hermitian = 0.5 * (raw + raw.conj().T)
    spectral = np.linalg.norm(hermitian, 2)
    return hermitian * (norm / spectral) if spectral > 0 else hermitian


def tick_reachable(model: ClockModel) -> bool:
    """Whether some power of the generator carries the initial state onto the tick channel

    Checks tr(V G^k rho0) for k < d^2, which spans the Krylov space of the initial state.
    """
    generator = model.generator()
    weights = trace_functional(model.tick_operator.matrix)
    vector = vec(model.initial_state.matrix)
    for _ in range(model.dim * model.dim):
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            return False
        vector = vector / norm
        if abs(weights @ vector) > REACHABILITY_TOL:
            return True
        vector = generator @ vector
    return False


def build_random_clock(
    seed: int,
    dim_range: Optional[Sequence[int]] = None,
    max_notick_ops: Optional[int] = None,
    max_jumps: Optional[int] = None,
    rate_range: Optional[Sequence[float]] = None,
    hamiltonian_scale: Optional[float] = None,
    max_resamples: Optional[int] = None,
) -> ClockModel:
    """Random clock, deterministic in seed

    Unset arguments come from the ensemble settings. The Hamiltonian has spectral norm
    up to hamiltonian_scale * Gamma, there are 0..max_notick_ops no-tick operators and
    1..max_jumps tick jumps, and the initial state is a random pure state.

    Raises:
        EnsembleRejectionError: no model with a reachable tick after max_resamples draws
    """
    settings = config_manager.get_ensemble_settings()
    dim_range = tuple(dim_range or settings.get("dim_range", DEFAULT_DIM_RANGE))
    max_notick_ops = settings.get("max_notick_ops", 2) if max_notick_ops is None else max_notick_ops
    max_jumps = settings.get("max_jumps", 2) if max_jumps is None else max_jumps
    rate_range = tuple(rate_range or settings.get("rate_range", DEFAULT_RATE_RANGE))
    hamiltonian_scale = settings.get("hamiltonian_scale", DEFAULT_HAMILTONIAN_SCALE) if hamiltonian_scale is None else hamiltonian_scale
    max_resamples = settings.get("max_resamples", DEFAULT_MAX_RESAMPLES) if max_resamples is None else max_resamples

    low_dim, high_dim = int(dim_range[0]), int(dim_range[1])
    if low_dim < 2 or high_dim < low_dim:
        raise ValueError(f"dim_range must satisfy 2 <= low <= high, got {dim_range}")
    if max_notick_ops < 0 or max_jumps < 1:
        raise ValueError(f"Need max_notick_ops >= 0 and max_jumps >= 1, got {max_notick_ops}, {max_jumps}")
    if not 0 < rate_range[0] <= rate_range[1]:
        raise ValueError(f"rate_range must be positive and ordered, got {rate_range}")

    rng = np.random.default_rng(seed)
    for attempt in range(max_resamples):
        dim = int(rng.integers(low_dim, high_dim + 1))
        notick = tuple(_random_operator(rng, dim, rate_range) for _ in range(int(rng.integers(0, max_notick_ops + 1))))
        jumps = tuple(_random_operator(rng, dim, rate_range) for _ in range(int(rng.integers(1, max_jumps + 1))))
        psi = _complex_gaussian(rng, dim)
        h_norm = rng.uniform(0.0, hamiltonian_scale)

        gamma = hermitian_max_eigenvalue(build_tick_operator(jumps))

        model = ClockModel(
            hamiltonian=_random_hamiltonian(rng, dim, h_norm * gamma),
            notick_lindblad_ops=notick,
            tick_jumps=jumps,
            initial_state=pure_state(psi),
            name=f"random-{seed}",
            metadata={"builder": "random", "params": {"seed": seed, "attempt": attempt}},
        )
        if tick_reachable(model):
            return model
        logger.debug(f"Random clock seed={seed} attempt {attempt}: tick unreachable, resampling")

    raise EnsembleRejectionError(f"No random clock with a reachable tick after {max_resamples} draws (seed={seed})")
