"""
Tick Sequences
Per-tick statistics of consecutive ticks under a reset policy
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from modules.core import InvalidStateError, NotConvergedError, symmetrize
from modules.engine import ClockModel, IntegrationConfig, evolve_no_tick

from .statistics import TickStatistics, tick_statistics

logger = logging.getLogger(__name__)


class ResetPolicy(str, Enum):
    """State the clock restarts from after a tick"""

    JUMP_CONDITIONED = "jump_conditioned"
    FIXED_STATE = "fixed_state"


@dataclass(frozen=True)
class TickSequenceStatistics:
    per_tick: Tuple[TickStatistics, ...]
    reset_policy: ResetPolicy

    @property
    def accuracies(self) -> List[float]:
        return [stats.accuracy_N for stats in self.per_tick]

    def __len__(self) -> int:
        return len(self.per_tick)


def jump_conditioned_reset(model: ClockModel, integrated_state: np.ndarray) -> np.ndarray:
    """sum_j J_j rho_bar J_j^dagger, normalized

    rho_bar is the time integral of the no-tick state; its jump image has the
    distribution of the post-tick state averaged over the tick time.
    """
    post = np.zeros((model.dim, model.dim), dtype=np.complex128)
    for jump in model.tick_jumps:
        post += jump @ integrated_state @ jump.conj().T
    # Quadrature error can leave eigenvalues slightly below zero
    eigenvalues, vectors = linalg.eigh(symmetrize(post))
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    trace = float(eigenvalues.sum())
    if trace <= 0.0:
        raise InvalidStateError("Tick jumps annihilate the time-averaged state")
    return symmetrize((vectors * (eigenvalues / trace)) @ vectors.conj().T)


def multi_tick_statistics(
    model: ClockModel,
    n_ticks: int,
    config: Optional[IntegrationConfig] = None,
    reset_policy: ResetPolicy = ResetPolicy.JUMP_CONDITIONED,
) -> TickSequenceStatistics:
    """Statistics of ticks 1..n_ticks

    Raises:
        NotConvergedError: some tick never happens; tick_index names it
    """
    if n_ticks < 1:
        raise ValueError(f"n_ticks must be >= 1, got {n_ticks}")
    reset_policy = ResetPolicy(reset_policy)
    config = config or IntegrationConfig.from_settings()

    current = model
    per_tick = []
    for tick_index in range(1, n_ticks + 1):
        evolution = evolve_no_tick(current, config)
        if not evolution.converged:
            raise NotConvergedError(
                f"Tick {tick_index} of {model.name!r} did not converge by t={evolution.horizon:.6g}",
                tick_index=tick_index,
                horizon=evolution.horizon,
            )
        per_tick.append(tick_statistics(evolution, current).with_tick_index(tick_index))

        if tick_index < n_ticks and reset_policy is ResetPolicy.JUMP_CONDITIONED:
            current = current.with_initial_state(jump_conditioned_reset(current, evolution.integrated_state()))

    logger.info(f"Computed {n_ticks} tick(s) of {model.name!r} with {reset_policy.value} reset")
    return TickSequenceStatistics(per_tick=tuple(per_tick), reset_policy=reset_policy)
