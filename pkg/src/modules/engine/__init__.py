"""
Engine Module
No-tick conditioned evolution of a clock model
"""

from .config import IntegrationConfig
from .evolution import (
    ConditionedEvolution,
    evolve_no_tick,
    matrix_exponential_states,
    matrix_exponential_survival,
    normalized_state_at,
    top_level_population,
)
from .model import ClockModel, all_jump_operators

__all__ = [
    "ClockModel",
    "all_jump_operators",
    "IntegrationConfig",
    "ConditionedEvolution",
    "evolve_no_tick",
    "normalized_state_at",
    "top_level_population",
    "matrix_exponential_states",
    "matrix_exponential_survival",
]
