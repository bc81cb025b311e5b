"""
Statistics Module
Moments, accuracy and resolution, the trade-off check, tick sequences and the Heaviside crossing
"""

from .crossing import CrossingResult, early_interval_end, find_crossing
from .invariants import evolution_violations, sandwich_violations
from .moments import SUPPORTED_ORDERS, exponential_tail_moment, mean_tail_bracket, moment, moment_identity_gap
from .sequence import ResetPolicy, TickSequenceStatistics, jump_conditioned_reset, multi_tick_statistics
from .statistics import TickStatistics, check_tradeoff, tick_statistics

__all__ = [
    "SUPPORTED_ORDERS",
    "moment",
    "moment_identity_gap",
    "mean_tail_bracket",
    "exponential_tail_moment",
    "TickStatistics",
    "tick_statistics",
    "check_tradeoff",
    "ResetPolicy",
    "TickSequenceStatistics",
    "jump_conditioned_reset",
    "multi_tick_statistics",
    "CrossingResult",
    "find_crossing",
    "early_interval_end",
    "sandwich_violations",
    "evolution_violations",
]
