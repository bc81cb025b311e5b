"""
Trajectories Module
Quantum-jump Monte Carlo sampling of tick times and the estimators built on it
"""

from .batch import TrajectoryBatch
from .dump import read_tick_dump, write_tick_dump
from .estimators import (
    TickEstimate,
    estimate_all,
    estimate_from_waiting_times,
    estimate_statistics,
    first_tick_goodness_of_fit,
)
from .sampler import sample_trajectories

__all__ = [
    "TrajectoryBatch",
    "TickEstimate",
    "sample_trajectories",
    "estimate_statistics",
    "estimate_from_waiting_times",
    "estimate_all",
    "first_tick_goodness_of_fit",
    "write_tick_dump",
    "read_tick_dump",
]
