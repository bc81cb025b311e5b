"""
Trajectory Batch
Tick times of a sampled batch and the waiting times derived from them
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Tick times of n_traj trajectories

    tick_times[i] holds the absolute tick times of trajectory i, strictly increasing and
    at most max_ticks long. A trajectory with fewer than max_ticks ticks was censored at
    the horizon. estimated maps tick index to the estimator record of that tick.
    """

    seed: int
    n_traj: int
    max_ticks: int
    horizon: float
    tick_times: Tuple[np.ndarray, ...]
    min_samples: int = 100
    estimated: Dict[int, dict] = field(default_factory=dict)

    @property
    def censored_count(self) -> int:
        """Trajectories that hit the horizon before their last requested tick"""
        return sum(1 for times in self.tick_times if len(times) < self.max_ticks)

    def censored_at(self, tick_index: int) -> int:
        """Trajectories that never reached tick number tick_index"""
        return sum(1 for times in self.tick_times if len(times) < tick_index)

    def waiting_times(self, tick_index: int) -> np.ndarray:
        """Waiting times before tick tick_index, over the trajectories that reached it"""
        if not 1 <= tick_index <= self.max_ticks:
            raise ValueError(f"tick_index must lie in 1..{self.max_ticks}, got {tick_index}")
        waits = [
            times[tick_index - 1] - (times[tick_index - 2] if tick_index > 1 else 0.0)
            for times in self.tick_times
            if len(times) >= tick_index
        ]
        return np.asarray(waits, dtype=float)

    def first_tick_times(self) -> np.ndarray:
        return np.asarray([times[0] for times in self.tick_times if len(times)], dtype=float)
