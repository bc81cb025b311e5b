"""
Tick Dumps
Raw tick times, one comma-separated line per trajectory
"""

import csv
import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from utils.formatting import format_float

from .batch import TrajectoryBatch

logger = logging.getLogger(__name__)


def write_tick_dump(batch: TrajectoryBatch, path: Union[str, Path]):
    """Write tick times at 12 significant digits; trajectories without ticks give empty lines"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        for times in batch.tick_times:
            writer.writerow([format_float(t) for t in times])
    logger.info(f"Wrote {batch.n_traj} trajectories to {path}")


def read_tick_dump(path: Union[str, Path]) -> List[np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [np.asarray([float(x) for x in row], dtype=float) for row in csv.reader(f)]
