"""
Tick Statistics
Accuracy, resolution and the accuracy-resolution trade-off for one tick
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from modules.core import NonPositiveVarianceError
from modules.engine import ClockModel, ConditionedEvolution

from .moments import mean_tail_bracket, moment

logger = logging.getLogger(__name__)

TRADEOFF_TOL = 1e-6
RESOLUTION_TOL = 1e-8
VARIANCE_FLOOR_TOL = 1e-6


@dataclass(frozen=True)
class TickStatistics:
    """Waiting-time statistics of one tick

    accuracy_N = mu^2 / sigma2, resolution_nu = 1 / mu, bound_ratio = N nu^2 / Gamma^2.
    """

    mu: float
    sigma2: float
    accuracy_N: float
    resolution_nu: float
    gamma: float
    bound_ratio: float
    tail_bracket: Tuple[float, float]
    converged: bool = True
    tick_index: int = 1

    @classmethod
    def from_moments(
        cls,
        t1: float,
        t2: float,
        gamma: float,
        tail_bracket: Optional[Tuple[float, float]] = None,
        tick_index: int = 1,
    ) -> "TickStatistics":
        """Build from the first two raw moments

        Raises:
            NonPositiveVarianceError: t2 - t1^2 <= 0
        """
        sigma2 = t2 - t1 * t1
        if not sigma2 > 0.0 or not t1 > 0.0:
            raise NonPositiveVarianceError(f"Quadrature gave mu={t1!r}, sigma2={sigma2!r}")
        accuracy = t1 * t1 / sigma2
        resolution = 1.0 / t1
        return cls(
            mu=t1,
            sigma2=sigma2,
            accuracy_N=accuracy,
            resolution_nu=resolution,
            gamma=gamma,
            bound_ratio=accuracy * resolution * resolution / (gamma * gamma),
            tail_bracket=tail_bracket if tail_bracket is not None else (t1, t1),
            tick_index=tick_index,
        )

    @property
    def classical_ratio(self) -> float:
        """N nu / Gamma, 1 on the classical averaging line"""
        return self.accuracy_N * self.resolution_nu / self.gamma

    def violations(self) -> List[str]:
        """Names of the bounds this tick breaks"""
        found = []
        if self.bound_ratio > 1.0 + TRADEOFF_TOL:
            found.append("tradeoff")
        if self.resolution_nu > self.gamma * (1.0 + RESOLUTION_TOL):
            found.append("resolution_bound")
        if self.sigma2 < (1.0 - VARIANCE_FLOOR_TOL) / (self.gamma * self.gamma):
            found.append("variance_floor")
        return found

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu": self.mu,
            "sigma2": self.sigma2,
            "N": self.accuracy_N,
            "nu": self.resolution_nu,
            "Gamma": self.gamma,
            "bound_ratio": self.bound_ratio,
            "classical_ratio": self.classical_ratio,
            "tail_bracket": list(self.tail_bracket),
            "converged": self.converged,
        }

    def with_tick_index(self, tick_index: int) -> "TickStatistics":
        return dataclasses.replace(self, tick_index=tick_index)


def tick_statistics(evolution: ConditionedEvolution, model: Optional[ClockModel] = None) -> TickStatistics:
    """Statistics of the first tick after the evolution's initial state

    Raises:
        NotConvergedError: evolution did not reach the survival cutoff
        NonPositiveVarianceError: quadrature failure
    """
    t1 = moment(evolution, 1)
    t2 = moment(evolution, 2)
    gamma = model.gamma if model is not None else evolution.gamma
    stats = TickStatistics.from_moments(t1, t2, gamma, tail_bracket=mean_tail_bracket(evolution))
    logger.debug(f"mu={stats.mu:.6g} sigma2={stats.sigma2:.6g} N={stats.accuracy_N:.6g} bound_ratio={stats.bound_ratio:.6g}")
    return stats


def check_tradeoff(stats: TickStatistics) -> Dict[str, Any]:
    """Check N <= Gamma^2 / nu^2

    Returns:
        {"satisfied": bool, "ratio": N nu^2 / Gamma^2, "classical_ratio": N nu / Gamma}
    """
    return {
        "satisfied": bool(stats.bound_ratio <= 1.0 + TRADEOFF_TOL),
        "ratio": stats.bound_ratio,
        "classical_ratio": stats.classical_ratio,
    }
